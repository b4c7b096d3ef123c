#include "pachinko/data_model.hpp"

#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "pachinko/csv.hpp"
#include "pachinko/error.hpp"
#include "pachinko/file_io.hpp"

namespace pachinko {

namespace {

using nlohmann::json;

std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

bool parse_binary_flag(const std::string& s, bool& out) {
  if (s == "0") {
    out = false;
    return true;
  }
  if (s == "1") {
    out = true;
    return true;
  }
  return false;
}

}  // namespace

std::vector<GsrRecord> load_gsr(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw ParseError(path + ": missing header row");

  const auto& header = rows.front().fields;
  static const std::vector<std::string> kColumns = {"date", "city", "event", "headline",
                                                    "violent"};
  if (header.size() < 3 || header.size() > kColumns.size()) {
    throw ParseError(where(path, rows.front().line) + ": expected header date,city,event[,headline,violent]");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != kColumns[i]) {
      throw ParseError(where(path, rows.front().line) + ": unexpected header column '" +
                       header[i] + "' (want '" + kColumns[i] + "')");
    }
  }

  std::vector<GsrRecord> out;
  std::set<std::pair<Date, std::string>> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // trailing blank line
    if (row.fields.size() != header.size()) {
      throw ParseError(where(path, row.line) + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(row.fields.size()));
    }
    GsrRecord rec;
    const auto date = Date::parse_iso(row.fields[0]);
    if (!date) throw ParseError(where(path, row.line) + ": bad date '" + row.fields[0] + "'");
    rec.date = *date;
    rec.city = row.fields[1];
    if (rec.city.empty()) throw ParseError(where(path, row.line) + ": empty city");
    if (!parse_binary_flag(row.fields[2], rec.event)) {
      throw ParseError(where(path, row.line) + ": event must be 0 or 1, got '" + row.fields[2] +
                       "'");
    }
    if (row.fields.size() > 3) rec.headline = row.fields[3];
    if (row.fields.size() > 4 && !row.fields[4].empty()) {
      bool v = false;
      if (!parse_binary_flag(row.fields[4], v)) {
        throw ParseError(where(path, row.line) + ": violent must be 0, 1 or empty");
      }
      rec.violent = v;
    }
    if (!seen.emplace(rec.date, rec.city).second) {
      throw ValidationError(where(path, row.line) + ": duplicate (date, city) pair " +
                            rec.date.to_string() + "/" + rec.city);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void save_gsr(const std::string& path, const std::vector<GsrRecord>& records) {
  std::string out = "date,city,event,headline,violent\n";
  for (const auto& rec : records) {
    out += csv::join_row({rec.date.to_string(), rec.city, rec.event ? "1" : "0", rec.headline,
                          rec.violent ? (*rec.violent ? "1" : "0") : ""});
    out += '\n';
  }
  write_text_file(path, out);
}

namespace {

TweetRecord tweet_from_json(const json& j, const std::string& origin) {
  for (const char* key : {"id", "text", "authored_at"}) {
    if (!j.contains(key)) throw ValidationError(origin + ": missing required key '" + key + "'");
  }
  TweetRecord t;
  if (!j["id"].is_string() || j["id"].get<std::string>().empty()) {
    throw ValidationError(origin + ": 'id' must be a non-empty string");
  }
  t.id = j["id"].get<std::string>();
  if (!j["text"].is_string()) throw ValidationError(origin + ": 'text' must be a string");
  t.text = j["text"].get<std::string>();
  if (!j["authored_at"].is_string()) {
    throw ValidationError(origin + ": 'authored_at' must be a string");
  }
  const auto ts = Timestamp::parse_iso(j["authored_at"].get<std::string>());
  if (!ts) {
    throw ValidationError(origin + ": bad authored_at '" + j["authored_at"].get<std::string>() +
                          "' (want ISO-8601 with offset)");
  }
  t.authored_at = *ts;

  if (j.contains("geo") && !j["geo"].is_null()) {
    const auto& g = j["geo"];
    if (!g.is_object() || !g.contains("lat") || !g.contains("lon") || !g["lat"].is_number() ||
        !g["lon"].is_number()) {
      throw ValidationError(origin + ": 'geo' must be {lat, lon}");
    }
    GeoPoint p{g["lat"].get<double>(), g["lon"].get<double>()};
    if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0) {
      throw ValidationError(origin + ": geo out of range (lat " + std::to_string(p.lat) +
                            ", lon " + std::to_string(p.lon) + ")");
    }
    t.geo = p;
  }
  if (j.contains("bio_location") && !j["bio_location"].is_null()) {
    if (!j["bio_location"].is_string()) {
      throw ValidationError(origin + ": 'bio_location' must be a string");
    }
    t.bio_location = j["bio_location"].get<std::string>();
  }

  // Annotation fields written by earlier pipeline stages, if any.
  if (j.contains("matched_city")) t.annotations.matched_city = j["matched_city"].get<std::string>();
  if (j.contains("city_ambiguous")) t.annotations.city_ambiguous = j["city_ambiguous"].get<bool>();
  if (j.contains("relevant")) t.annotations.relevant = j["relevant"].get<bool>();
  if (j.contains("resolved_target_dates")) {
    for (const auto& d : j["resolved_target_dates"]) {
      const auto date = Date::parse_iso(d.get<std::string>());
      if (!date) throw ValidationError(origin + ": bad resolved date '" + d.get<std::string>() + "'");
      if (*date < t.authored_at.local_date) {
        throw ValidationError(origin + ": resolved date " + date->to_string() +
                              " precedes the authoring date " +
                              t.authored_at.local_date.to_string());
      }
      t.annotations.resolved_target_dates.push_back(*date);
    }
  }
  return t;
}

}  // namespace

std::vector<TweetRecord> load_tweets(const std::string& path) {
  const std::string content = read_text_file(path);
  std::vector<TweetRecord> out;
  std::set<std::string> ids;
  std::size_t line = 0;
  std::istringstream in(content);
  std::string row;
  while (std::getline(in, row)) {
    ++line;
    if (row.empty()) continue;
    json j;
    try {
      j = json::parse(row);
    } catch (const json::parse_error& e) {
      throw ParseError(where(path, line) + ": invalid JSON: " + e.what());
    }
    TweetRecord t = tweet_from_json(j, where(path, line));
    if (!ids.insert(t.id).second) {
      throw ValidationError(where(path, line) + ": duplicate tweet id '" + t.id + "'");
    }
    out.push_back(std::move(t));
  }
  return out;
}

void save_tweets(const std::string& path, const std::vector<TweetRecord>& tweets) {
  std::string out;
  for (const auto& t : tweets) {
    json j;
    j["id"] = t.id;
    j["text"] = t.text;
    j["authored_at"] = t.authored_at.raw;
    if (t.geo) j["geo"] = {{"lat", t.geo->lat}, {"lon", t.geo->lon}};
    if (t.bio_location) j["bio_location"] = *t.bio_location;
    if (t.annotations.matched_city) j["matched_city"] = *t.annotations.matched_city;
    if (t.annotations.city_ambiguous) j["city_ambiguous"] = true;
    if (!t.annotations.resolved_target_dates.empty()) {
      json dates = json::array();
      for (const auto& d : t.annotations.resolved_target_dates) dates.push_back(d.to_string());
      j["resolved_target_dates"] = dates;
    }
    if (t.annotations.relevant) j["relevant"] = *t.annotations.relevant;
    out += j.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

CityGazetteer load_gazetteer(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON: " + std::string(e.what()));
  }
  CityGazetteer gaz;
  gaz.radius_miles = j.value("radius_miles", 25.0);
  if (!(gaz.radius_miles > 0)) throw ValidationError(path + ": radius_miles must be > 0");
  if (!j.contains("cities") || !j["cities"].is_array() || j["cities"].empty()) {
    throw ValidationError(path + ": 'cities' must be a non-empty array");
  }
  for (const auto& c : j["cities"]) {
    City city;
    city.name = c.at("name").get<std::string>();
    if (c.contains("aliases")) {
      for (const auto& a : c["aliases"]) city.aliases.push_back(a.get<std::string>());
    }
    city.centre.lat = c.at("lat").get<double>();
    city.centre.lon = c.at("lon").get<double>();
    if (city.centre.lat < -90 || city.centre.lat > 90 || city.centre.lon < -180 ||
        city.centre.lon > 180) {
      throw ValidationError(path + ": city '" + city.name + "' centre out of range");
    }
    if (gaz.contains(city.name)) {
      throw ValidationError(path + ": duplicate city '" + city.name + "'");
    }
    gaz.cities.push_back(std::move(city));
  }
  return gaz;
}

void save_gazetteer(const std::string& path, const CityGazetteer& gaz) {
  json j;
  j["radius_miles"] = gaz.radius_miles;
  j["cities"] = json::array();
  for (const auto& c : gaz.cities) {
    json jc;
    jc["name"] = c.name;
    jc["aliases"] = c.aliases;
    jc["lat"] = c.centre.lat;
    jc["lon"] = c.centre.lon;
    j["cities"].push_back(jc);
  }
  write_text_file(path, j.dump(2) + "\n");
}

CityGazetteer default_gazetteer() {
  CityGazetteer gaz;
  gaz.radius_miles = 25.0;
  gaz.cities = {
      {"Adelaide", {}, {-34.9285, 138.6007}},
      {"Brisbane", {"brissy"}, {-27.4698, 153.0251}},
      {"Canberra", {}, {-35.2809, 149.1300}},
      {"Darwin", {}, {-12.4634, 130.8456}},
      {"Hobart", {}, {-42.8821, 147.3272}},
      {"Melbourne", {"melb"}, {-37.8136, 144.9631}},
      {"Perth", {}, {-31.9505, 115.8605}},
      {"Sydney", {"syd"}, {-33.8688, 151.2093}},
  };
  return gaz;
}

JarGrid build_jar_grid(const std::vector<GsrRecord>& gsr) {
  JarGrid grid;
  for (const auto& rec : gsr) {
    JarKey key{rec.date, rec.city};
    Jar jar;
    jar.key = key;
    jar.event = rec.event;
    if (!grid.emplace(std::move(key), std::move(jar)).second) {
      throw ValidationError("duplicate (date, city) pair in GSR: " + rec.date.to_string() + "/" +
                            rec.city);
    }
  }
  return grid;
}

DropReport drop_tweets_into_jars(const std::vector<TweetRecord>& tweets, JarGrid& jars) {
  DropReport report;
  for (const auto& t : tweets) {
    if (!t.annotations.matched_city) continue;
    bool placed_any = false;
    for (const Date& target : t.annotations.resolved_target_dates) {
      const auto it = jars.find(JarKey{target, *t.annotations.matched_city});
      if (it == jars.end()) {
        ++report.dropped;
        continue;
      }
      it->second.indicative_count += 1;
      it->second.evidence.push_back(t.id);
      ++report.placed;
      placed_any = true;
    }
    if (placed_any) ++report.tweets_placed;
  }
  return report;
}

void save_jars(const std::string& path, const JarGrid& jars) {
  std::string out = "date,city,event,indicative_count,evidence_ids\n";
  for (const auto& [key, jar] : jars) {
    std::string evidence;
    for (std::size_t i = 0; i < jar.evidence.size(); ++i) {
      if (i) evidence += ';';
      evidence += jar.evidence[i];
    }
    out += csv::join_row({key.date.to_string(), key.city, jar.event ? "1" : "0",
                          csv::format_int(jar.indicative_count), evidence});
    out += '\n';
  }
  write_text_file(path, out);
}

JarGrid load_jars(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw ParseError(path + ": missing header row");
  const std::vector<std::string> want = {"date", "city", "event", "indicative_count",
                                         "evidence_ids"};
  if (rows.front().fields != want) {
    throw ParseError(where(path, rows.front().line) +
                     ": expected header date,city,event,indicative_count,evidence_ids");
  }
  JarGrid grid;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != want.size()) {
      throw ParseError(where(path, row.line) + ": expected " + std::to_string(want.size()) +
                       " fields");
    }
    Jar jar;
    const auto date = Date::parse_iso(row.fields[0]);
    if (!date) throw ParseError(where(path, row.line) + ": bad date '" + row.fields[0] + "'");
    jar.key = JarKey{*date, row.fields[1]};
    if (!parse_binary_flag(row.fields[2], jar.event)) {
      throw ParseError(where(path, row.line) + ": event must be 0 or 1");
    }
    try {
      jar.indicative_count = std::stoll(row.fields[3]);
    } catch (const std::exception&) {
      throw ParseError(where(path, row.line) + ": bad indicative_count '" + row.fields[3] + "'");
    }
    if (jar.indicative_count < 0) {
      throw ValidationError(where(path, row.line) + ": negative indicative_count");
    }
    if (!row.fields[4].empty()) {
      std::istringstream ids(row.fields[4]);
      std::string id;
      while (std::getline(ids, id, ';')) jar.evidence.push_back(id);
    }
    if (static_cast<std::int64_t>(jar.evidence.size()) != jar.indicative_count) {
      throw ValidationError(where(path, row.line) + ": indicative_count " +
                            std::to_string(jar.indicative_count) + " != evidence size " +
                            std::to_string(jar.evidence.size()));
    }
    const JarKey key = jar.key;
    if (!grid.emplace(key, std::move(jar)).second) {
      throw ValidationError(where(path, row.line) + ": duplicate jar key");
    }
  }
  return grid;
}

}  // namespace pachinko
