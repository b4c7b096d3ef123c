#include <algorithm>
#include <set>

#include <doctest.h>

#include "pachinko/rng.hpp"
#include "pachinko/temporal.hpp"

using namespace pachinko;

namespace {

Timestamp at(const std::string& iso) { return *Timestamp::parse_iso(iso); }

std::vector<std::string> resolved_dates(const std::string& text, const std::string& authored) {
  std::set<std::string> dates;
  for (const auto& m : resolve_temporal(text, at(authored))) {
    dates.insert(m.resolved.to_string());
  }
  return {dates.begin(), dates.end()};
}

const std::string kTue = "2018-01-02T09:00:00+11:00";  // a Tuesday

}  // namespace

TEST_SUITE("temporal") {
  TEST_CASE("the worked example: tomorrow resolves across the day boundary") {
    const auto mentions =
        resolve_temporal("Let's protest tomorrow at the University of Melbourne", at(kTue));
    REQUIRE(mentions.size() == 1);
    CHECK(mentions[0].resolved.to_string() == "2018-01-03");
    CHECK(mentions[0].kind == MentionKind::relative_day);
  }

  TEST_CASE("past references are dropped, never stored") {
    CHECK(resolved_dates("we marched yesterday", kTue).empty());
    CHECK(resolved_dates("rally on 2017-12-31", kTue).empty());
    CHECK(resolved_dates("this monday was wild", kTue).empty());  // Mon Jan 1 already past
  }

  TEST_CASE("same-day references count as future-referencing") {
    CHECK(resolved_dates("rally today", kTue) == std::vector<std::string>{"2018-01-02"});
    CHECK(resolved_dates("big one tonight", kTue) == std::vector<std::string>{"2018-01-02"});
    CHECK(resolved_dates("this tuesday it begins", kTue) ==
          std::vector<std::string>{"2018-01-02"});
  }

  TEST_CASE("weekday semantics") {
    // bare weekday: next occurrence strictly after the authored date
    CHECK(resolved_dates("friday", kTue) == std::vector<std::string>{"2018-01-05"});
    CHECK(resolved_dates("monday", kTue) == std::vector<std::string>{"2018-01-08"});
    CHECK(resolved_dates("tuesday", kTue) == std::vector<std::string>{"2018-01-09"});
    // next <weekday>: same rule
    CHECK(resolved_dates("next friday", kTue) == std::vector<std::string>{"2018-01-05"});
    CHECK(resolved_dates("next tuesday", kTue) == std::vector<std::string>{"2018-01-09"});
    // this <weekday>: inside the current Mon-Sun week only
    CHECK(resolved_dates("this friday", kTue) == std::vector<std::string>{"2018-01-05"});
    CHECK(resolved_dates("this sunday", kTue) == std::vector<std::string>{"2018-01-07"});
  }

  TEST_CASE("next week is authored plus seven days") {
    CHECK(resolved_dates("see you next week", kTue) == std::vector<std::string>{"2018-01-09"});
  }

  TEST_CASE("explicit and numeric dates, day-first") {
    const std::string jan10 = "2018-01-10T08:00:00+11:00";
    CHECK(resolved_dates("rally on 14 February", jan10) ==
          std::vector<std::string>{"2018-02-14"});
    CHECK(resolved_dates("rally on 14/02", jan10) == std::vector<std::string>{"2018-02-14"});
    CHECK(resolved_dates("rally on 14/02/18", jan10) == std::vector<std::string>{"2018-02-14"});
    CHECK(resolved_dates("rally on 14/02/2018", jan10) == std::vector<std::string>{"2018-02-14"});
    CHECK(resolved_dates("rally on 2018-02-14", jan10) == std::vector<std::string>{"2018-02-14"});
    // month-first numeral would be 02/14: month 14 is invalid, so no mention
    CHECK(resolved_dates("rally on 02/14", jan10).empty());
  }

  TEST_CASE("yearless month-day rolls forward to the next occurrence") {
    CHECK(resolved_dates("January 3rd protest", kTue) ==
          std::vector<std::string>{"2018-01-03"});
    CHECK(resolved_dates("3 January it happens", "2018-01-04T09:00:00+11:00") ==
          std::vector<std::string>{"2019-01-03"});
    // Feb 29 skips to the next leap year
    CHECK(resolved_dates("meet on 29 February", "2018-03-01T09:00:00+11:00") ==
          std::vector<std::string>{"2020-02-29"});
  }

  TEST_CASE("ordinals and 'of' forms") {
    CHECK(resolved_dates("3rd of January protest", kTue) ==
          std::vector<std::string>{"2018-01-03"});
    CHECK(resolved_dates("party on the 21st of August", kTue) ==
          std::vector<std::string>{"2018-08-21"});
  }

  TEST_CASE("invalid calendar combinations produce nothing") {
    CHECK(resolved_dates("31 April party", kTue).empty());
    CHECK(resolved_dates("rally on 32/01", kTue).empty());
  }

  TEST_CASE("multiple mentions in one text") {
    CHECK(resolved_dates("tomorrow and friday double header", kTue) ==
          std::vector<std::string>{"2018-01-03", "2018-01-05"});
  }

  TEST_CASE("spans cover the matched tokens") {
    const std::string text = "protest next friday downtown";
    const auto mentions = resolve_temporal(text, at(kTue));
    REQUIRE(mentions.size() == 1);
    CHECK(text.substr(mentions[0].begin, mentions[0].end - mentions[0].begin) == "next friday");
    CHECK(mentions[0].kind == MentionKind::weekday);
  }

  TEST_CASE("year boundary") {
    CHECK(resolved_dates("protest tomorrow", "2017-12-31T23:00:00+11:00") ==
          std::vector<std::string>{"2018-01-01"});
  }

  TEST_CASE("resolution is pure") {
    const std::string text = "tomorrow and 14 February and friday";
    const auto a = resolve_temporal(text, at(kTue));
    const auto b = resolve_temporal(text, at(kTue));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].begin == b[i].begin);
      CHECK(a[i].resolved == b[i].resolved);
    }
  }

  TEST_CASE("property: no resolution ever precedes the authored date") {
    // Random phrases over the grammar, random authored dates.
    Rng rng(77);
    const std::vector<std::string> snippets = {
        "today",     "tonight",    "tomorrow",     "next week", "this friday", "next monday",
        "wednesday", "14/02",      "31/12",        "1/1",       "5 March",     "March 5",
        "Feb 29",    "2018-06-01", "2017-01-01",   "yesterday", "12th of May", "May 12 2018",
        "sometime",  "the 3rd of June 2019",       "40/40",     "0/0",
    };
    for (int iter = 0; iter < 2000; ++iter) {
      std::string text;
      const int words = 1 + static_cast<int>(rng.below(4));
      for (int w = 0; w < words; ++w) {
        if (w) text += " and ";
        text += snippets[rng.below(snippets.size())];
      }
      const Date base = Date(2017, 1, 1).plus_days(static_cast<int>(rng.below(800)));
      const Timestamp ts = at(base.to_string() + "T12:00:00+10:00");
      for (const auto& m : resolve_temporal(text, ts)) {
        CHECK(m.resolved >= ts.local_date);
      }
    }
  }
}
