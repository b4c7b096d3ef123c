#include "pachinko/temporal.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <optional>
#include <string>

namespace pachinko {

namespace {

struct Token {
  std::string text;  // lowercased
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool is_token_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '/' || c == '-';
}

// Tokens are maximal runs of [alnum / -], trimmed of leading/trailing
// punctuation so "2018-01-03" and "14/02" survive as single tokens.
std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_token_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_token_char(text[j])) ++j;
    std::size_t b = i, e = j;
    while (b < e && !std::isalnum(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(text[e - 1]))) --e;
    if (b < e) {
      Token t;
      t.begin = b;
      t.end = e;
      t.text.reserve(e - b);
      for (std::size_t k = b; k < e; ++k) {
        t.text.push_back(
            static_cast<char>(std::tolower(static_cast<unsigned char>(text[k]))));
      }
      tokens.push_back(std::move(t));
    }
    i = j;
  }
  return tokens;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

// "3", "3rd", "21st", ... -> day of month.
std::optional<int> parse_day_number(std::string_view s) {
  std::size_t digits = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
  if (digits == 0 || digits > 2) return std::nullopt;
  const std::string_view suffix = s.substr(digits);
  if (!suffix.empty() && suffix != "st" && suffix != "nd" && suffix != "rd" && suffix != "th") {
    return std::nullopt;
  }
  const int day = to_int(s.substr(0, digits));
  if (day < 1 || day > 31) return std::nullopt;
  return day;
}

std::optional<unsigned> month_from_word(std::string_view s) {
  static constexpr std::array<std::string_view, 12> kFull = {
      "january", "february", "march",     "april",   "may",      "june",
      "july",    "august",   "september", "october", "november", "december"};
  static constexpr std::array<std::string_view, 12> kAbbr = {
      "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
  for (unsigned m = 0; m < 12; ++m) {
    if (s == kFull[m] || s == kAbbr[m]) return m + 1;
  }
  if (s == "sept") return 9;
  return std::nullopt;
}

std::optional<unsigned> weekday_from_word(std::string_view s) {
  for (unsigned wd = 0; wd < 7; ++wd) {
    if (s == weekday_name(wd)) return wd;
  }
  return std::nullopt;
}

std::optional<int> parse_year(std::string_view s) {
  if (!all_digits(s)) return std::nullopt;
  if (s.size() == 4) return to_int(s);
  if (s.size() == 2) return 2000 + to_int(s);
  return std::nullopt;
}

// Next calendar occurrence of (month, day) on or after `from`. Skips years
// where the combination is invalid (Feb 29).
std::optional<Date> next_occurrence(unsigned month, unsigned day, Date from) {
  for (int y = from.year(); y <= from.year() + 8; ++y) {
    if (!Date::valid_ymd(y, month, day)) continue;
    const Date candidate(y, month, day);
    if (candidate >= from) return candidate;
  }
  return std::nullopt;
}

struct Match {
  std::size_t consumed = 0;
  MentionKind kind = MentionKind::relative_day;
  std::optional<Date> resolved;  // empty: valid syntax but past/unresolvable
};

// yyyy-mm-dd
std::optional<Match> match_iso(const Token& tok, Date authored) {
  const std::string& s = tok.text;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  const auto date = Date::parse_iso(s);
  if (!date) return std::nullopt;
  Match m{1, MentionKind::explicit_date, std::nullopt};
  if (*date >= authored) m.resolved = *date;
  return m;
}

// d/m or d/m/y, day-first.
std::optional<Match> match_slash_date(const Token& tok, Date authored) {
  const std::string& s = tok.text;
  std::array<std::string_view, 3> parts{};
  std::size_t count = 0, start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '/') {
      if (count == 3) return std::nullopt;
      parts[count++] = std::string_view(s).substr(start, i - start);
      start = i + 1;
    }
  }
  if (count < 2 || !all_digits(parts[0]) || !all_digits(parts[1])) return std::nullopt;
  if (parts[0].size() > 2 || parts[1].size() > 2) return std::nullopt;
  const int day = to_int(parts[0]);
  const int month = to_int(parts[1]);
  if (day < 1 || day > 31 || month < 1 || month > 12) return std::nullopt;

  if (count == 3) {
    const auto year = parse_year(parts[2]);
    if (!year || !Date::valid_ymd(*year, month, day)) return std::nullopt;
    Match m{1, MentionKind::explicit_date, std::nullopt};
    const Date date(*year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    if (date >= authored) m.resolved = date;
    return m;
  }
  Match m{1, MentionKind::month_day,
          next_occurrence(static_cast<unsigned>(month), static_cast<unsigned>(day), authored)};
  return m;
}

}  // namespace

std::string_view to_string(MentionKind kind) {
  switch (kind) {
    case MentionKind::relative_day: return "relative_day";
    case MentionKind::relative_week: return "relative_week";
    case MentionKind::weekday: return "weekday";
    case MentionKind::explicit_date: return "explicit_date";
    case MentionKind::month_day: return "month_day";
  }
  return "?";
}

std::vector<TemporalMention> resolve_temporal(std::string_view text, const Timestamp& authored) {
  const Date today = authored.local_date;
  const std::vector<Token> tokens = tokenize(text);
  std::vector<TemporalMention> mentions;

  // Tries each pattern at position i; returns the match and how many tokens
  // it consumed. Longer patterns are attempted before their prefixes so that
  // "next friday" wins over bare "friday".
  auto try_match = [&](std::size_t i) -> std::optional<Match> {
    const Token& tok = tokens[i];
    const bool has1 = i + 1 < tokens.size();
    const bool has2 = i + 2 < tokens.size();

    if (auto m = match_iso(tok, today)) return m;
    if (auto m = match_slash_date(tok, today)) return m;

    if (tok.text == "today" || tok.text == "tonight") {
      return Match{1, MentionKind::relative_day, today};
    }
    if (tok.text == "tomorrow") {
      return Match{1, MentionKind::relative_day, today.plus_days(1)};
    }
    if (tok.text == "next" && has1 && tokens[i + 1].text == "week") {
      return Match{2, MentionKind::relative_week, today.plus_days(7)};
    }
    if ((tok.text == "next" || tok.text == "this") && has1) {
      if (const auto wd = weekday_from_word(tokens[i + 1].text)) {
        if (tok.text == "next") {
          const int delta = static_cast<int>((*wd + 7 - today.weekday_mon0() - 1) % 7) + 1;
          return Match{2, MentionKind::weekday, today.plus_days(delta)};
        }
        // "this <weekday>": within the current Mon-Sun week, or nothing.
        const Date monday = today.plus_days(-static_cast<int>(today.weekday_mon0()));
        const Date target = monday.plus_days(static_cast<int>(*wd));
        Match m{2, MentionKind::weekday, std::nullopt};
        if (target >= today) m.resolved = target;
        return m;
      }
    }
    if (const auto wd = weekday_from_word(tok.text)) {
      const int delta = static_cast<int>((*wd + 7 - today.weekday_mon0() - 1) % 7) + 1;
      return Match{1, MentionKind::weekday, today.plus_days(delta)};
    }

    // <month> <day> [<year>]
    if (const auto month = month_from_word(tok.text); month && has1) {
      if (const auto day = parse_day_number(tokens[i + 1].text)) {
        std::optional<int> year;
        std::size_t consumed = 2;
        if (has2) {
          if (const auto y = parse_year(tokens[i + 2].text);
              y && tokens[i + 2].text.size() == 4) {
            year = y;
            consumed = 3;
          }
        }
        if (year) {
          if (Date::valid_ymd(*year, *month, static_cast<unsigned>(*day))) {
            const Date date(*year, *month, static_cast<unsigned>(*day));
            Match m{consumed, MentionKind::explicit_date, std::nullopt};
            if (date >= today) m.resolved = date;
            return m;
          }
          return std::nullopt;
        }
        return Match{2, MentionKind::month_day,
                     next_occurrence(*month, static_cast<unsigned>(*day), today)};
      }
    }

    // <day> [of] <month> [<year>]
    if (const auto day = parse_day_number(tok.text); day && has1) {
      std::size_t mi = i + 1;
      if (tokens[mi].text == "of" && has2) ++mi;
      if (const auto month = month_from_word(tokens[mi].text)) {
        std::size_t consumed = mi - i + 1;
        std::optional<int> year;
        const std::size_t yi = mi + 1;
        if (yi < tokens.size()) {
          if (const auto y = parse_year(tokens[yi].text); y && tokens[yi].text.size() == 4) {
            year = y;
            consumed = yi - i + 1;
          }
        }
        if (year) {
          if (Date::valid_ymd(*year, *month, static_cast<unsigned>(*day))) {
            const Date date(*year, *month, static_cast<unsigned>(*day));
            Match m{consumed, MentionKind::explicit_date, std::nullopt};
            if (date >= today) m.resolved = date;
            return m;
          }
          return std::nullopt;
        }
        return Match{mi - i + 1, MentionKind::month_day,
                     next_occurrence(*month, static_cast<unsigned>(*day), today)};
      }
    }

    return std::nullopt;
  };

  std::size_t i = 0;
  while (i < tokens.size()) {
    const auto match = try_match(i);
    if (!match) {
      ++i;
      continue;
    }
    if (match->resolved) {
      TemporalMention mention;
      mention.begin = tokens[i].begin;
      mention.end = tokens[i + match->consumed - 1].end;
      mention.kind = match->kind;
      mention.resolved = *match->resolved;
      mentions.push_back(mention);
    }
    i += match->consumed;
  }
  return mentions;
}

}  // namespace pachinko
