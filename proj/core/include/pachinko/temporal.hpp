#pragma once

#include <string_view>
#include <vector>

#include "pachinko/date.hpp"

namespace pachinko {

enum class MentionKind { relative_day, relative_week, weekday, explicit_date, month_day };

// One resolved time reference found in tweet text. `begin`/`end` are byte
// offsets of the matched span. `resolved` is never before the authoring
// date: past references are discarded during scanning, not stored.
struct TemporalMention {
  std::size_t begin = 0;
  std::size_t end = 0;
  MentionKind kind = MentionKind::relative_day;
  Date resolved;
};

// Rule-based scanner over the supported grammar:
//   today / tonight / tomorrow
//   next week                       (authored date + 7)
//   this <weekday>                  (same Mon-Sun week, empty if already past)
//   next <weekday>, bare weekdays   (first occurrence strictly after)
//   ISO dates, day-first d/m[/y]
//   "14 February", "Feb 14", "January 3rd", "14th of February", with an
//   optional year; yearless forms roll forward to the next occurrence on or
//   after the authoring date
// Pure: identical (text, authored) always yields identical mentions.
std::vector<TemporalMention> resolve_temporal(std::string_view text, const Timestamp& authored);

std::string_view to_string(MentionKind kind);

}  // namespace pachinko
