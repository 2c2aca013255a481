#pragma once

#include <string>
#include <vector>

namespace d2t::data {

// Word that follows a value of this record type in text ("points" for PTS
// and TEAM-PTS), or "" when the type has none.
const std::string& stat_keyword(const std::string& type);

// Record types a stat word can denote, in fixed order; empty if none.
const std::vector<std::string>& keyword_types(const std::string& word);

// Play-event verb -> valueless event type ("homered" -> "home-run-batter").
const std::string& event_type(const std::string& word);
// Inverse of event_type, or "" for non-event types.
const std::string& event_word(const std::string& type);

// "first" ... "twelfth"; out-of-range innings give "extra".
const std::string& ordinal_word(int n);

}  // namespace d2t::data
