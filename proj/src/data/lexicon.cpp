#include "d2t/data/lexicon.hpp"

#include <map>
#include <utility>

namespace d2t::data {
namespace {

const std::vector<std::pair<std::string, std::vector<std::string>>>& stat_table() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> table = {
      {"points", {"PTS", "TEAM-PTS"}},
      {"rebounds", {"REB", "TEAM-REB"}},
      {"assists", {"AST", "TEAM-AST"}},
      {"steals", {"STL"}},
      {"blocks", {"BLK"}},
      {"turnovers", {"TO", "TEAM-TOV"}},
      {"fouls", {"PF"}},
      {"minutes", {"MIN"}},
      {"threes", {"FG3M", "TEAM-FG3M"}},
      {"hits", {"H", "P-H", "TEAM-H"}},
      {"runs", {"R", "P-R", "TEAM-R"}},
      {"innings", {"IP"}},
      {"walks", {"BB", "P-BB"}},
      {"strikeouts", {"SO", "P-SO"}},
      {"RBI", {"RBI"}},
      {"errors", {"TEAM-E"}},
      {"wins", {"TEAM-WINS"}},
      {"losses", {"TEAM-LOSSES"}},
  };
  return table;
}

const std::vector<std::pair<std::string, std::string>>& event_table() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"homered", "home-run-batter"}, {"singled", "single-batter"},
      {"doubled", "double-batter"},   {"tripled", "triple-batter"},
      {"walked", "walk-batter"},
  };
  return table;
}

const std::string kEmpty;

}  // namespace

const std::string& stat_keyword(const std::string& type) {
  static const std::map<std::string, std::string> by_type = [] {
    std::map<std::string, std::string> m;
    for (const auto& [word, types] : stat_table()) {
      for (const std::string& t : types) m.emplace(t, word);
    }
    return m;
  }();
  auto it = by_type.find(type);
  return it == by_type.end() ? kEmpty : it->second;
}

const std::vector<std::string>& keyword_types(const std::string& word) {
  static const std::vector<std::string> none;
  for (const auto& [w, types] : stat_table()) {
    if (w == word) return types;
  }
  return none;
}

const std::string& event_type(const std::string& word) {
  for (const auto& [w, type] : event_table()) {
    if (w == word) return type;
  }
  return kEmpty;
}

const std::string& event_word(const std::string& type) {
  for (const auto& [w, t] : event_table()) {
    if (t == type) return w;
  }
  return kEmpty;
}

const std::string& ordinal_word(int n) {
  static const std::vector<std::string> words = {
      "first", "second", "third", "fourth",  "fifth",    "sixth",
      "seventh", "eighth", "ninth", "tenth", "eleventh", "twelfth"};
  static const std::string extra = "extra";
  return n >= 1 && n <= static_cast<int>(words.size()) ? words[n - 1] : extra;
}

}  // namespace d2t::data
