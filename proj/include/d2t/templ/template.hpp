#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "d2t/data/record.hpp"

namespace d2t::templ {

// Keyed sentence frames in file order.
class Frames {
 public:
  // Frames compiled in from resources/templates.txt.
  static const Frames& builtin();
  // Throws DataError on a line without a frame or on an unclosed slot.
  static Frames parse(std::istream& in);

  // Frames stored under this key, in file order.
  std::vector<std::string> lookup(const std::string& key) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct TemplateOptions {
  std::size_t top_k = 6;  // rw4 players verbalized, ranked by points
};

// Deterministic summary built only from table values, so every number it
// states is supported by a record.
//
// rw4: opening with both teams and scores, then the top_k players by PTS.
// mlb6: opening, a line per pitcher (winning side first), then one sentence
// per play event ordered by inning and play index.
//
// Teams are entities owning a TEAM-* record. Throws DataError when the table
// has fewer than two teams or a team lacks a numeric score.
std::vector<std::string> generate_template(const std::vector<data::Record>& table,
                                           const data::RecordSchema& schema,
                                           const TemplateOptions& options = {},
                                           const Frames& frames = Frames::builtin());

}  // namespace d2t::templ
