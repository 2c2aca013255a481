#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "d2t/data/record.hpp"

namespace d2t::data {

struct SynthOptions {
  std::uint64_t seed = 1;
  std::size_t n_games = 8;  // train split
  std::size_t n_dev = 0;
  std::size_t n_test = 0;
  std::size_t n_entities = 8;  // two teams plus players
  std::size_t n_types = 4;     // stat types per player (clamped to the type list)
  RecordSchema schema;
  // Players at or above this primary stat are verbalized.
  int mention_threshold = 14;
};

// rw4 games: two single-token teams and n_entities - 2 players with unique
// surnames, split between the teams. Player rows carry FIRST_NAME,
// SECOND_NAME and the first n_types of PTS REB AST STL BLK TO PF MIN; team
// rows carry TEAM-NAME TEAM-PTS TEAM-WINS TEAM-LOSSES.
//
// Summary grammar (rw4):
//   The <W> ( <pts> points ) defeated the <L> ( <pts> points ) .
//   then, for each player with PTS >= threshold in record order:
//   <First Last> scored <pts> points .
//   <Last> added <v> <kw> [and <v> <kw>] .        (extra stats >= 5, MIN excluded)
//
// mlb6 games: the first player of each team is a pitcher (IP P-H P-R P-BB
// P-SO), the rest are batters (AB R H RBI), plus play events
// "<event>-batter" with value "-1", an inning and a play index. The summary
// has the team result, the winning pitcher line, batters with H >= 2, and
// one sentence per play with the inning as an ordinal word.
//
// Names use full form on first mention and surname afterwards. Ids are
// "synth-<seed>-<n>" and unique across splits.
Dataset synth_games(const SynthOptions& options);
Dataset synth_games(std::uint64_t seed, std::size_t n_games, std::size_t n_entities,
                    std::size_t n_types, RecordSchema schema = {});

}  // namespace d2t::data
