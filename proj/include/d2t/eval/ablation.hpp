#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "d2t/data/record.hpp"
#include "d2t/eval/metrics.hpp"
#include "d2t/model/config.hpp"
#include "d2t/model/training.hpp"

namespace d2t::eval {

struct AblationOptions {
  model::ModelConfig model;  // mode is overridden per row
  model::TrainConfig train;
  std::size_t min_count = 1;  // vocabulary cutoff over the train split
  std::size_t beam = 1;       // 1 = greedy
  std::size_t max_len = 850;
  std::vector<model::Mode> modes = {model::Mode::edcc, model::Mode::hier, model::Mode::dyn,
                                    model::Mode::gate};
  // When set, each mode trains into <out_dir>/<mode name> and saves its
  // model under model/ there.
  std::filesystem::path out_dir;
};

struct AblationRow {
  model::Mode mode;
  std::vector<std::string> parameter_names;  // sorted
  std::size_t parameter_scalars = 0;
  model::TrainResult training;
  EvalReport report;
  std::vector<std::vector<std::string>> generations;  // one per evaluated game
};

// Parameters a mode adds over the previous rung of the ladder.
std::vector<std::string> added_parameters(model::Mode mode);

// Trains every mode from the same seed and vocabulary, then decodes and scores
// eval_games. Rows come back in options.modes order.
std::vector<AblationRow> run_ablation(const data::Dataset& dataset,
                                      const std::vector<data::GameInstance>& eval_games,
                                      const AblationOptions& options);

// format_table over the rows, labelled ED+CC, +Hier, +Dyn, +Gate.
std::string format_ablation(const std::vector<AblationRow>& rows);

}  // namespace d2t::eval
