#include "d2t/eval/ablation.hpp"

#include <algorithm>

#include "d2t/data/vocab.hpp"
#include "d2t/errors.hpp"
#include "d2t/model/decoder.hpp"
#include "d2t/model/model.hpp"

namespace d2t::eval {

std::vector<std::string> added_parameters(model::Mode mode) {
  switch (mode) {
    case model::Mode::edcc: return {};
    case model::Mode::hier: return {"W_h", "W_i"};
    case model::Mode::dyn: return {"W_e", "W_f", "W_g", "b_e", "b_f"};
    case model::Mode::gate: return {"W_d", "b_d"};
  }
  return {};
}

std::vector<AblationRow> run_ablation(const data::Dataset& dataset,
                                      const std::vector<data::GameInstance>& eval_games,
                                      const AblationOptions& options) {
  if (eval_games.empty()) throw UsageError("ablation needs at least one game to evaluate");
  if (options.beam == 0) throw UsageError("beam must be positive");
  const data::Vocabularies vocab = data::build_vocab(dataset, options.min_count);

  std::vector<std::vector<std::string>> golds;
  std::vector<std::vector<data::Record>> tables;
  for (const auto& g : eval_games) {
    golds.push_back(g.summary);
    tables.push_back(g.records);
  }

  std::vector<AblationRow> rows;
  for (model::Mode mode : options.modes) {
    model::ModelConfig config = options.model;
    config.mode = mode;
    model::Model m = model::make_model(config, vocab, options.train.seed);

    AblationRow row{mode, m.params.names(), m.params.scalar_count(), {}, {}, {}};
    std::sort(row.parameter_names.begin(), row.parameter_names.end());
    const auto dir = options.out_dir.empty() ? options.out_dir : options.out_dir / model::mode_name(mode);
    row.training = model::train(m, dataset, options.train, dir);
    if (!dir.empty()) model::save_model(dir / "model", m);

    model::SearchOptions search;
    search.beam = options.beam;
    search.max_len = options.max_len;
    for (const auto& g : eval_games) {
      model::Session session(m, g.records);
      const auto best = options.beam == 1 ? model::greedy_decode(session, options.max_len)
                                          : model::beam_search(session, search).front();
      row.generations.push_back(model::hypothesis_tokens(session, best));
    }
    row.report = evaluate_corpus(row.generations, golds, tables);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_ablation(const std::vector<AblationRow>& rows) {
  std::vector<std::pair<std::string, EvalReport>> named;
  for (const auto& r : rows) named.emplace_back(model::mode_label(r.mode), r.report);
  return format_table(named);
}

}  // namespace d2t::eval
