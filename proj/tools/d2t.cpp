// d2t: command-line driver for dataset preparation, training, decoding and
// evaluation. Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "d2t/data/io.hpp"
#include "d2t/data/synth.hpp"
#include "d2t/data/vocab.hpp"
#include "d2t/errors.hpp"
#include "d2t/eval/ablation.hpp"
#include "d2t/eval/metrics.hpp"
#include "d2t/model/decoder.hpp"
#include "d2t/model/gradient_audit.hpp"
#include "d2t/model/model.hpp"
#include "d2t/model/training.hpp"
#include "d2t/templ/template.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace d2t;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

// ---------------------------------------------------------------- config

// Reads key=value lines; '#' starts a comment line.
std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

// Expands "--config FILE" into flags placed ahead of the explicit ones so
// that explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::vector<std::string> from_file, rest;
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    for (const auto& [key, value] : read_config(path)) from_file.push_back("--" + key + "=" + value);
  }
  // Config flags belong to the subcommand, which is the first argument.
  std::vector<std::string> out{args[0]};
  if (!rest.empty()) out.push_back(rest.front());
  out.insert(out.end(), from_file.begin(), from_file.end());
  if (!rest.empty()) out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

// Every option of the subcommand with its final value, as key=value lines
// accepted back by --config.
void write_resolved(const CLI::App& sub, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / "config.resolved");
  out << "# " << sub.get_name() << "\n";
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name.rfind("help", 0) == 0 || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      value = results.back();
    } else {
      value = opt->get_default_str();
    }
    if (opt->get_type_size() == 0) {
      // Flags are written as booleans.
      value = opt->count() > 0 ? "true" : "false";
    }
    out << name << "=" << value << "\n";
  }
}

// ---------------------------------------------------------------- options

struct ModelFlags {
  std::size_t n = 600, p = 300, word_dim = 600, feature_dim = 0, layers = 2;
  std::string mode = "gate", encoder = "flat";
  double init_scale = 0.1;
};

struct TrainFlags {
  model::TrainConfig config;
  std::size_t min_count = 1;
};

void add_model_flags(CLI::App* app, ModelFlags& f) {
  app->add_option("--n", f.n, "record and hidden size")->capture_default_str();
  app->add_option("--p", f.p, "entity memory size")->capture_default_str();
  app->add_option("--word-dim", f.word_dim, "decoder word embedding size")->capture_default_str();
  app->add_option("--feature-dim", f.feature_dim, "per-feature embedding size, 0 = n / L")
      ->capture_default_str();
  app->add_option("--layers", f.layers, "decoder LSTM layers")->capture_default_str();
  app->add_option("--mode", f.mode, "edcc | hier | dyn | gate")->capture_default_str();
  app->add_option("--encoder", f.encoder, "flat | sequential")->capture_default_str();
  app->add_option("--init-scale", f.init_scale, "uniform init range")->capture_default_str();
}

void add_train_flags(CLI::App* app, TrainFlags& f) {
  auto& c = f.config;
  app->add_option("--lr", c.learning_rate, "Adagrad learning rate")->capture_default_str();
  app->add_option("--decay", c.decay, "per-epoch learning-rate decay")->capture_default_str();
  app->add_option("--decay-after", c.decay_after, "epochs before decay starts")
      ->capture_default_str();
  app->add_option("--epochs", c.epochs, "training epochs")->capture_default_str();
  app->add_option("--window", c.window, "truncated BPTT window")->capture_default_str();
  app->add_option("--batch", c.batch_size, "instances per update")->capture_default_str();
  app->add_option("--dropout", c.dropout, "dropout rate")->capture_default_str();
  app->add_option("--seed", c.seed, "initialization, order and dropout seed")
      ->capture_default_str();
  app->add_option("--adagrad-init", c.accumulator_init, "initial Adagrad accumulator")
      ->capture_default_str();
  app->add_option("--min-count", f.min_count, "vocabulary count cutoff")->capture_default_str();
}

model::ModelConfig model_config(const ModelFlags& m, const TrainFlags& t) {
  model::ModelConfig c;
  c.n = m.n;
  c.p = m.p;
  c.word_dim = m.word_dim;
  c.feature_dim = m.feature_dim;
  c.layers = m.layers;
  c.mode = model::parse_mode(m.mode);
  c.encoder = model::parse_encoder(m.encoder);
  c.init_scale = m.init_scale;
  c.dropout = t.config.dropout;
  return c;
}

// ---------------------------------------------------------------- io helpers

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

const std::vector<data::GameInstance>& pick_split(const data::Dataset& d, const std::string& split) {
  const std::vector<data::GameInstance>* games = nullptr;
  if (split == "train") games = &d.train;
  else if (split == "dev") games = &d.dev;
  else if (split == "test") games = &d.test;
  else throw UsageError("unknown split '" + split + "'");
  if (games->empty()) throw DataError("split '" + split + "' is empty");
  return *games;
}

// Schema of a native JSONL file from the arity of its first record.
data::RecordSchema sniff_schema(const fs::path& path, const std::string& name) {
  if (name != "auto") return data::RecordSchema::parse(name);
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON in " + path.string());
    if (j.contains("records") && !j["records"].empty())
      return data::RecordSchema{j["records"][0].size() == 6 ? data::SchemaKind::mlb6
                                                            : data::SchemaKind::rw4};
  }
  return {};
}

std::string generation_line(const std::string& id, const std::vector<std::string>& tokens) {
  json j;
  j["id"] = id;
  j["tokens"] = tokens;
  return j.dump() + "\n";
}

std::map<std::string, std::vector<std::string>> read_generations(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("id") || !j.contains("tokens"))
      throw DataError(path.string() + ":" + std::to_string(number) + ": expected {id, tokens}");
    out[j["id"].get<std::string>()] = j["tokens"].get<std::vector<std::string>>();
  }
  return out;
}

json train_json(const model::TrainResult& r) {
  json j;
  j["best_epoch"] = r.best_epoch;
  j["best_dev_ppl"] = std::isfinite(r.best_dev_ppl) ? json(r.best_dev_ppl) : json(nullptr);
  json epochs = json::array();
  for (const auto& e : r.epochs) {
    json row;
    row["epoch"] = e.epoch;
    row["train_loss"] = e.train_loss;
    row["dev_ppl"] = std::isfinite(e.dev_ppl) ? json(e.dev_ppl) : json(nullptr);
    row["lr"] = e.lr;
    epochs.push_back(row);
  }
  j["epochs"] = epochs;
  return j;
}

json attention_line(const std::string& id, std::size_t step, const std::string& token,
                    const model::StepResult& r) {
  json j;
  j["id"] = id;
  j["step"] = step;
  j["token"] = token;
  j["alpha"] = r.record_weights;
  if (!r.entity_weights.empty()) j["psi"] = r.entity_weights;
  if (!r.gamma.empty()) j["gamma"] = r.gamma;
  return j;
}

// Re-runs the chosen hypothesis step by step to recover its attention.
void dump_attention(std::ostream& out, const std::string& id, const model::Session& session,
                    const model::Hypothesis& hyp) {
  model::DecoderState state = session.initial();
  std::size_t prev = data::Vocabulary::kBegin;
  for (std::size_t t = 0; t < hyp.ids.size(); ++t) {
    model::StepResult r = session.step(state, prev);
    out << attention_line(id, t, session.token(hyp.ids[t]), r).dump() << "\n";
    state = std::move(r.state);
    prev = hyp.ids[t];
  }
}

// ---------------------------------------------------------------- commands

struct SynthArgs {
  data::SynthOptions options;
  std::string schema = "rw4";
  fs::path out;
};

int run_synth(const CLI::App& sub, SynthArgs& a) {
  a.options.schema = data::RecordSchema::parse(a.schema);
  const data::Dataset d = data::synth_games(a.options);
  data::save_dataset(a.out, d);
  write_resolved(sub, a.out);
  std::cout << "wrote " << d.train.size() << "/" << d.dev.size() << "/" << d.test.size()
            << " games to " << a.out.string() << "\n";
  return kOk;
}

struct IngestArgs {
  fs::path train, dev, test, out;
  std::string schema = "rw4";
  std::size_t min_count = 2;
  std::uint64_t seed = 1;
  std::size_t dev_count = 0, test_count = 0;
};

int run_ingest(const CLI::App& sub, IngestArgs& a) {
  data::Dataset d;
  d.schema = data::RecordSchema::parse(a.schema);
  d.train = data::load_rotowire_json(a.train, d.schema);
  if (!a.dev.empty()) d.dev = data::load_rotowire_json(a.dev, d.schema);
  if (!a.test.empty()) d.test = data::load_rotowire_json(a.test, d.schema);
  if (a.dev_count + a.test_count > 0) {
    if (!a.dev.empty() || !a.test.empty())
      throw UsageError("--dev-count/--test-count carve splits only without --dev/--test files");
    if (a.dev_count + a.test_count > d.train.size())
      throw DataError("not enough games to carve the requested splits");
    std::mt19937_64 rng(a.seed);
    std::shuffle(d.train.begin(), d.train.end(), rng);
    d.dev.assign(d.train.begin(), d.train.begin() + a.dev_count);
    d.test.assign(d.train.begin() + a.dev_count, d.train.begin() + a.dev_count + a.test_count);
    d.train.erase(d.train.begin(), d.train.begin() + a.dev_count + a.test_count);
  }
  data::validate_disjoint(d);
  data::save_dataset(a.out, d);
  if (!d.train.empty()) {
    std::ostringstream tsv;
    data::build_vocab(d, a.min_count).words.write_tsv(tsv);
    write_text(a.out / "vocab.tsv", tsv.str());
  }
  write_resolved(sub, a.out);
  std::cout << "ingested " << d.train.size() << "/" << d.dev.size() << "/" << d.test.size()
            << " games into " << a.out.string() << "\n";
  return kOk;
}

struct TrainArgs {
  fs::path data, out;
  ModelFlags model;
  TrainFlags train;
};

int run_train(const CLI::App& sub, TrainArgs& a) {
  const data::Dataset d = data::load_dataset(a.data);
  const model::ModelConfig config = model_config(a.model, a.train);
  config.validate();
  a.train.config.validate();
  write_resolved(sub, a.out);
  model::Model m = model::make_model(config, data::build_vocab(d, a.train.min_count), a.train.config.seed);
  const auto result = model::train(m, d, a.train.config, a.out, [](const model::EpochMetrics& e) {
    std::cout << "epoch " << e.epoch << " loss " << e.train_loss << " dev_ppl " << e.dev_ppl
              << " lr " << e.lr << std::endl;
  });
  model::save_model(a.out / "model", m);
  write_text(a.out / "metrics.json", train_json(result).dump(2) + "\n");
  return kOk;
}

struct GenerateArgs {
  fs::path data, model_dir, out;
  std::string split = "test", system = "model", mode;
  std::size_t beam = 5, max_len = 850, top_k = 6;
  bool dump_attention = false;
};

// Finds the trained model for --model, which may be a train run, its model/
// directory, or an ablation run holding one subdirectory per mode.
fs::path resolve_model_dir(const fs::path& dir, const std::string& mode) {
  std::vector<fs::path> candidates;
  if (!mode.empty()) candidates.push_back(dir / mode / "model");
  candidates.push_back(dir / "model");
  candidates.push_back(dir);
  for (const auto& c : candidates)
    if (fs::exists(c / "model.cfg")) return c;
  throw DataError("no trained model under " + dir.string());
}

int run_generate(const CLI::App& sub, GenerateArgs& a) {
  const data::Dataset d = data::load_dataset(a.data);
  const auto& games = pick_split(d, a.split);
  if (a.beam == 0) throw UsageError("--beam must be positive");
  write_resolved(sub, a.out);

  std::vector<std::vector<std::string>> outputs;
  std::ostringstream attention;
  std::string label = "TEMPL";
  if (a.system == "templ") {
    templ::TemplateOptions options;
    options.top_k = a.top_k;
    for (const auto& g : games) outputs.push_back(templ::generate_template(g.records, d.schema, options));
  } else if (a.system == "model") {
    if (a.model_dir.empty()) throw UsageError("--model is required for --system model");
    const model::Model m = model::load_model(resolve_model_dir(a.model_dir, a.mode));
    if (!a.mode.empty() && model::parse_mode(a.mode) != m.config.mode)
      throw UsageError("model was trained in mode " + model::mode_name(m.config.mode));
    label = model::mode_label(m.config.mode);
    model::SearchOptions search;
    search.beam = a.beam;
    search.max_len = a.max_len;
    for (const auto& g : games) {
      model::Session session(m, g.records);
      const model::Hypothesis best = model::beam_search(session, search).front();
      outputs.push_back(model::hypothesis_tokens(session, best));
      if (a.dump_attention) dump_attention(attention, g.id, session, best);
    }
  } else {
    throw UsageError("--system must be model or templ");
  }

  std::string lines;
  for (std::size_t i = 0; i < games.size(); ++i) lines += generation_line(games[i].id, outputs[i]);
  write_text(a.out / "generations.jsonl", lines);
  if (a.dump_attention) write_text(a.out / "attention.jsonl", attention.str());

  const bool has_gold = std::all_of(games.begin(), games.end(),
                                    [](const data::GameInstance& g) { return !g.summary.empty(); });
  if (has_gold) {
    std::vector<std::vector<std::string>> golds;
    std::vector<std::vector<data::Record>> tables;
    for (const auto& g : games) {
      golds.push_back(g.summary);
      tables.push_back(g.records);
    }
    const auto report = eval::evaluate_corpus(outputs, golds, tables);
    write_text(a.out / "metrics.json", report.to_json() + "\n");
    std::cout << eval::format_table({{label, report}});
  }
  std::cout << "wrote " << outputs.size() << " generations to " << a.out.string() << "\n";
  return kOk;
}

struct EvaluateArgs {
  fs::path gold, candidate, tables, out;
  std::string schema = "auto";
};

int run_evaluate(const CLI::App&, EvaluateArgs& a) {
  const fs::path table_path = a.tables.empty() ? a.gold : a.tables;
  const auto schema = sniff_schema(a.gold, a.schema);
  const auto gold = data::load_jsonl(a.gold, schema);
  const auto tables = data::load_jsonl(table_path, schema);
  const auto candidates = read_generations(a.candidate);
  if (gold.empty()) throw DataError("no gold summaries in " + a.gold.string());

  std::map<std::string, const data::GameInstance*> table_by_id;
  for (const auto& g : tables) table_by_id[g.id] = &g;
  std::vector<std::vector<std::string>> cands, golds;
  std::vector<std::vector<data::Record>> recs;
  for (const auto& g : gold) {
    auto c = candidates.find(g.id);
    if (c == candidates.end()) throw DataError("no candidate for game " + g.id);
    auto t = table_by_id.find(g.id);
    if (t == table_by_id.end()) throw DataError("no table for game " + g.id);
    cands.push_back(c->second);
    golds.push_back(g.summary);
    recs.push_back(t->second->records);
  }
  const auto report = eval::evaluate_corpus(cands, golds, recs);
  std::cout << report.to_json() << "\n" << eval::format_table({{"candidate", report}});
  if (!a.out.empty()) write_text(a.out / "metrics.json", report.to_json() + "\n");
  return kOk;
}

struct AblateArgs {
  fs::path data, out;
  std::string split = "test";
  ModelFlags model;
  TrainFlags train;
  std::size_t beam = 1, max_len = 850;
};

int run_ablate(const CLI::App& sub, AblateArgs& a) {
  const data::Dataset d = data::load_dataset(a.data);
  const auto& games = pick_split(d, a.split);
  eval::AblationOptions options;
  options.model = model_config(a.model, a.train);
  options.model.validate();
  options.train = a.train.config;
  options.train.validate();
  options.min_count = a.train.min_count;
  options.beam = a.beam;
  options.max_len = a.max_len;
  options.out_dir = a.out;
  write_resolved(sub, a.out);

  const auto rows = eval::run_ablation(d, games, options);
  json report = json::array();
  for (const auto& row : rows) {
    const fs::path dir = a.out / model::mode_name(row.mode);
    std::string lines;
    for (std::size_t i = 0; i < games.size(); ++i) lines += generation_line(games[i].id, row.generations[i]);
    write_text(dir / "generations.jsonl", lines);
    write_text(dir / "metrics.json", row.report.to_json() + "\n");
    json r;
    r["mode"] = model::mode_name(row.mode);
    r["label"] = model::mode_label(row.mode);
    r["parameters"] = row.parameter_scalars;
    r["metrics"] = json::parse(row.report.to_json());
    r["training"] = train_json(row.training);
    report.push_back(r);
  }
  const std::string table = eval::format_ablation(rows);
  write_text(a.out / "report.txt", table);
  write_text(a.out / "report.json", report.dump(2) + "\n");
  std::cout << table;
  return kOk;
}

struct GradcheckArgs {
  std::string mode = "gate", encoder = "flat";
  std::uint64_t seed = 7;
  double epsilon = 1e-5;
  double tolerance = 1e-3;
};

int run_gradcheck(const CLI::App&, GradcheckArgs& a) {
  model::Model m = model::micro_model(model::parse_mode(a.mode), a.seed, model::parse_encoder(a.encoder));
  const auto report = model::check_gradients(m, model::micro_game(),
                                             model::central_difference(a.epsilon, a.tolerance));
  std::cout << "mode " << a.mode << " parameters " << report.checked << " max relative error "
            << report.worst << " (" << report.worst_param << ")\n";
  return report.worst < a.tolerance ? kOk : kNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entity-memory data-to-text generation", "d2t"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic dataset");
  s->add_option("--seed", synth.options.seed)->capture_default_str();
  s->add_option("--games", synth.options.n_games, "train games")->capture_default_str();
  s->add_option("--dev", synth.options.n_dev, "dev games")->capture_default_str();
  s->add_option("--test", synth.options.n_test, "test games")->capture_default_str();
  s->add_option("--entities", synth.options.n_entities, "teams plus players")->capture_default_str();
  s->add_option("--types", synth.options.n_types, "stat types per player")->capture_default_str();
  s->add_option("--threshold", synth.options.mention_threshold, "primary stat to be verbalized")
      ->capture_default_str();
  s->add_option("--schema", synth.schema, "rw4 | mlb6")->capture_default_str();
  s->add_option("--out", synth.out, "dataset directory")->required();

  IngestArgs ingest;
  auto* i = app.add_subcommand("ingest", "convert RotoWire-style JSON to the native format");
  i->add_option("--train", ingest.train, "training games")->required();
  i->add_option("--dev", ingest.dev, "development games");
  i->add_option("--test", ingest.test, "test games");
  i->add_option("--schema", ingest.schema, "rw4 | mlb6")->capture_default_str();
  i->add_option("--min-count", ingest.min_count, "vocabulary cutoff for vocab.tsv")->capture_default_str();
  i->add_option("--seed", ingest.seed, "seed for carving dev/test from train")->capture_default_str();
  i->add_option("--dev-count", ingest.dev_count)->capture_default_str();
  i->add_option("--test-count", ingest.test_count)->capture_default_str();
  i->add_option("--out", ingest.out, "dataset directory")->required();

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train a model");
  t->add_option("--data", train.data, "dataset directory")->required();
  t->add_option("--out", train.out, "run directory")->required();
  add_model_flags(t, train.model);
  add_train_flags(t, train.train);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "decode summaries for a split");
  g->add_option("--data", gen.data, "dataset directory")->required();
  g->add_option("--model", gen.model_dir, "train or ablate run directory");
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_option("--split", gen.split, "train | dev | test")->capture_default_str();
  g->add_option("--system", gen.system, "model | templ")->capture_default_str();
  g->add_option("--mode", gen.mode, "edcc | hier | dyn | gate");
  g->add_option("--beam", gen.beam)->capture_default_str();
  g->add_option("--max-len", gen.max_len)->capture_default_str();
  g->add_option("--top-k", gen.top_k, "players in template output")->capture_default_str();
  g->add_flag("--dump-attention", gen.dump_attention, "write attention.jsonl");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "score generations against gold summaries");
  e->add_option("--gold", ev.gold, "native JSONL with gold summaries")->required();
  e->add_option("--candidate", ev.candidate, "generations JSONL")->required();
  e->add_option("--tables", ev.tables, "native JSONL with tables (default: --gold)");
  e->add_option("--schema", ev.schema, "auto | rw4 | mlb6")->capture_default_str();
  e->add_option("--out", ev.out, "write metrics.json here");

  AblateArgs ab;
  auto* a = app.add_subcommand("ablate", "train and score ED+CC, +Hier, +Dyn, +Gate");
  a->add_option("--data", ab.data, "dataset directory")->required();
  a->add_option("--out", ab.out, "run directory")->required();
  a->add_option("--split", ab.split, "train | dev | test")->capture_default_str();
  a->add_option("--beam", ab.beam)->capture_default_str();
  a->add_option("--max-len", ab.max_len)->capture_default_str();
  add_model_flags(a, ab.model);
  add_train_flags(a, ab.train);

  GradcheckArgs gc;
  auto* c = app.add_subcommand("gradcheck", "finite-difference check on a micro model");
  c->add_option("--mode", gc.mode, "edcc | hier | dyn | gate")->capture_default_str();
  c->add_option("--encoder", gc.encoder, "flat | sequential")->capture_default_str();
  c->add_option("--seed", gc.seed)->capture_default_str();
  c->add_option("--epsilon", gc.epsilon)->capture_default_str();
  c->add_option("--tolerance", gc.tolerance)->capture_default_str();

  for (CLI::App* sub : {s, i, t, g, e, a, c})
    sub->add_option("--config", "key=value file; explicit flags take precedence");

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(args);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  }
  // CLI11 parses reversed argument vectors.
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (s->parsed()) return run_synth(*s, synth);
    if (i->parsed()) return run_ingest(*i, ingest);
    if (t->parsed()) return run_train(*t, train);
    if (g->parsed()) return run_generate(*g, gen);
    if (e->parsed()) return run_evaluate(*e, ev);
    if (a->parsed()) return run_ablate(*a, ab);
    if (c->parsed()) return run_gradcheck(*c, gc);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return kUsage;
  } catch (const NumericError& err) {
    std::cerr << "numeric failure: " << err.what() << "\n";
    return kNumeric;
  } catch (const DataError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return kData;
  } catch (const std::exception& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return kData;
  }
  return kUsage;
}
