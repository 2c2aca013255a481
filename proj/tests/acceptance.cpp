// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every selected criterion passes. Pass criterion numbers as arguments
// to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "d2t/data/synth.hpp"
#include "d2t/data/vocab.hpp"
#include "d2t/eval/metrics.hpp"
#include "d2t/model/attention.hpp"
#include "d2t/model/decoder.hpp"
#include "d2t/model/encoder.hpp"
#include "d2t/model/entity_memory.hpp"
#include "d2t/model/gradient_audit.hpp"
#include "d2t/model/training.hpp"
#include "d2t/templ/template.hpp"
#include "oracle.hpp"

using namespace d2t;
using namespace d2t::model;
using d2t::data::Vocabulary;
using d2t::nn::Matrix;
using d2t::nn::Tape;
namespace fs = std::filesystem;
namespace o = d2t::oracle;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = dist(rng);
  return m;
}

o::Vec flat(const Matrix& m) { return o::col(m); }

// ------------------------------------------------------------ 1

Outcome gradient_fidelity() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  for (Mode mode : {Mode::edcc, Mode::hier, Mode::dyn, Mode::gate}) {
    Model m = micro_model(mode);
    const auto report = check_gradients(m, micro_game(), central_difference(1e-5, 1e-3));
    out.note(mode_label(mode) + " " + fmt("%.2e", report.worst));
    out.require(report.worst < 1e-3, mode_label(mode) + " exceeds 1e-3 in " + report.worst_param);
  }
  const double elapsed = seconds_since(t0);
  out.note(fmt("%.1fs", elapsed));
  out.require(elapsed < 30.0, "slower than 30 s");
  return out;
}

// ------------------------------------------------------------ 2

struct QuantityTally {
  std::string name;
  std::size_t cases = 0;
  double worst = 0.0;
};

Outcome quantity_oracles() {
  // A third entity with a single record so the grid has padding.
  data::GameInstance game = micro_game();
  game.records.push_back({{"9", "Ray", "PTS", "AWAY"}});

  std::vector<QuantityTally> eq = {{"record embedding"}, {"entity mean"},  {"initial memory"},
                                   {"gate"},             {"update weight"}, {"candidate"},
                                   {"memory update"},    {"record attention"}, {"entity context"},
                                   {"entity attention"}, {"context vector"}};
  auto tally = [&](std::size_t i, double diff) {
    ++eq[i].cases;
    eq[i].worst = std::max(eq[i].worst, diff);
  };

  std::mt19937_64 rng(2024);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Model m = micro_model(Mode::gate, seed);
    const TableIndex ix = index_table(game.records, m.vocab);
    const auto& P = m.params;
    const std::size_t n = m.config.n, p = m.config.p;

    // Record vectors: relu(W_r [features] + b_r).
    std::vector<o::Vec> r(ix.records);
    for (std::size_t j = 0; j < ix.records; ++j) {
      o::Vec feats;
      for (std::size_t l = 0; l < m.config.features; ++l)
        feats = o::cat(feats, o::row_of(P.value("emb.role" + std::to_string(l)), ix.feature_ids[j][l]));
      r[j] = o::add(o::matvec(P.value("W_r"), feats), o::col(P.value("b_r")));
      for (double& v : r[j]) v = std::max(0.0, v);
    }
    // Entities by name in order of first appearance.
    const auto names = data::entities_in_order(game);
    std::vector<std::vector<std::size_t>> members(names.size());
    for (std::size_t j = 0; j < game.records.size(); ++j) {
      const auto k = std::find(names.begin(), names.end(), game.records[j].entity()) - names.begin();
      members[static_cast<std::size_t>(k)].push_back(j);
    }
    std::vector<o::Vec> x(names.size(), o::Vec(n, 0.0)), u0(names.size());
    for (std::size_t k = 0; k < names.size(); ++k) {
      for (std::size_t j : members[k]) x[k] = o::add(x[k], r[j]);
      for (double& v : x[k]) v /= static_cast<double>(members[k].size());
      u0[k] = o::matvec(P.value("W_i"), x[k]);
    }

    Tape t;
    const Encoded enc = encode(t, m, ix);
    const MemoryParams mp = bind_memory(t, m);
    for (std::size_t j = 0; j < ix.records; ++j) tally(0, o::max_abs_diff(o::row_of(enc.e.value(), j), r[j]));
    const Matrix u_init = init_memory(enc.x, mp).value();
    for (std::size_t k = 0; k < ix.K; ++k) {
      tally(1, o::max_abs_diff(o::row_of(enc.x.value(), k), x[k]));
      tally(2, o::max_abs_diff(o::row_of(u_init, k), u0[k]));
    }

    // One memory update from a random state and decoder output.
    const Matrix u = random_matrix(rng, ix.K, p);
    const Matrix dm = random_matrix(rng, n, 1);
    const o::Vec d = o::col(dm);
    const MemoryStep step = memory_step(t.borrow(u), t.borrow(dm), mp);
    o::Vec gamma = o::add(o::matvec(P.value("W_d"), d), o::col(P.value("b_d")));
    for (double& g : gamma) g = o::sigmoid(g);
    const o::Vec cand = o::matvec(P.value("W_g"), d);
    o::Vec delta, updated;
    for (std::size_t k = 0; k < ix.K; ++k) {
      const o::Vec uk = o::row_of(u, k);
      const o::Vec z = o::add(o::add(o::add(o::matvec(P.value("W_e"), d), o::col(P.value("b_e"))),
                                     o::matvec(P.value("W_f"), uk)),
                              o::col(P.value("b_f")));
      for (std::size_t i = 0; i < p; ++i) {
        const double dk = gamma[i] * o::sigmoid(z[i]);
        delta.push_back(dk);
        updated.push_back((1.0 - dk) * uk[i] + dk * cand[i]);
      }
    }
    tally(3, o::max_abs_diff(flat(step.gamma.value()), gamma));
    tally(4, o::max_abs_diff(flat(step.delta.value()), delta));
    tally(5, o::max_abs_diff(flat(step.candidate.value()), cand));
    tally(6, o::max_abs_diff(flat(step.u.value()), updated));

    // Hierarchical attention with the same state.
    const AttentionOutput a = hierarchical_attention(enc, ix, t.borrow(u), t.borrow(dm), mp);
    const Matrix& W_a = P.value("W_a");
    o::Vec psi_logits, q(n, 0.0);
    std::vector<o::Vec> alpha(ix.K), s(ix.K, o::Vec(n, 0.0));
    for (std::size_t k = 0; k < ix.K; ++k) {
      o::Vec scores;
      for (std::size_t j : members[k]) scores.push_back(o::dot(d, o::matvec(W_a, r[j])));
      alpha[k] = o::softmax(scores);
      for (std::size_t z = 0; z < members[k].size(); ++z)
        for (std::size_t i = 0; i < n; ++i) s[k][i] += alpha[k][z] * r[members[k][z]][i];
      psi_logits.push_back(o::dot(d, o::matvec(P.value("W_h"), o::row_of(u, k))));
    }
    const o::Vec psi = o::softmax(psi_logits);
    for (std::size_t k = 0; k < ix.K; ++k)
      for (std::size_t i = 0; i < n; ++i) q[i] += psi[k] * s[k][i];
    double alpha_diff = 0.0;
    for (std::size_t k = 0; k < ix.K; ++k) {
      for (std::size_t z = 0; z < ix.Z; ++z) {
        const double expect = z < members[k].size() ? alpha[k][z] : 0.0;
        alpha_diff = std::max(alpha_diff, std::fabs(a.alpha.value()(k, z) - expect));
      }
      tally(8, o::max_abs_diff(o::row_of(a.entity_context.value(), k), s[k]));
    }
    tally(7, alpha_diff);
    tally(9, o::max_abs_diff(flat(a.psi.value()), psi));
    tally(10, o::max_abs_diff(flat(a.q.value()), q));
  }

  Outcome out;
  double worst = 0.0;
  std::size_t min_cases = SIZE_MAX;
  for (const auto& e : eq) {
    worst = std::max(worst, e.worst);
    min_cases = std::min(min_cases, e.cases);
    out.require(e.worst <= 1e-10, e.name + " off by " + fmt("%.2e", e.worst));
  }
  out.require(min_cases >= 100, "fewer than 100 cases");
  out.note(std::to_string(eq.size()) + " quantities, >= " + std::to_string(min_cases) +
           " cases each, worst " + fmt("%.2e", worst));
  return out;
}

// ------------------------------------------------------------ 3

double max_diff(const Matrix& a, const Matrix& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

Outcome structural_identities() {
  Outcome out;
  std::mt19937_64 rng(99);
  double single = 0.0, zero = 0.0, full = 0.0, ungated = 0.0, stat = 0.0, ungated_loss = 0.0;
  const data::GameInstance game = micro_game();
  std::vector<data::Record> lee(game.records.begin(), game.records.begin() + 3);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    // One entity: hierarchical attention reduces to flat attention.
    {
      const Model m = micro_model(Mode::gate, seed);
      const TableIndex ix = index_table(lee, m.vocab);
      Tape t;
      const Encoded enc = encode(t, m, ix);
      const MemoryParams mp = bind_memory(t, m);
      const Matrix u = random_matrix(rng, 1, m.config.p), d = random_matrix(rng, m.config.n, 1);
      const AttentionOutput h = hierarchical_attention(enc, ix, t.borrow(u), t.borrow(d), mp);
      const AttentionOutput f = flat_attention(enc, t.borrow(d));
      single = std::max({single, max_diff(h.q.value(), f.q.value()),
                         max_diff(h.record_weights.value(), f.alpha.value())});
    }
    // Saturated update weights: 0 keeps the memory, 1 writes the candidate.
    {
      Model m = micro_model(Mode::dyn, seed);
      const Matrix u = random_matrix(rng, 2, m.config.p), d = random_matrix(rng, m.config.n, 1);
      m.params.value("b_e").fill(-1e3);
      {
        Tape t;
        const MemoryStep s = memory_step(t.borrow(u), t.borrow(d), bind_memory(t, m));
        zero = std::max(zero, max_diff(s.u.value(), u));
      }
      m.params.value("b_e").fill(1e3);
      {
        Tape t;
        const MemoryStep s = memory_step(t.borrow(u), t.borrow(d), bind_memory(t, m));
        const o::Vec cand = o::matvec(m.params.value("W_g"), o::col(d));
        for (std::size_t k = 0; k < 2; ++k) full = std::max(full, o::max_abs_diff(o::row_of(s.u.value(), k), cand));
      }
    }
    // Gate fixed at one equals the ungated model, step and whole sequence.
    {
      Model gate = micro_model(Mode::gate, seed);
      gate.params.value("W_d").fill(0.0);
      gate.params.value("b_d").fill(1e3);
      Model dyn = micro_model(Mode::dyn, seed + 1000);
      for (auto& [name, entry] : dyn.params.entries()) entry.value = gate.params.value(name);
      const Matrix u = random_matrix(rng, 2, gate.config.p), d = random_matrix(rng, gate.config.n, 1);
      Tape ta, tb;
      const MemoryStep a = memory_step(ta.borrow(u), ta.borrow(d), bind_memory(ta, gate));
      const MemoryStep b = memory_step(tb.borrow(u), tb.borrow(d), bind_memory(tb, dyn));
      ungated = std::max(ungated, max_diff(a.u.value(), b.u.value()));
      const Session sg(gate, game.records), sd(dyn, game.records);
      ungated_loss = std::max(ungated_loss, std::fabs(sequence_log_likelihood(sg, game.summary) -
                                                       sequence_log_likelihood(sd, game.summary)));
    }
    // Static memory stays at W_i x for every step.
    {
      const Model m = micro_model(Mode::hier, seed);
      const Session s(m, game.records);
      Tape t;
      const Encoded enc = encode(t, m, s.index());
      const Matrix u0 = init_memory(enc.x, bind_memory(t, m)).value();
      DecoderState state = s.initial();
      stat = std::max(stat, max_diff(state.u, u0));
      std::size_t prev = Vocabulary::kBegin;
      for (const std::string& tok : game.summary) {
        StepResult r = s.step(state, prev);
        stat = std::max(stat, max_diff(r.state.u, u0));
        state = std::move(r.state);
        prev = s.output_id(tok);
      }
    }
  }
  out.require(single <= 1e-10, "single-entity reduction off by " + fmt("%.2e", single));
  out.require(zero == 0.0, "zero update changed memory by " + fmt("%.2e", zero));
  out.require(full <= 1e-10, "full update off candidate by " + fmt("%.2e", full));
  out.require(ungated <= 1e-10 && ungated_loss <= 1e-10,
              "unit gate differs from ungated by " + fmt("%.2e", std::max(ungated, ungated_loss)));
  out.require(stat <= 1e-10, "static memory drifted by " + fmt("%.2e", stat));
  out.note("20 seeds; worst " + fmt("%.2e", std::max({single, full, ungated, ungated_loss, stat})));
  return out;
}

// ------------------------------------------------------------ 4

data::GameInstance ab_game() {
  data::GameInstance g;
  g.id = "ab-0";
  g.records = {{{"a", "X", "T1", "HOME"}}, {{"b", "X", "T2", "HOME"}}, {{"-1", "Y", "T1", "AWAY"}}};
  g.summary = {"a", "b", "a"};
  return g;
}

double score_sequence(const Session& s, const std::vector<std::size_t>& ids) {
  DecoderState state = s.initial();
  std::size_t prev = Vocabulary::kBegin;
  double score = 0.0;
  for (std::size_t id : ids) {
    StepResult r = s.step(state, prev);
    score += search_log_probs(s, r.dist)[id];
    state = std::move(r.state);
    prev = id;
  }
  return score;
}

// Step-by-step argmax of the search distribution, lowest id on ties.
std::vector<std::size_t> argmax_decode(const Session& s, std::size_t max_len) {
  DecoderState state = s.initial();
  std::size_t prev = Vocabulary::kBegin;
  std::vector<std::size_t> ids;
  while (ids.size() < max_len) {
    StepResult r = s.step(state, prev);
    const auto lp = search_log_probs(s, r.dist);
    const std::size_t best = static_cast<std::size_t>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    ids.push_back(best);
    if (best == Vocabulary::kEnd) break;
    state = std::move(r.state);
    prev = best;
  }
  return ids;
}

Outcome search_oracle() {
  Outcome out;
  std::size_t exhaustive_ok = 0, greedy_ok = 0;
  const std::vector<Mode> modes = {Mode::edcc, Mode::hier, Mode::dyn, Mode::gate};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    data::Dataset d;
    d.train.push_back(ab_game());
    ModelConfig c = micro_config(modes[seed % 4]);
    c.init_scale = 1.0;
    const Model m = make_model(c, data::build_vocab(d, 1), seed);
    const Session s(m, ab_game().records);
    // Searchable outputs: a, b and the end symbol.
    const std::size_t a = m.vocab.words.id("a"), b = m.vocab.words.id("b"), end = Vocabulary::kEnd;
    std::vector<std::vector<std::size_t>> all{{end}};
    for (std::size_t x : {a, b}) {
      all.push_back({x, end});
      for (std::size_t y : {a, b}) all.push_back({x, y, end});
    }
    std::vector<std::size_t> best;
    double best_score = -INFINITY;
    for (const auto& seq : all) {
      const double sc = score_sequence(s, seq);
      if (sc > best_score) {
        best_score = sc;
        best = seq;
      }
    }
    const auto beam = beam_search(s, {.beam = 27, .max_len = 3});
    if (!beam.empty() && beam.front().ids == best && std::fabs(beam.front().score - best_score) < 1e-12)
      ++exhaustive_ok;

    const Model micro = micro_model(modes[seed % 4], seed);
    const Session big(micro, micro_game().records);
    if (beam_search(big, {.beam = 1, .max_len = 30}).front().ids == argmax_decode(big, 30)) ++greedy_ok;
  }
  out.require(exhaustive_ok == 20, "beam missed the exhaustive argmax");
  out.require(greedy_ok == 20, "beam 1 differs from greedy");
  out.note("exhaustive " + std::to_string(exhaustive_ok) + "/20, greedy " + std::to_string(greedy_ok) + "/20");
  return out;
}

// ------------------------------------------------------------ 5

std::size_t dld_recursive(const std::vector<int>& a, const std::vector<int>& b, std::size_t i, std::size_t j) {
  if (i == 0) return j;
  if (j == 0) return i;
  std::size_t best = std::min(dld_recursive(a, b, i - 1, j) + 1, dld_recursive(a, b, i, j - 1) + 1);
  best = std::min(best, dld_recursive(a, b, i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1));
  if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
    best = std::min(best, dld_recursive(a, b, i - 2, j - 2) + 1);
  return best;
}

Outcome metric_oracles() {
  Outcome out;
  const eval::Relation sym[3] = {{"A", "1", "PTS"}, {"B", "2", "REB"}, {"C", "-1", "home-run-batter"}};
  std::vector<std::vector<int>> seqs = {{}};
  for (std::size_t begin = 0, len = 1; len <= 6; ++len) {
    const std::size_t end = seqs.size();
    for (std::size_t i = begin; i < end; ++i)
      for (int c = 0; c < 3; ++c) {
        seqs.push_back(seqs[i]);
        seqs.back().push_back(c);
      }
    begin = end;
  }
  std::size_t pairs = 0, mismatches = 0;
  for (const auto& x : seqs) {
    eval::RelationSet rx;
    for (int c : x) rx.push_back(sym[c]);
    for (const auto& y : seqs) {
      eval::RelationSet ry;
      for (int c : y) ry.push_back(sym[c]);
      ++pairs;
      if (eval::damerau_levenshtein(rx, ry) != dld_recursive(x, y, x.size(), y.size())) ++mismatches;
    }
  }
  out.require(mismatches == 0, std::to_string(mismatches) + " DLD mismatches");

  const auto games = data::synth_games(5, 20, 8, 4).train;
  std::vector<std::vector<std::string>> corpus;
  bool cs_identity = true, co_identity = true;
  for (const auto& g : games) {
    corpus.push_back(g.summary);
    const auto rel = eval::extract_relations(g.summary, g.records);
    const auto cs = eval::cs_metric(rel, rel);
    cs_identity = cs_identity && cs.precision == 1.0 && cs.recall == 1.0;
    co_identity = co_identity && eval::co_metric(rel, rel) == 100.0;
  }
  const double b = eval::bleu(corpus, corpus);
  out.require(b == 100.0, "BLEU identity " + fmt("%.6f", b));
  out.require(cs_identity, "CS identity below 1");
  out.require(co_identity, "CO identity below 100");
  const double swap = eval::co_metric({sym[0], sym[1]}, {sym[1], sym[0]});
  out.require(swap == 50.0, "transposition CO " + fmt("%.3f", swap));
  out.note(std::to_string(pairs) + " DLD pairs, BLEU " + fmt("%.1f", b) + ", transposition CO " + fmt("%.1f", swap));
  return out;
}

// ------------------------------------------------------------ 6, 7

// Shared setup for the synthetic overfit suite: 32 basketball games, a
// one-layer model and a learning rate low enough to train without the
// early loss spikes seen at 0.15.
ModelConfig suite_model(Mode mode) {
  ModelConfig c;
  c.n = 64;
  c.p = 48;
  c.word_dim = 64;
  c.layers = 1;
  c.dropout = 0.0;
  c.mode = mode;
  c.init_scale = 0.1;
  return c;
}

TrainConfig suite_training(std::size_t epochs, std::uint64_t seed) {
  TrainConfig t;
  t.learning_rate = 0.05;
  t.batch_size = 5;
  t.dropout = 0.0;
  t.epochs = epochs;
  t.seed = seed;
  return t;
}

data::Dataset suite_data(std::uint64_t seed) {
  data::SynthOptions so;
  so.seed = seed;
  so.n_games = 32;
  return data::synth_games(so);
}

eval::EvalReport greedy_report(const Model& m, const std::vector<data::GameInstance>& games) {
  std::vector<std::vector<std::string>> cands, golds;
  std::vector<std::vector<data::Record>> tables;
  for (const auto& g : games) {
    const Session s(m, g.records);
    cands.push_back(hypothesis_tokens(s, greedy_decode(s, 2 * g.summary.size() + 20)));
    golds.push_back(g.summary);
    tables.push_back(g.records);
  }
  return eval::evaluate_corpus(cands, golds, tables);
}

constexpr std::size_t kOverfitEpochs = 200;
constexpr std::size_t kTrendEpochs = 30;

Outcome overfit() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const data::Dataset d = suite_data(1);
  Model m = make_model(suite_model(Mode::gate), data::build_vocab(d, 1), 1);
  train(m, d, suite_training(kOverfitEpochs, 1));
  const double ppl = perplexity(m, d.train);
  const auto rep = greedy_report(m, d.train);
  const double elapsed = seconds_since(t0);
  out.require(m.vocab_size() <= 300, "vocabulary " + std::to_string(m.vocab_size()));
  out.require(ppl < 1.2, "perplexity " + fmt("%.4f", ppl));
  out.require(rep.rg_precision >= 0.90, "RG precision " + fmt("%.3f", rep.rg_precision));
  out.require(rep.cs_recall >= 0.60, "CS recall " + fmt("%.3f", rep.cs_recall));
  out.require(elapsed < 900.0, "slower than 15 min");
  out.note("vocab " + std::to_string(m.vocab_size()) + ", " + std::to_string(kOverfitEpochs) +
           " epochs, ppl " + fmt("%.4f", ppl) + ", RG P " + fmt("%.3f", rep.rg_precision) + ", CS R " +
           fmt("%.3f", rep.cs_recall) + ", " + fmt("%.0fs", elapsed));
  return out;
}

Outcome ablation_trend() {
  Outcome out;
  std::size_t holds = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const data::Dataset d = suite_data(seed);
    const auto vocab = data::build_vocab(d, 1);
    double cs[2];
    int i = 0;
    for (Mode mode : {Mode::edcc, Mode::hier}) {
      Model m = make_model(suite_model(mode), vocab, seed);
      train(m, d, suite_training(kTrendEpochs, seed));
      cs[i++] = greedy_report(m, d.train).cs_precision;
    }
    if (cs[1] >= cs[0]) ++holds;
    out.note("seed " + std::to_string(seed) + " ED+CC " + fmt("%.3f", cs[0]) + " +Hier " + fmt("%.3f", cs[1]));
  }
  out.require(holds >= 3, "holds on fewer than 3 seeds");
  out.note("holds on " + std::to_string(holds) + "/5");
  return out;
}

// ------------------------------------------------------------ 8

Outcome template_factuality() {
  Outcome out;
  for (data::SchemaKind kind : {data::SchemaKind::rw4, data::SchemaKind::mlb6}) {
    const data::RecordSchema schema{kind};
    const auto games = data::synth_games(8, 100, 10, 4, schema).train;
    std::vector<std::vector<std::string>> outs, golds;
    std::vector<std::vector<data::Record>> tables;
    for (const auto& g : games) {
      outs.push_back(templ::generate_template(g.records, schema));
      golds.push_back(g.summary);
      tables.push_back(g.records);
    }
    const auto rep = eval::evaluate_corpus(outs, golds, tables);
    out.require(rep.rg_precision == 1.0 && !rep.rg_empty,
                schema.name() + " RG precision " + fmt("%.6f", rep.rg_precision));
    out.note(schema.name() + " RG P " + fmt("%.4f", rep.rg_precision) + " over " +
             std::to_string(games.size()) + " games, " + fmt("%.1f", rep.rg_count) + " relations each");
  }
  return out;
}

// ------------------------------------------------------------ 9

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct RunArtifacts {
  std::vector<std::string> files;  // checkpoints and logs, in a fixed order
  std::vector<std::vector<std::string>> generations;
  std::string report;
};

RunArtifacts reproducible_run(const fs::path& dir) {
  fs::remove_all(dir);
  data::SynthOptions so;
  so.seed = 3;
  so.n_games = 8;
  so.n_dev = 2;
  const data::Dataset d = data::synth_games(so);
  ModelConfig c = suite_model(Mode::gate);
  c.n = 16;
  c.p = 12;
  c.word_dim = 16;
  c.dropout = 0.3;
  TrainConfig t = suite_training(3, 5);
  t.dropout = 0.3;
  Model m = make_model(c, data::build_vocab(d, 1), 5);
  train(m, d, t, dir);
  save_model(dir / "model", m);

  RunArtifacts out;
  for (const char* f : {"checkpoints/epoch-1.ckpt", "checkpoints/epoch-2.ckpt", "checkpoints/epoch-3.ckpt",
                        "best.ckpt", "metrics.csv", "model/params.ckpt"})
    out.files.push_back(slurp(dir / f));
  std::vector<std::vector<data::Record>> tables;
  std::vector<std::vector<std::string>> golds;
  for (const auto& g : d.dev) {
    const Session s(m, g.records);
    out.generations.push_back(hypothesis_tokens(s, beam_search(s, {.beam = 3, .max_len = 60}).front()));
    tables.push_back(g.records);
    golds.push_back(g.summary);
  }
  out.report = eval::evaluate_corpus(out.generations, golds, tables).to_json();
  return out;
}

Outcome reproducibility() {
  Outcome out;
  const fs::path base = fs::temp_directory_path() / "d2t-acceptance";
  const RunArtifacts a = reproducible_run(base / "a");
  const RunArtifacts b = reproducible_run(base / "b");
  bool nonempty = true;
  for (const auto& f : a.files) nonempty = nonempty && !f.empty();
  out.require(nonempty, "missing run files");
  out.require(a.files == b.files, "checkpoints or logs differ");
  out.require(a.generations == b.generations, "generations differ");
  out.require(a.report == b.report, "metric reports differ");
  out.note(std::to_string(a.files.size()) + " files, " + std::to_string(a.generations.size()) +
           " generations and one report compared byte for byte");
  fs::remove_all(base);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient fidelity", gradient_fidelity},
      {"quantity oracles", quantity_oracles},
      {"structural identities", structural_identities},
      {"search oracle", search_oracle},
      {"metric oracles", metric_oracles},
      {"overfit reproduction", overfit},
      {"ablation trend", ablation_trend},
      {"template factuality", template_factuality},
      {"reproducibility", reproducibility},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(static_cast<std::size_t>(std::stoul(argv[i])));

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected.empty() && !selected.count(i + 1)) continue;
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    all = all && r.pass;
    std::printf("criterion %zu: %s  %s  (%s)\n", i + 1, r.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
