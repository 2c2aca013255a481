#include "d2t/model/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "d2t/errors.hpp"

namespace d2t::model {

using nn::Matrix;
using nn::Var;

namespace {

constexpr double kLogFloor = 1e-20;

std::vector<double> to_vector(const Matrix& m) { return {m.values().begin(), m.values().end()}; }

double log_sigmoid_value(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

}  // namespace

DecoderWeights bind_decoder(nn::Tape& tape, const Model& model) {
  const nn::ParamStore& s = model.params;
  DecoderWeights w;
  w.emb_word = tape.param(s, "emb.word");
  for (std::size_t i = 0; i < model.config.layers; ++i) {
    w.layers.push_back(nn::bind_lstm(tape, s, "dec.l" + std::to_string(i)));
  }
  w.W_c = tape.param(s, "W_c");
  w.W_y = tape.param(s, "W_y");
  w.b_y = tape.param(s, "b_y");
  w.w_s = tape.param(s, "w_s");
  w.b_s = tape.param(s, "b_s");
  w.memory = bind_memory(tape, model);
  return w;
}

StepState initial_state(const Encoded& enc, const DecoderWeights& weights,
                        const ModelConfig& config) {
  StepState s;
  s.layers.assign(weights.layers.size(), nn::LstmState{enc.h0, enc.c0});
  s.d_att = enc.h0.tape()->constant(Matrix(config.n, 1));
  if (weights.memory.mode != MemoryMode::none) s.u = init_memory(enc.x, weights.memory);
  return s;
}

StepOutput decoder_step(const DecoderWeights& w, const Encoded& enc, const TableIndex& index,
                        const StepState& prev, std::size_t prev_token, const Dropout& dropout) {
  const std::size_t token = prev_token < index.vocab_size ? prev_token : data::Vocabulary::kUnk;
  StepOutput out;
  Var input = nn::concat({nn::row(w.emb_word, token), prev.d_att});
  out.state.layers.resize(w.layers.size());
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    out.state.layers[i] = nn::lstm_cell(dropout.apply(input), prev.layers[i], w.layers[i]);
    input = out.state.layers[i].h;
  }
  out.d = input;
  if (w.memory.mode == MemoryMode::none) {
    out.attention = flat_attention(enc, out.d);
  } else {
    out.memory = memory_step(prev.u, out.d, w.memory);
    out.state.u = out.memory->u;
    out.attention = hierarchical_attention(enc, index, out.state.u, out.d, w.memory);
  }
  out.state.d_att = nn::tanh(nn::matmul(w.W_c, nn::concat({out.d, out.attention.q})));
  Var features = dropout.apply(out.state.d_att);
  out.gen_logits = nn::add(nn::matmul(w.W_y, features), w.b_y);
  out.switch_logit = nn::add(nn::matmul(w.w_s, features), w.b_s);
  return out;
}

Var token_loss(const StepOutput& out, const TableIndex& index, const data::Vocabulary& words,
               const std::string& target) {
  nn::Tape& tape = *out.gen_logits.tape();
  const std::vector<std::size_t>& matches = index.matching(target);
  if (matches.empty()) {
    Var gen = nn::pick(nn::log_softmax(out.gen_logits), words.id(target));
    return nn::scale(nn::add(nn::log_sigmoid(nn::scale(out.switch_logit, -1.0)), gen), -1.0);
  }
  const Var floor = tape.constant(Matrix(1, 1, kLogFloor));
  const Var& weights = out.attention.record_weights;
  Var matched = nn::log(nn::add(nn::sum_entries(weights, matches), floor));
  Var eligible = nn::log(nn::add(nn::sum_entries(weights, index.copyable_records), floor));
  return nn::scale(nn::add(nn::log_sigmoid(out.switch_logit), nn::sub(matched, eligible)), -1.0);
}

struct Session::EncodedValues {
  Matrix records, e, keys, grid, grid_keys, x;
};

namespace {

Encoded borrow_encoded(nn::Tape& tape, const Matrix& records, const Matrix& e, const Matrix& keys,
                       const Matrix& grid, const Matrix& grid_keys, const Matrix& x) {
  Encoded enc;
  enc.records = tape.borrow(records);
  enc.e = tape.borrow(e);
  enc.keys = tape.borrow(keys);
  enc.grid = tape.borrow(grid);
  enc.grid_keys = tape.borrow(grid_keys);
  enc.x = tape.borrow(x);
  return enc;
}

DecoderState snapshot(const StepState& s) {
  DecoderState out;
  for (const nn::LstmState& l : s.layers) {
    out.h.push_back(l.h.value());
    out.c.push_back(l.c.value());
  }
  out.d_att = s.d_att.value();
  if (s.u.valid()) out.u = s.u.value();
  return out;
}

}  // namespace

Session::Session(const Model& model, const std::vector<data::Record>& records)
    : model_(model), index_(index_table(records, model.vocab)) {
  nn::Tape tape;
  tape.set_grad_enabled(false);
  const Encoded enc = encode(tape, model_, index_);
  encoded_ = std::make_unique<EncodedValues>(
      EncodedValues{enc.records.value(), enc.e.value(), enc.keys.value(), enc.grid.value(),
                    enc.grid_keys.value(), enc.x.value()});
  const DecoderWeights w = bind_decoder(tape, model_);
  initial_ = snapshot(initial_state(enc, w, model_.config));
}

Session::~Session() = default;

StepResult Session::step(const DecoderState& state, std::size_t prev_token) const {
  nn::Tape tape;
  tape.set_grad_enabled(false);
  const EncodedValues& v = *encoded_;
  const Encoded enc = borrow_encoded(tape, v.records, v.e, v.keys, v.grid, v.grid_keys, v.x);
  const DecoderWeights w = bind_decoder(tape, model_);
  StepState prev;
  for (std::size_t i = 0; i < state.h.size(); ++i) {
    prev.layers.push_back({tape.borrow(state.h[i]), tape.borrow(state.c[i])});
  }
  prev.d_att = tape.borrow(state.d_att);
  if (w.memory.mode != MemoryMode::none) prev.u = tape.borrow(state.u);
  const StepOutput out = decoder_step(w, enc, index_, prev, prev_token);

  StepResult r;
  r.state = snapshot(out.state);
  r.record_weights = to_vector(out.attention.record_weights.value());
  if (out.attention.psi.valid()) r.entity_weights = to_vector(out.attention.psi.value());
  if (out.memory && w.memory.mode == MemoryMode::gated) r.gamma = to_vector(out.memory->gamma.value());

  TokenDistribution& d = r.dist;
  d.switch_logit = out.switch_logit.scalar();
  d.switch_prob = std::exp(log_sigmoid_value(d.switch_logit));
  d.gen_log_probs = to_vector(nn::log_softmax(out.gen_logits).value());
  d.p_gen.resize(d.gen_log_probs.size());
  for (std::size_t i = 0; i < d.p_gen.size(); ++i) d.p_gen[i] = std::exp(d.gen_log_probs[i]);
  double eligible = 0.0;
  for (std::size_t j : index_.copyable_records) eligible += r.record_weights[j];
  d.p_copy.assign(index_.records, 0.0);
  if (eligible > 0.0) {
    for (std::size_t j : index_.copyable_records) d.p_copy[j] = r.record_weights[j] / eligible;
  }
  d.mixed.assign(index_.output_size(), 0.0);
  const double gen_share = eligible > 0.0 ? 1.0 - d.switch_prob : 1.0;
  for (std::size_t i = 0; i < d.p_gen.size(); ++i) d.mixed[i] = gen_share * d.p_gen[i];
  for (std::size_t j : index_.copyable_records) {
    d.mixed[index_.value_token[j]] += d.switch_prob * d.p_copy[j];
  }
  return r;
}

std::size_t Session::output_id(const std::string& token) const {
  const std::vector<std::size_t>& matches = index_.matching(token);
  if (!matches.empty()) return index_.value_token[matches.front()];
  return model_.vocab.words.id(token);
}

std::string Session::token(std::size_t id) const { return index_.token(id, model_.vocab.words); }

double sequence_log_likelihood(const Session& session, const std::vector<std::string>& tokens) {
  const TableIndex& index = session.index();
  const data::Vocabulary& words = session.model().vocab.words;
  DecoderState state = session.initial();
  std::size_t prev = data::Vocabulary::kBegin;
  double total = 0.0;
  for (std::size_t t = 0; t <= tokens.size(); ++t) {
    const std::string& target = t < tokens.size() ? tokens[t] : words.token(data::Vocabulary::kEnd);
    StepResult r = session.step(state, prev);
    const std::vector<std::size_t>& matches = index.matching(target);
    if (matches.empty()) {
      total += log_sigmoid_value(-r.dist.switch_logit) + r.dist.gen_log_probs[words.id(target)];
    } else {
      double matched = 0.0, eligible = 0.0;
      for (std::size_t j : matches) matched += r.record_weights[j];
      for (std::size_t j : index.copyable_records) eligible += r.record_weights[j];
      total += log_sigmoid_value(r.dist.switch_logit) + std::log(matched + kLogFloor) -
               std::log(eligible + kLogFloor);
    }
    state = std::move(r.state);
    prev = session.output_id(target);
  }
  return total;
}

std::vector<double> search_log_probs(const Session&, const TokenDistribution& dist) {
  std::vector<double> out(dist.mixed.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = dist.mixed[i] > 0.0 ? std::log(dist.mixed[i]) : -std::numeric_limits<double>::infinity();
  }
  for (std::size_t banned : {data::Vocabulary::kPad, data::Vocabulary::kBegin, data::Vocabulary::kUnk}) {
    out[banned] = -std::numeric_limits<double>::infinity();
  }
  return out;
}

namespace {

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.ids.size() != b.ids.size()) return a.ids.size() < b.ids.size();
  return a.ids < b.ids;
}

}  // namespace

Hypothesis greedy_decode(const Session& session, std::size_t max_len) {
  return beam_search(session, {.beam = 1, .max_len = max_len}).front();
}

std::vector<Hypothesis> beam_search(const Session& session, const SearchOptions& options) {
  if (options.beam == 0) throw UsageError("beam size must be positive");
  if (options.max_len == 0) throw UsageError("max_len must be positive");
  struct Alive {
    Hypothesis hyp;
    DecoderState state;
  };
  std::vector<Alive> alive{{Hypothesis{}, session.initial()}};
  std::vector<Hypothesis> finished;
  for (std::size_t t = 0; t < options.max_len && !alive.empty(); ++t) {
    struct Candidate {
      Hypothesis hyp;
      std::size_t parent;
    };
    std::vector<Candidate> candidates;
    std::vector<DecoderState> next_states(alive.size());
    for (std::size_t a = 0; a < alive.size(); ++a) {
      const std::size_t prev = alive[a].hyp.ids.empty() ? data::Vocabulary::kBegin : alive[a].hyp.ids.back();
      StepResult r = session.step(alive[a].state, prev);
      const std::vector<double> lp = search_log_probs(session, r.dist);
      next_states[a] = std::move(r.state);
      for (std::size_t id = 0; id < lp.size(); ++id) {
        if (!std::isfinite(lp[id])) continue;
        Candidate c{alive[a].hyp, a};
        c.hyp.ids.push_back(id);
        c.hyp.score += lp[id];
        c.hyp.finished = id == data::Vocabulary::kEnd;
        candidates.push_back(std::move(c));
      }
    }
    const std::size_t keep = std::min(options.beam, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<long>(keep),
                      candidates.end(),
                      [](const Candidate& a, const Candidate& b) { return better(a.hyp, b.hyp); });
    std::vector<Alive> next;
    for (std::size_t i = 0; i < keep; ++i) {
      if (candidates[i].hyp.finished) {
        finished.push_back(std::move(candidates[i].hyp));
      } else {
        next.push_back({std::move(candidates[i].hyp), next_states[candidates[i].parent]});
      }
    }
    alive = std::move(next);
    if (!finished.empty() && !alive.empty() && finished.size() >= options.beam) {
      const auto best_finished = std::min_element(finished.begin(), finished.end(), better);
      const auto best_alive = std::min_element(
          alive.begin(), alive.end(), [](const Alive& a, const Alive& b) { return better(a.hyp, b.hyp); });
      if (best_finished->score >= best_alive->hyp.score) break;
    }
  }
  std::vector<Hypothesis> out = finished;
  if (out.empty()) {
    for (Alive& a : alive) out.push_back(std::move(a.hyp));
  }
  std::sort(out.begin(), out.end(), better);
  return out;
}

std::vector<std::string> hypothesis_tokens(const Session& session, const Hypothesis& hyp) {
  std::vector<std::string> out;
  for (std::size_t id : hyp.ids) {
    if (id == data::Vocabulary::kEnd) break;
    out.push_back(session.token(id));
  }
  return out;
}

}  // namespace d2t::model
