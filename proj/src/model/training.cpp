#include "d2t/model/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include "d2t/errors.hpp"
#include "d2t/numerics/checkpoint.hpp"

namespace d2t::model {

using nn::Matrix;
using nn::Var;

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !(decay > 0.0)) throw UsageError("learning rate and decay must be positive");
  if (epochs == 0) throw UsageError("epochs must be positive");
  if (window == 0) throw UsageError("window must be at least 1");
  if (batch_size == 0) throw UsageError("batch size must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw UsageError("dropout must be in [0, 1)");
  if (!(accumulator_init >= 0.0)) throw UsageError("accumulator init must be non-negative");
}

double learning_rate_at(const TrainConfig& config, std::size_t epoch) {
  const std::size_t decayed = epoch > config.decay_after ? epoch - config.decay_after : 0;
  return config.learning_rate * std::pow(config.decay, static_cast<double>(decayed));
}

namespace {

struct Carry {
  std::vector<Matrix> h, c;
  Matrix d_att, u;
};

// Loss of targets [begin, end) on one tape, starting from carry when given.
Var window_loss(nn::Tape& tape, const Model& model, const TableIndex& index,
                const std::vector<std::string>& summary, std::size_t begin, std::size_t end,
                const Dropout& dropout, const Carry* carry, Carry* next) {
  const data::Vocabulary& words = model.vocab.words;
  const Encoded enc = encode(tape, model, index, dropout);
  const DecoderWeights w = bind_decoder(tape, model);
  StepState state = initial_state(enc, w, model.config);
  if (carry != nullptr) {
    for (std::size_t i = 0; i < state.layers.size(); ++i) {
      state.layers[i] = {tape.borrow(carry->h[i]), tape.borrow(carry->c[i])};
    }
    state.d_att = tape.borrow(carry->d_att);
    const MemoryMode mode = w.memory.mode;
    if (mode == MemoryMode::dynamic_nogate || mode == MemoryMode::gated) state.u = tape.borrow(carry->u);
  }
  Var total;
  for (std::size_t t = begin; t < end; ++t) {
    const std::size_t prev = t == 0 ? data::Vocabulary::kBegin : words.id(summary[t - 1]);
    const std::string& target = t < summary.size() ? summary[t] : words.token(data::Vocabulary::kEnd);
    StepOutput out = decoder_step(w, enc, index, state, prev, dropout);
    Var loss = token_loss(out, index, words, target);
    total = total.valid() ? nn::add(total, loss) : loss;
    state = std::move(out.state);
  }
  if (next != nullptr) {
    next->h.clear();
    next->c.clear();
    for (const nn::LstmState& l : state.layers) {
      next->h.push_back(l.h.value());
      next->c.push_back(l.c.value());
    }
    next->d_att = state.d_att.value();
    if (state.u.valid()) next->u = state.u.value();
  }
  return total;
}

}  // namespace

Var sequence_loss(nn::Tape& tape, const Model& model, const TableIndex& index,
                  const std::vector<std::string>& summary, const Dropout& dropout) {
  return window_loss(tape, model, index, summary, 0, summary.size() + 1, dropout, nullptr, nullptr);
}

LossResult sequence_nll(const Model& model, const TableIndex& index,
                        const std::vector<std::string>& summary, std::size_t window,
                        const Dropout& dropout, nn::ParamStore* grads) {
  if (window == 0) throw UsageError("window must be at least 1");
  LossResult result;
  result.tokens = summary.size() + 1;
  std::optional<Carry> carry;
  for (std::size_t begin = 0; begin < result.tokens; begin += window) {
    const std::size_t end = std::min(result.tokens, begin + window);
    nn::Tape tape;
    tape.set_grad_enabled(grads != nullptr);
    Carry next;
    Var loss = window_loss(tape, model, index, summary, begin, end, dropout,
                           carry ? &*carry : nullptr, &next);
    const double value = loss.scalar();
    if (!std::isfinite(value)) throw NumericError("non-finite loss at decoder step " + std::to_string(begin));
    result.loss += value;
    if (grads != nullptr) {
      tape.backward(loss);
      tape.accumulate_into(*grads);
    }
    carry = std::move(next);
  }
  return result;
}

LossResult sequence_nll(const Model& model, const data::GameInstance& game, std::size_t window,
                        const Dropout& dropout, nn::ParamStore* grads) {
  return sequence_nll(model, index_table(game.records, model.vocab), game.summary, window, dropout,
                      grads);
}

void adagrad_update(Matrix& value, const Matrix& grad, Matrix& accum, double lr) {
  if (value.rows() != grad.rows() || value.cols() != grad.cols() || accum.rows() != grad.rows() ||
      accum.cols() != grad.cols()) {
    throw DimensionError("adagrad: shape mismatch");
  }
  for (std::size_t i = 0; i < value.size(); ++i) {
    accum[i] += grad[i] * grad[i];
    value[i] -= lr * grad[i] / (std::sqrt(accum[i]) + 1e-10);
  }
}

void adagrad_step(nn::ParamStore& params, double lr, double grad_scale) {
  for (auto& [name, entry] : params.entries()) {
    if (grad_scale != 1.0) {
      for (double& g : entry.grad.values()) g *= grad_scale;
    }
    adagrad_update(entry.value, entry.grad, entry.accum, lr);
  }
  params.zero_grads();
}

double perplexity(const Model& model, const std::vector<data::GameInstance>& games,
                  std::size_t window) {
  double loss = 0.0;
  std::size_t tokens = 0;
  for (const data::GameInstance& g : games) {
    const LossResult r = sequence_nll(model, g, window);
    loss += r.loss;
    tokens += r.tokens;
  }
  if (tokens == 0) throw UsageError("perplexity of an empty set");
  return std::exp(loss / static_cast<double>(tokens));
}

namespace {

bool all_finite(const nn::ParamStore& params) {
  for (const auto& [name, entry] : params.entries()) {
    for (double v : entry.value.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::vector<Matrix> snapshot_values(const nn::ParamStore& params) {
  std::vector<Matrix> out;
  for (const auto& [name, entry] : params.entries()) out.push_back(entry.value);
  return out;
}

void restore_values(nn::ParamStore& params, const std::vector<Matrix>& values) {
  std::size_t i = 0;
  for (auto& [name, entry] : params.entries()) entry.value = values[i++];
}

}  // namespace

TrainResult train(Model& model, const data::Dataset& dataset, const TrainConfig& config,
                  const std::filesystem::path& out_dir,
                  const std::function<void(const EpochMetrics&)>& on_epoch) {
  config.validate();
  if (dataset.train.empty()) throw UsageError("dataset has no train split");
  std::vector<TableIndex> indices;
  for (const data::GameInstance& g : dataset.train) indices.push_back(index_table(g.records, model.vocab));

  std::ofstream metrics;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir / "checkpoints");
    metrics.open(out_dir / "metrics.csv");
    if (!metrics) throw UsageError("cannot write " + (out_dir / "metrics.csv").string());
    metrics << "epoch,train_loss,dev_ppl,lr\n";
    metrics.precision(10);
  }

  for (auto& [name, entry] : model.params.entries()) entry.accum.fill(config.accumulator_init);

  std::mt19937_64 order_rng(config.seed);
  std::mt19937_64 dropout_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const Dropout dropout{config.dropout, &dropout_rng};
  std::vector<std::size_t> order(dataset.train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.best_dev_ppl = std::numeric_limits<double>::infinity();
  std::vector<Matrix> last_good = snapshot_values(model.params);
  std::vector<Matrix> best = last_good;
  model.params.zero_grads();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochMetrics m;
    m.epoch = epoch;
    m.lr = learning_rate_at(config, epoch);
    std::shuffle(order.begin(), order.end(), order_rng);
    double loss = 0.0;
    std::size_t tokens = 0;
    try {
      for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
        const std::size_t end = std::min(order.size(), b + config.batch_size);
        for (std::size_t i = b; i < end; ++i) {
          const data::GameInstance& g = dataset.train[order[i]];
          const LossResult r =
              sequence_nll(model, indices[order[i]], g.summary, config.window, dropout, &model.params);
          loss += r.loss;
          tokens += r.tokens;
        }
        adagrad_step(model.params, m.lr, 1.0 / static_cast<double>(end - b));
        if (!all_finite(model.params)) throw NumericError("non-finite parameter after update");
      }
    } catch (const NumericError& e) {
      restore_values(model.params, last_good);
      model.params.zero_grads();
      throw NumericError(std::string(e.what()) + " in epoch " + std::to_string(epoch) +
                         "; parameters restored to epoch " + std::to_string(epoch - 1));
    }
    m.train_loss = loss / static_cast<double>(tokens);
    m.dev_ppl = dataset.dev.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : perplexity(model, dataset.dev, config.window);
    last_good = snapshot_values(model.params);
    if (dataset.dev.empty() || m.dev_ppl < result.best_dev_ppl) {
      result.best_epoch = epoch;
      result.best_dev_ppl = m.dev_ppl;
      best = last_good;
    }
    if (!out_dir.empty()) {
      nn::save_checkpoint(out_dir / "checkpoints" / ("epoch-" + std::to_string(epoch) + ".ckpt"),
                          model.params);
      metrics << m.epoch << ',' << m.train_loss << ',' << m.dev_ppl << ',' << m.lr << '\n';
      metrics.flush();
    }
    result.epochs.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  restore_values(model.params, best);
  if (!out_dir.empty()) nn::save_checkpoint(out_dir / "best.ckpt", model.params);
  return result;
}

}  // namespace d2t::model
