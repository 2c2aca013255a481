#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "d2t/data/record.hpp"
#include "d2t/model/decoder.hpp"

namespace d2t::model {

struct TrainConfig {
  double learning_rate = 0.15;
  double decay = 0.97;
  std::size_t decay_after = 4;  // epochs at the initial rate
  std::size_t epochs = 25;
  std::size_t window = 100;     // truncated backpropagation length in decoder steps
  std::size_t batch_size = 5;
  double dropout = 0.3;
  std::uint64_t seed = 1;
  // Starting value of every Adagrad accumulator. With 0 the first update
  // moves each weight by about learning_rate regardless of gradient size.
  double accumulator_init = 0.0;

  void validate() const;
};

// learning_rate * decay^max(0, epoch - decay_after), epochs counted from 1.
double learning_rate_at(const TrainConfig& config, std::size_t epoch);

// Loss of summary tokens then the end symbol, built on one tape.
nn::Var sequence_loss(nn::Tape& tape, const Model& model, const TableIndex& index,
                      const std::vector<std::string>& summary, const Dropout& dropout = {});

struct LossResult {
  double loss = 0.0;       // summed negative log-likelihood
  std::size_t tokens = 0;  // summary length + 1
};

// Truncated evaluation: a fresh tape every `window` steps; LSTM state,
// attentional output and dynamic memory carry over detached, the encoder
// and a fixed memory are recomputed per window. Gradients are added to
// grads when it is non-null. Throws NumericError on a non-finite loss.
LossResult sequence_nll(const Model& model, const TableIndex& index,
                        const std::vector<std::string>& summary, std::size_t window,
                        const Dropout& dropout = {}, nn::ParamStore* grads = nullptr);
LossResult sequence_nll(const Model& model, const data::GameInstance& game, std::size_t window,
                        const Dropout& dropout = {}, nn::ParamStore* grads = nullptr);

// acc += g^2; value -= lr * g / (sqrt(acc) + 1e-10).
void adagrad_update(nn::Matrix& value, const nn::Matrix& grad, nn::Matrix& accum, double lr);
// Scales every gradient by grad_scale, applies Adagrad, clears gradients.
void adagrad_step(nn::ParamStore& params, double lr, double grad_scale = 1.0);

// exp(total loss / total tokens) without dropout.
double perplexity(const Model& model, const std::vector<data::GameInstance>& games,
                  std::size_t window = 100);

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // per token, averaged over the epoch
  double dev_ppl = 0.0;     // NaN without a dev split
  double lr = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> epochs;
  std::size_t best_epoch = 0;
  double best_dev_ppl = 0.0;
};

// Shuffled seeded mini-batches, summed loss, gradients averaged over the
// batch. With a dev split the best dev perplexity picks the returned
// parameters, otherwise the last epoch does. Adagrad accumulators restart at
// accumulator_init. With a non-empty out_dir, writes
// checkpoints/epoch-<e>.ckpt, metrics.csv and best.ckpt.
// A non-finite loss or parameter restores the last good epoch and throws
// NumericError.
TrainResult train(Model& model, const data::Dataset& dataset, const TrainConfig& config,
                  const std::filesystem::path& out_dir = {},
                  const std::function<void(const EpochMetrics&)>& on_epoch = {});

}  // namespace d2t::model
