#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "d2t/model/attention.hpp"
#include "d2t/numerics/lstm.hpp"

namespace d2t::model {

struct DecoderWeights {
  nn::Var emb_word;
  std::vector<nn::LstmWeights> layers;
  nn::Var W_c, W_y, b_y, w_s, b_s;
  MemoryParams memory;
};

DecoderWeights bind_decoder(nn::Tape& tape, const Model& model);

// Recurrent state carried between steps. u is invalid without memory.
struct StepState {
  std::vector<nn::LstmState> layers;
  nn::Var d_att;
  nn::Var u;
};

// Every layer starts from the encoder's (h0, c0); d_att starts at zero.
StepState initial_state(const Encoded& enc, const DecoderWeights& weights,
                        const ModelConfig& config);

struct StepOutput {
  StepState state;
  nn::Var d;             // top LSTM output
  nn::Var gen_logits;    // |V| x 1
  nn::Var switch_logit;  // 1 x 1, sigmoid gives the copy probability
  AttentionOutput attention;
  std::optional<MemoryStep> memory;
};

// One step: LSTM on [emb(prev); d_att_prev], memory update, attention,
// d_att = tanh(W_c [d; q]), generation and switch logits. prev_token ids
// beyond the vocabulary are embedded as unknown.
StepOutput decoder_step(const DecoderWeights& weights, const Encoded& enc,
                        const TableIndex& index, const StepState& prev, std::size_t prev_token,
                        const Dropout& dropout = {});

// Negative log-likelihood of one target token with the observed copy
// alignment: copy branch if the token equals some copyable record value,
// generation branch otherwise.
nn::Var token_loss(const StepOutput& out, const TableIndex& index, const data::Vocabulary& words,
                   const std::string& target);

// Detached copies of a state's values, reused on a fresh tape.
struct DecoderState {
  std::vector<nn::Matrix> h, c;
  nn::Matrix d_att;
  nn::Matrix u;
};

struct TokenDistribution {
  double switch_logit = 0.0;
  double switch_prob = 0.0;
  std::vector<double> gen_log_probs;  // |V|
  std::vector<double> p_gen;   // |V|
  std::vector<double> p_copy;  // per record, sums to 1 over copyable records
  // Output ids: vocabulary then copy-only values. Equals p_gen when the
  // table has no copyable record.
  std::vector<double> mixed;
};

struct StepResult {
  DecoderState state;
  TokenDistribution dist;
  std::vector<double> record_weights;  // raw attention, per record
  std::vector<double> entity_weights;  // psi, hierarchical only
  std::vector<double> gamma;           // gated memory only
};

// Inference over one table: the encoder runs once, each step uses a fresh
// tape without gradients.
class Session {
 public:
  Session(const Model& model, const std::vector<data::Record>& records);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const TableIndex& index() const { return index_; }
  const Model& model() const { return model_; }
  DecoderState initial() const { return initial_; }
  StepResult step(const DecoderState& state, std::size_t prev_token) const;
  std::size_t output_id(const std::string& token) const;
  std::string token(std::size_t id) const;

 private:
  const Model& model_;
  TableIndex index_;
  struct EncodedValues;
  std::unique_ptr<EncodedValues> encoded_;
  DecoderState initial_;
};

// Joint log-likelihood of tokens followed by the end symbol under the
// observed copy alignment.
double sequence_log_likelihood(const Session& session, const std::vector<std::string>& tokens);

struct SearchOptions {
  std::size_t beam = 5;
  std::size_t max_len = 850;
};

struct Hypothesis {
  std::vector<std::size_t> ids;  // includes the end symbol when finished
  double score = 0.0;            // summed log of the mixed distribution
  bool finished = false;
};

// Log-probability used by search; padding, begin and unknown are excluded.
std::vector<double> search_log_probs(const Session& session, const TokenDistribution& dist);

Hypothesis greedy_decode(const Session& session, std::size_t max_len = 850);
// Best finished hypotheses first. Ties: higher score, earlier completion,
// then lexicographically smaller ids.
std::vector<Hypothesis> beam_search(const Session& session, const SearchOptions& options);
// Tokens without the end symbol.
std::vector<std::string> hypothesis_tokens(const Session& session, const Hypothesis& hyp);

}  // namespace d2t::model
