#pragma once

#include <cstddef>
#include <string>

#include "d2t/numerics/ops.hpp"

namespace d2t::nn {

// Standard LSTM cell. The fused weight is (4h) x (in + h) acting on [x; h_prev],
// bias is (4h) x 1, gate blocks are ordered input, forget, output, candidate.
struct LstmWeights {
  Var weight;
  Var bias;
};

struct LstmState {
  Var h;
  Var c;
};

LstmState lstm_cell(Var x, const LstmState& prev, const LstmWeights& weights);

// Registers "<prefix>.W" and "<prefix>.b" in a store.
void add_lstm_params(ParamStore& store, const std::string& prefix, std::size_t input,
                     std::size_t hidden);
LstmWeights bind_lstm(Tape& tape, const ParamStore& store, const std::string& prefix);

}  // namespace d2t::nn
