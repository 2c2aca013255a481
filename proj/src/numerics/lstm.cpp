#include "d2t/numerics/lstm.hpp"

#include "d2t/errors.hpp"

namespace d2t::nn {

LstmState lstm_cell(Var x, const LstmState& prev, const LstmWeights& weights) {
  const std::size_t hidden = prev.h.rows();
  const Matrix& w = weights.weight.value();
  if (prev.c.rows() != hidden || w.rows() != 4 * hidden ||
      w.cols() != x.rows() + hidden || weights.bias.rows() != 4 * hidden) {
    throw DimensionError("lstm_cell: x " + x.value().shape_string() + ", h " +
                         prev.h.value().shape_string() + ", c " +
                         prev.c.value().shape_string() + ", W " + w.shape_string() + ", b " +
                         weights.bias.value().shape_string());
  }
  Var pre = add(matmul(weights.weight, concat({x, prev.h})), weights.bias);
  Var in_gate = sigmoid(slice_rows(pre, 0, hidden));
  Var forget_gate = sigmoid(slice_rows(pre, hidden, hidden));
  Var out_gate = sigmoid(slice_rows(pre, 2 * hidden, hidden));
  Var candidate = tanh(slice_rows(pre, 3 * hidden, hidden));
  Var c = add(mul(forget_gate, prev.c), mul(in_gate, candidate));
  Var h = mul(out_gate, tanh(c));
  return {h, c};
}

void add_lstm_params(ParamStore& store, const std::string& prefix, std::size_t input,
                     std::size_t hidden) {
  store.add(prefix + ".W", 4 * hidden, input + hidden);
  store.add(prefix + ".b", 4 * hidden, 1);
}

LstmWeights bind_lstm(Tape& tape, const ParamStore& store, const std::string& prefix) {
  return {tape.param(store, prefix + ".W"), tape.param(store, prefix + ".b")};
}

}  // namespace d2t::nn
