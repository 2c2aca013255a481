#include "d2t/model/entity_memory.hpp"

#include "d2t/errors.hpp"

namespace d2t::model {

using nn::Var;

MemoryParams bind_memory(nn::Tape& tape, const Model& model) {
  MemoryParams m;
  m.mode = memory_mode(model.config.mode);
  if (m.mode == MemoryMode::none) return m;
  const nn::ParamStore& s = model.params;
  m.W_i = tape.param(s, "W_i");
  m.W_h = tape.param(s, "W_h");
  if (m.mode == MemoryMode::fixed) return m;
  m.W_e = tape.param(s, "W_e");
  m.b_e = tape.param(s, "b_e");
  m.W_f = tape.param(s, "W_f");
  m.b_f = tape.param(s, "b_f");
  m.W_g = tape.param(s, "W_g");
  if (m.mode == MemoryMode::gated) {
    m.W_d = tape.param(s, "W_d");
    m.b_d = tape.param(s, "b_d");
  }
  return m;
}

Var init_memory(Var x, const MemoryParams& params) {
  if (params.mode == MemoryMode::none) throw UsageError("model has no entity memory");
  return nn::matmul(x, nn::transpose(params.W_i));
}

MemoryStep memory_step(Var u, Var d, const MemoryParams& params) {
  nn::Tape& tape = *u.tape();
  const std::size_t K = u.rows();
  const std::size_t p = u.cols();
  MemoryStep out;
  if (params.mode == MemoryMode::none) throw UsageError("model has no entity memory");
  if (params.mode == MemoryMode::fixed) {
    out.u = u;
    out.gamma = tape.constant(nn::Matrix(p, 1));
    out.delta = tape.constant(nn::Matrix(K, p));
    out.candidate = tape.constant(nn::Matrix(p, 1));
    return out;
  }
  if (params.mode == MemoryMode::gated) {
    out.gamma = nn::sigmoid(nn::add(nn::matmul(params.W_d, d), params.b_d));
  } else {
    nn::Matrix ones(p, 1);
    ones.fill(1.0);
    out.gamma = tape.constant(std::move(ones));
  }
  Var shared = nn::add(nn::add(nn::matmul(params.W_e, d), params.b_e), params.b_f);
  Var per_entity = nn::matmul(u, nn::transpose(params.W_f));
  out.delta = nn::mul_rowwise(nn::sigmoid(nn::add_rowwise(per_entity, shared)), out.gamma);
  out.candidate = nn::matmul(params.W_g, d);
  out.u = nn::add(nn::mul(nn::one_minus(out.delta), u),
                  nn::mul(out.delta, nn::repeat_rows(out.candidate, K)));
  return out;
}

}  // namespace d2t::model
