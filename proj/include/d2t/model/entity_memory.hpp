#pragma once

#include "d2t/model/model.hpp"
#include "d2t/numerics/ops.hpp"

namespace d2t::model {

// Entity memory U is K x p, one row per entity.
struct MemoryParams {
  MemoryMode mode = MemoryMode::none;
  nn::Var W_i, W_h;
  nn::Var W_e, b_e, W_f, b_f, W_g;
  nn::Var W_d, b_d;
};

MemoryParams bind_memory(nn::Tape& tape, const Model& model);

// U_{-1} = x W_i^T for entity aggregates x (K x n).
nn::Var init_memory(nn::Var x, const MemoryParams& params);

struct MemoryStep {
  nn::Var u;          // updated memory, K x p
  nn::Var gamma;      // p x 1 global gate, ones without gating
  nn::Var delta;      // K x p update weights
  nn::Var candidate;  // p x 1 candidate row
};

// delta = gamma (.) sigmoid(W_e d + b_e + W_f u_k + b_f) per entity k,
// u_k <- (1 - delta_k) (.) u_k + delta_k (.) W_g d.
// Fixed memory returns u unchanged with delta zero.
MemoryStep memory_step(nn::Var u, nn::Var d, const MemoryParams& params);

}  // namespace d2t::model
