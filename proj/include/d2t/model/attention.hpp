#pragma once

#include "d2t/model/encoder.hpp"
#include "d2t/model/entity_memory.hpp"

namespace d2t::model {

struct AttentionOutput {
  nn::Var q;               // n x 1 context
  nn::Var alpha;           // flat: R x 1; hierarchical: K x Z, rows sum to 1
  nn::Var psi;             // K x 1 entity weights (hierarchical only)
  nn::Var entity_context;  // K x n, row k = sum_z alpha(k,z) e_{k,z} (hierarchical only)
  nn::Var record_weights;  // R x 1 joint record attention, sums to 1
};

// alpha = softmax_j(e_j^T W_a d), q = sum_j alpha_j e_j.
AttentionOutput flat_attention(const Encoded& enc, nn::Var d);

// Records attend within their entity, entities attend through the memory:
// alpha_{k,z} = softmax_z(e_{k,z}^T W_a d), s_k = sum_z alpha_{k,z} e_{k,z},
// psi = softmax_k(u_k^T W_h^T d), q = sum_k psi_k s_k.
// The joint weight of record (k,z) is psi_k alpha_{k,z}.
AttentionOutput hierarchical_attention(const Encoded& enc, const TableIndex& index, nn::Var u,
                                       nn::Var d, const MemoryParams& params);

}  // namespace d2t::model
