#include "d2t/model/attention.hpp"

namespace d2t::model {

using nn::Var;

AttentionOutput flat_attention(const Encoded& enc, Var d) {
  AttentionOutput out;
  out.alpha = nn::softmax(nn::matmul(enc.keys, d));
  out.q = nn::matmul(nn::transpose(enc.e), out.alpha);
  out.record_weights = out.alpha;
  return out;
}

AttentionOutput hierarchical_attention(const Encoded& enc, const TableIndex& index, Var u, Var d,
                                       const MemoryParams& params) {
  AttentionOutput out;
  Var logits = nn::reshape(nn::matmul(enc.grid_keys, d), index.K, index.Z);
  out.alpha = nn::masked_softmax_rows(logits, index.cell_mask);
  out.entity_context = nn::grouped_mix(out.alpha, enc.grid);
  out.psi = nn::softmax(nn::matmul(u, nn::matmul(nn::transpose(params.W_h), d)));
  out.q = nn::matmul(nn::transpose(out.entity_context), out.psi);
  Var joint = nn::reshape(nn::scale_rows(out.alpha, out.psi), index.K * index.Z, 1);
  out.record_weights = nn::gather_entries(joint, index.record_cell);
  return out;
}

}  // namespace d2t::model
