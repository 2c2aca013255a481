#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "d2t/data/record.hpp"
#include "d2t/model/model.hpp"
#include "d2t/numerics/matrix.hpp"
#include "d2t/numerics/ops.hpp"

namespace d2t::model {

// Non-differentiable layout of one table: feature ids, the entity grid and
// copy targets.
struct TableIndex {
  std::size_t records = 0;
  std::vector<std::vector<std::size_t>> feature_ids;  // [record][role]

  // Entities in order of first appearance; grid cell k*Z+z.
  std::vector<std::string> entities;
  std::size_t K = 0;
  std::size_t Z = 0;
  std::vector<std::size_t> record_cell;  // record -> cell
  std::vector<long> cell_record;         // cell -> record, -1 for padding
  std::vector<bool> cell_mask;           // true for real cells
  nn::Matrix entity_weights;             // K x Z, 1/|group| on real cells

  // Output ids are vocabulary ids, then copy-only table values appended
  // from vocab_size on.
  std::size_t vocab_size = 0;
  std::vector<std::string> extended;
  std::vector<bool> copyable;              // value is neither "-1" nor empty
  std::vector<std::size_t> value_token;    // record -> output id of its value
  std::vector<std::size_t> copyable_records;
  std::map<std::string, std::vector<std::size_t>> records_by_value;  // copyable only

  std::size_t output_size() const { return vocab_size + extended.size(); }
  const std::string& token(std::size_t id, const data::Vocabulary& words) const;
  // Copyable records whose value equals token (empty if none).
  const std::vector<std::size_t>& matching(const std::string& token) const;
};

TableIndex index_table(const std::vector<data::Record>& records, const data::Vocabularies& vocab);

// Encoder outputs on a tape. Rows are records (R x n) or grid cells (KZ x n).
struct Encoded {
  nn::Var records;    // record embeddings r_j
  nn::Var e;          // encoder outputs e_j
  nn::Var keys;       // row j = (W_a e_j)^T, so attention logits are keys * d
  nn::Var grid;       // e gathered into the grid, zero rows on padding
  nn::Var grid_keys;
  nn::Var x;          // K x n entity aggregates of the record embeddings
  nn::Var h0;
  nn::Var c0;
};

// relu(W_r [emb_1(f_1); ...; emb_L(f_L)] + b_r) for every record, R x n.
nn::Var embed_records(nn::Tape& tape, const Model& model, const TableIndex& index);
// Mean of each entity's rows of r, K x n.
nn::Var entity_average(nn::Var r, const TableIndex& index);

// e_j = r_j; h0 = mean of e_j, c0 = 0.
Encoded encode_flat(nn::Tape& tape, const Model& model, const TableIndex& index,
                    const Dropout& dropout = {});
// BiLSTM halves of size n/2 over r_1..r_R; e_j = W_o [fwd_j; bwd_j] + b_o,
// h0 = W_hinit [fwd_R; bwd_1], c0 = W_cinit [fwd cell R; bwd cell 1].
Encoded encode_sequential(nn::Tape& tape, const Model& model, const TableIndex& index,
                          const Dropout& dropout = {});
Encoded encode(nn::Tape& tape, const Model& model, const TableIndex& index,
               const Dropout& dropout = {});

}  // namespace d2t::model
