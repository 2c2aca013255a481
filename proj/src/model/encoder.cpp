#include "d2t/model/encoder.hpp"

#include <algorithm>

#include "d2t/errors.hpp"
#include "d2t/numerics/lstm.hpp"

namespace d2t::model {

using nn::Var;

const std::string& TableIndex::token(std::size_t id, const data::Vocabulary& words) const {
  if (id < vocab_size) return words.token(id);
  return extended.at(id - vocab_size);
}

const std::vector<std::size_t>& TableIndex::matching(const std::string& token) const {
  static const std::vector<std::size_t> none;
  auto it = records_by_value.find(token);
  return it == records_by_value.end() ? none : it->second;
}

TableIndex index_table(const std::vector<data::Record>& records, const data::Vocabularies& vocab) {
  if (records.empty()) throw DataError("cannot encode an empty table");
  TableIndex ix;
  ix.records = records.size();
  const std::size_t roles = vocab.roles.size();
  std::map<std::string, std::size_t> entity_id;
  std::vector<std::size_t> group_size;
  ix.feature_ids.resize(records.size());
  std::vector<std::size_t> slot(records.size());
  std::vector<std::size_t> entity_of(records.size());
  for (std::size_t j = 0; j < records.size(); ++j) {
    const data::Record& r = records[j];
    if (r.features.size() < roles) throw DataError("record has fewer features than the model");
    for (std::size_t l = 0; l < roles; ++l) ix.feature_ids[j].push_back(vocab.roles[l].id(r.features[l]));
    auto [it, added] = entity_id.emplace(r.entity(), ix.entities.size());
    if (added) {
      ix.entities.push_back(r.entity());
      group_size.push_back(0);
    }
    entity_of[j] = it->second;
    slot[j] = group_size[it->second]++;
  }
  ix.K = ix.entities.size();
  ix.Z = *std::max_element(group_size.begin(), group_size.end());
  ix.cell_record.assign(ix.K * ix.Z, -1);
  ix.cell_mask.assign(ix.K * ix.Z, false);
  ix.record_cell.resize(records.size());
  ix.entity_weights = nn::Matrix(ix.K, ix.Z);
  for (std::size_t j = 0; j < records.size(); ++j) {
    const std::size_t cell = entity_of[j] * ix.Z + slot[j];
    ix.record_cell[j] = cell;
    ix.cell_record[cell] = static_cast<long>(j);
    ix.cell_mask[cell] = true;
    ix.entity_weights(entity_of[j], slot[j]) = 1.0 / static_cast<double>(group_size[entity_of[j]]);
  }

  ix.vocab_size = vocab.words.size();
  std::map<std::string, std::size_t> extended_id;
  ix.copyable.resize(records.size());
  ix.value_token.resize(records.size());
  for (std::size_t j = 0; j < records.size(); ++j) {
    const std::string& v = records[j].value();
    ix.copyable[j] = !v.empty() && v != data::kNoValue;
    if (vocab.words.contains(v) || !ix.copyable[j]) {
      ix.value_token[j] = vocab.words.id(v);
    } else {
      auto [it, added] = extended_id.emplace(v, ix.vocab_size + ix.extended.size());
      if (added) ix.extended.push_back(v);
      ix.value_token[j] = it->second;
    }
    if (ix.copyable[j]) {
      ix.copyable_records.push_back(j);
      ix.records_by_value[v].push_back(j);
    }
  }
  return ix;
}

Var embed_records(nn::Tape& tape, const Model& model, const TableIndex& index) {
  const ModelConfig& c = model.config;
  std::vector<Var> parts;
  std::vector<long> ids(index.records);
  for (std::size_t l = 0; l < c.features; ++l) {
    for (std::size_t j = 0; j < index.records; ++j) ids[j] = static_cast<long>(index.feature_ids[j][l]);
    parts.push_back(nn::gather_rows(tape.param(model.params, "emb.role" + std::to_string(l)), ids));
  }
  Var features = nn::concat_cols(parts);  // R x fL
  Var pre = nn::matmul(features, nn::transpose(tape.param(model.params, "W_r")));
  return nn::relu(nn::add_rowwise(pre, tape.param(model.params, "b_r")));
}

Var entity_average(Var r, const TableIndex& index) {
  nn::Tape& tape = *r.tape();
  Var grid = nn::gather_rows(r, index.cell_record);
  return nn::grouped_mix(tape.borrow(index.entity_weights), grid);
}

namespace {

void finish(nn::Tape& tape, const Model& model, const TableIndex& index, Encoded& enc) {
  enc.keys = nn::matmul(enc.e, nn::transpose(tape.param(model.params, "W_a")));
  enc.grid = nn::gather_rows(enc.e, index.cell_record);
  enc.grid_keys = nn::gather_rows(enc.keys, index.cell_record);
  enc.x = entity_average(enc.records, index);
}

}  // namespace

Encoded encode_flat(nn::Tape& tape, const Model& model, const TableIndex& index,
                    const Dropout& dropout) {
  Encoded enc;
  enc.records = dropout.apply(embed_records(tape, model, index));
  enc.e = enc.records;
  enc.h0 = nn::mean_rows(enc.e);
  enc.c0 = tape.constant(nn::Matrix(model.config.n, 1));
  finish(tape, model, index, enc);
  return enc;
}

Encoded encode_sequential(nn::Tape& tape, const Model& model, const TableIndex& index,
                          const Dropout& dropout) {
  const std::size_t half = model.config.n / 2;
  const std::size_t R = index.records;
  Encoded enc;
  enc.records = dropout.apply(embed_records(tape, model, index));
  const nn::LstmWeights fwd = nn::bind_lstm(tape, model.params, "enc.fwd");
  const nn::LstmWeights bwd = nn::bind_lstm(tape, model.params, "enc.bwd");
  std::vector<Var> inputs(R);
  for (std::size_t j = 0; j < R; ++j) inputs[j] = nn::row(enc.records, j);
  const Var zero = tape.constant(nn::Matrix(half, 1));
  std::vector<nn::LstmState> f(R), b(R);
  nn::LstmState s{zero, zero};
  for (std::size_t j = 0; j < R; ++j) f[j] = s = nn::lstm_cell(inputs[j], s, fwd);
  s = {zero, zero};
  for (std::size_t j = R; j-- > 0;) b[j] = s = nn::lstm_cell(inputs[j], s, bwd);
  std::vector<Var> outputs(R);
  for (std::size_t j = 0; j < R; ++j) outputs[j] = nn::concat({f[j].h, b[j].h});
  Var both = nn::stack_rows(outputs);  // R x n
  enc.e = nn::add_rowwise(nn::matmul(both, nn::transpose(tape.param(model.params, "W_o"))),
                          tape.param(model.params, "b_o"));
  enc.h0 = nn::matmul(tape.param(model.params, "W_hinit"), nn::concat({f[R - 1].h, b[0].h}));
  enc.c0 = nn::matmul(tape.param(model.params, "W_cinit"), nn::concat({f[R - 1].c, b[0].c}));
  finish(tape, model, index, enc);
  return enc;
}

Encoded encode(nn::Tape& tape, const Model& model, const TableIndex& index,
               const Dropout& dropout) {
  return model.config.encoder == EncoderKind::flat ? encode_flat(tape, model, index, dropout)
                                                   : encode_sequential(tape, model, index, dropout);
}

}  // namespace d2t::model
