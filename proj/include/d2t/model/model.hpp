#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "d2t/data/vocab.hpp"
#include "d2t/model/config.hpp"
#include "d2t/numerics/param_store.hpp"
#include "d2t/numerics/tape.hpp"

namespace d2t::model {

// Parameter names:
//   emb.role<l>  feature embeddings (|V_l| x f), W_r (n x fL), b_r
//   enc.fwd / enc.bwd  BiLSTM halves (sequential encoder), W_o, b_o output
//                      projection, W_hinit, W_cinit decoder-state projections
//   emb.word (|V| x word_dim), dec.l<i> decoder LSTM layers
//   W_a (n x n), W_c (n x 2n), W_y (|V| x n), b_y, w_s (1 x n), b_s  copy switch
//   W_i (p x n), W_h (n x p)                       hierarchical modes
//   W_e (p x n), b_e, W_f (p x p), b_f, W_g (p x n)  dynamic modes
//   W_d (p x n), b_d                               gated mode
struct Model {
  ModelConfig config;
  data::Vocabularies vocab;
  nn::ParamStore params;

  std::size_t vocab_size() const { return vocab.words.size(); }
};

void add_model_params(nn::ParamStore& store, const ModelConfig& config,
                      const data::Vocabularies& vocab);
Model make_model(const ModelConfig& config, data::Vocabularies vocab, std::uint64_t seed);

// Model directory: model.cfg (key=value), words.tsv, role<l>.tsv, params.ckpt.
void save_model(const std::filesystem::path& dir, const Model& model);
Model load_model(const std::filesystem::path& dir);
std::string config_to_text(const ModelConfig& config);
ModelConfig config_from_text(const std::string& text);

// Inverted dropout; a null rng or zero rate is the identity.
struct Dropout {
  double rate = 0.0;
  std::mt19937_64* rng = nullptr;

  nn::Var apply(nn::Var v) const;
};

}  // namespace d2t::model
