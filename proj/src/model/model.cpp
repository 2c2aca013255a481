#include "d2t/model/model.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "d2t/errors.hpp"
#include "d2t/numerics/checkpoint.hpp"
#include "d2t/numerics/lstm.hpp"
#include "d2t/numerics/ops.hpp"

namespace d2t::model {

void add_model_params(nn::ParamStore& store, const ModelConfig& c,
                      const data::Vocabularies& vocab) {
  c.validate();
  if (vocab.roles.size() != c.features) {
    throw UsageError("model expects " + std::to_string(c.features) + " feature vocabularies, got " +
                     std::to_string(vocab.roles.size()));
  }
  const std::size_t f = c.feature_size();
  for (std::size_t l = 0; l < c.features; ++l) {
    store.add("emb.role" + std::to_string(l), vocab.roles[l].size(), f);
  }
  store.add("W_r", c.n, f * c.features);
  store.add("b_r", c.n, 1);
  if (c.encoder == EncoderKind::sequential) {
    nn::add_lstm_params(store, "enc.fwd", c.n, c.n / 2);
    nn::add_lstm_params(store, "enc.bwd", c.n, c.n / 2);
    store.add("W_o", c.n, c.n);
    store.add("b_o", c.n, 1);
    store.add("W_hinit", c.n, c.n);
    store.add("W_cinit", c.n, c.n);
  }
  store.add("emb.word", vocab.words.size(), c.word_dim);
  for (std::size_t i = 0; i < c.layers; ++i) {
    nn::add_lstm_params(store, "dec.l" + std::to_string(i), i == 0 ? c.word_dim + c.n : c.n, c.n);
  }
  store.add("W_a", c.n, c.n);
  store.add("W_c", c.n, 2 * c.n);
  store.add("W_y", vocab.words.size(), c.n);
  store.add("b_y", vocab.words.size(), 1);
  store.add("w_s", 1, c.n);
  store.add("b_s", 1, 1);
  const MemoryMode mm = memory_mode(c.mode);
  if (mm != MemoryMode::none) {
    store.add("W_i", c.p, c.n);
    store.add("W_h", c.n, c.p);
  }
  if (mm == MemoryMode::dynamic_nogate || mm == MemoryMode::gated) {
    store.add("W_e", c.p, c.n);
    store.add("b_e", c.p, 1);
    store.add("W_f", c.p, c.p);
    store.add("b_f", c.p, 1);
    store.add("W_g", c.p, c.n);
  }
  if (mm == MemoryMode::gated) {
    store.add("W_d", c.p, c.n);
    store.add("b_d", c.p, 1);
  }
}

Model make_model(const ModelConfig& config, data::Vocabularies vocab, std::uint64_t seed) {
  Model m{config, std::move(vocab), {}};
  add_model_params(m.params, m.config, m.vocab);
  m.params.init_uniform(seed, config.init_scale);
  return m;
}

std::string config_to_text(const ModelConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "n=" << c.n << "\np=" << c.p << "\nword_dim=" << c.word_dim
      << "\nfeature_dim=" << c.feature_dim << "\nlayers=" << c.layers
      << "\nfeatures=" << c.features << "\ndropout=" << c.dropout
      << "\nmode=" << mode_name(c.mode) << "\nencoder=" << encoder_name(c.encoder)
      << "\ninit_scale=" << c.init_scale << "\n";
  return out.str();
}

ModelConfig config_from_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("model config: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError(std::string("model config: missing ") + key);
    return it->second;
  };
  ModelConfig c;
  c.n = std::stoul(get("n"));
  c.p = std::stoul(get("p"));
  c.word_dim = std::stoul(get("word_dim"));
  c.feature_dim = std::stoul(get("feature_dim"));
  c.layers = std::stoul(get("layers"));
  c.features = std::stoul(get("features"));
  c.dropout = std::stod(get("dropout"));
  c.mode = parse_mode(get("mode"));
  c.encoder = parse_encoder(get("encoder"));
  c.init_scale = std::stod(get("init_scale"));
  return c;
}

void save_model(const std::filesystem::path& dir, const Model& model) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "model.cfg") << config_to_text(model.config);
  {
    std::ofstream out(dir / "words.tsv");
    model.vocab.words.write_tsv(out);
  }
  for (std::size_t l = 0; l < model.vocab.roles.size(); ++l) {
    std::ofstream out(dir / ("role" + std::to_string(l) + ".tsv"));
    model.vocab.roles[l].write_tsv(out);
  }
  nn::save_checkpoint(dir / "params.ckpt", model.params);
}

Model load_model(const std::filesystem::path& dir) {
  std::ifstream cfg(dir / "model.cfg");
  if (!cfg) throw DataError("missing " + (dir / "model.cfg").string());
  std::stringstream text;
  text << cfg.rdbuf();
  Model m;
  m.config = config_from_text(text.str());
  std::ifstream words(dir / "words.tsv");
  if (!words) throw DataError("missing " + (dir / "words.tsv").string());
  m.vocab.words = data::Vocabulary::read_tsv(words);
  for (std::size_t l = 0; l < m.config.features; ++l) {
    std::ifstream role(dir / ("role" + std::to_string(l) + ".tsv"));
    if (!role) throw DataError("missing role vocabulary " + std::to_string(l));
    m.vocab.roles.push_back(data::Vocabulary::read_tsv(role));
  }
  add_model_params(m.params, m.config, m.vocab);
  nn::load_checkpoint(dir / "params.ckpt", m.params);
  return m;
}

nn::Var Dropout::apply(nn::Var v) const {
  if (rng == nullptr || rate <= 0.0) return v;
  nn::Matrix mask(v.rows(), v.cols());
  const double keep = 1.0 - rate;
  for (double& m : mask.values()) {
    const double u = static_cast<double>((*rng)() >> 11) * 0x1.0p-53;
    m = u < keep ? 1.0 / keep : 0.0;
  }
  return nn::mul(v, v.tape()->constant(std::move(mask)));
}

}  // namespace d2t::model
