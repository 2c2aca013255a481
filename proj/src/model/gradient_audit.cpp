#include "d2t/model/gradient_audit.hpp"

#include "d2t/data/vocab.hpp"
#include "d2t/model/encoder.hpp"
#include "d2t/model/training.hpp"

namespace d2t::model {

data::GameInstance micro_game() {
  data::GameInstance g;
  g.id = "micro-0";
  g.records = {
      {{"Lee", "Lee", "SECOND_NAME", "HOME"}}, {{"12", "Lee", "PTS", "HOME"}},
      {{"5", "Lee", "REB", "HOME"}},           {{"Kim", "Kim", "SECOND_NAME", "AWAY"}},
      {{"7", "Kim", "PTS", "AWAY"}},           {{"-1", "Kim", "AST", "AWAY"}},
  };
  g.summary = {"Lee", "scored", "12", "and", "Kim", "7"};
  return g;
}

data::Dataset micro_dataset() {
  data::Dataset d;
  d.train.push_back(micro_game());
  return d;
}

ModelConfig micro_config(Mode mode, EncoderKind encoder) {
  ModelConfig c;
  c.n = 8;
  c.p = 6;
  c.word_dim = 8;
  c.feature_dim = 0;
  c.layers = 2;
  c.features = 4;
  c.dropout = 0.0;
  c.mode = mode;
  c.encoder = encoder;
  c.init_scale = 0.3;
  return c;
}

Model micro_model(Mode mode, std::uint64_t seed, EncoderKind encoder) {
  return make_model(micro_config(mode, encoder), data::build_vocab(micro_dataset(), 1), seed);
}

nn::GradCheckOptions central_difference(double epsilon, double tolerance) {
  nn::GradCheckOptions o;
  o.five_point = false;
  o.epsilon = epsilon;
  o.tolerance = tolerance;
  return o;
}

nn::GradCheckReport check_gradients(Model& model, const data::GameInstance& game,
                                    const nn::GradCheckOptions& options) {
  const TableIndex index = index_table(game.records, model.vocab);
  return nn::grad_check([&](nn::Tape& t) { return sequence_loss(t, model, index, game.summary); },
                        model.params, options);
}

}  // namespace d2t::model
