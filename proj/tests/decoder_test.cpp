#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "d2t/errors.hpp"
#include "d2t/model/decoder.hpp"
#include "d2t/model/training.hpp"
#include "gtest/gtest.h"
#include "micro_fixture.hpp"

using namespace d2t;
using namespace d2t::model;
using d2t::data::Vocabulary;
using d2t::nn::Matrix;

namespace {

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Words {a, b} plus the reserved tokens; table values are a, b and "-1".
data::GameInstance ab_game() {
  data::GameInstance g;
  g.id = "ab-0";
  g.records = {{{"a", "X", "T1", "HOME"}}, {{"b", "X", "T2", "HOME"}}, {{"-1", "Y", "T1", "AWAY"}}};
  g.summary = {"a", "b", "a"};
  return g;
}

Model ab_model(Mode mode, std::uint64_t seed) {
  data::Dataset d;
  d.train.push_back(ab_game());
  ModelConfig c = fixture::micro_config(mode);
  c.init_scale = 1.0;
  return make_model(c, data::build_vocab(d, 1), seed);
}

double score_sequence(const Session& s, const std::vector<std::size_t>& ids) {
  DecoderState state = s.initial();
  std::size_t prev = Vocabulary::kBegin;
  double score = 0.0;
  for (std::size_t id : ids) {
    StepResult r = s.step(state, prev);
    score += search_log_probs(s, r.dist)[id];
    state = std::move(r.state);
    prev = id;
  }
  return score;
}

}  // namespace

TEST(DecoderStep, SwitchOffGivesGenerationDistribution) {
  Model m = fixture::micro_model(Mode::gate);
  m.params.value("w_s").fill(0.0);
  m.params.value("b_s").fill(-1e4);
  const Session s(m, fixture::micro_game().records);
  const StepResult r = s.step(s.initial(), Vocabulary::kBegin);
  EXPECT_EQ(r.dist.switch_prob, 0.0);
  for (std::size_t i = 0; i < r.dist.p_gen.size(); ++i) EXPECT_EQ(r.dist.mixed[i], r.dist.p_gen[i]);
  EXPECT_EQ(r.dist.mixed.back(), 0.0);  // copy-only "5"
}

TEST(DecoderStep, SwitchOnPutsMassOnTableValuesOnly) {
  Model m = fixture::micro_model(Mode::gate);
  m.params.value("w_s").fill(0.0);
  m.params.value("b_s").fill(1e4);
  const Session s(m, fixture::micro_game().records);
  const StepResult r = s.step(s.initial(), Vocabulary::kBegin);
  EXPECT_EQ(r.dist.switch_prob, 1.0);
  const TableIndex& ix = s.index();
  std::vector<bool> value(ix.output_size(), false);
  for (std::size_t j : ix.copyable_records) value[ix.value_token[j]] = true;
  double on_values = 0.0;
  for (std::size_t id = 0; id < ix.output_size(); ++id) {
    if (value[id]) {
      on_values += r.dist.mixed[id];
    } else {
      EXPECT_EQ(r.dist.mixed[id], 0.0) << s.token(id);
    }
  }
  EXPECT_NEAR(on_values, 1.0, 1e-12);
}

TEST(DecoderStep, MixedDistributionCombinesItsComponents) {
  for (Mode mode : fixture::all_modes()) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const Model m = fixture::micro_model(mode, seed);
      const Session s(m, fixture::micro_game().records);
      const TableIndex& ix = s.index();
      DecoderState state = s.initial();
      std::size_t prev = Vocabulary::kBegin;
      for (const std::string& tok : fixture::micro_game().summary) {
        StepResult r = s.step(state, prev);
        const TokenDistribution& d = r.dist;
        ASSERT_NEAR(total(d.p_gen), 1.0, 1e-12);
        ASSERT_NEAR(total(d.p_copy), 1.0, 1e-12);
        ASSERT_NEAR(total(d.mixed), 1.0, 1e-9);
        ASSERT_NEAR(total(r.record_weights), 1.0, 1e-12);
        ASSERT_EQ(d.p_copy[5], 0.0);  // value "-1"
        ASSERT_GT(d.switch_prob, 0.0);
        ASSERT_LT(d.switch_prob, 1.0);
        std::vector<double> expect(ix.output_size(), 0.0);
        for (std::size_t i = 0; i < d.p_gen.size(); ++i) expect[i] = (1.0 - d.switch_prob) * d.p_gen[i];
        double eligible = 0.0;
        for (std::size_t j = 0; j < ix.records; ++j) {
          if (ix.copyable[j]) eligible += r.record_weights[j];
        }
        for (std::size_t j = 0; j < ix.records; ++j) {
          if (ix.copyable[j]) expect[ix.value_token[j]] += d.switch_prob * r.record_weights[j] / eligible;
        }
        for (std::size_t i = 0; i < expect.size(); ++i) {
          ASSERT_NEAR(d.mixed[i], expect[i], 1e-15);
          ASSERT_GE(d.mixed[i], 0.0);
        }
        state = std::move(r.state);
        prev = s.output_id(tok);
      }
    }
  }
}

TEST(DecoderStep, TableWithoutCopyableValuesGeneratesOnly) {
  const Model m = fixture::micro_model(Mode::gate);
  const Session s(m, {{{"-1", "Lee", "PTS", "HOME"}}});
  const StepResult r = s.step(s.initial(), Vocabulary::kBegin);
  EXPECT_EQ(r.dist.mixed, r.dist.p_gen);
  EXPECT_NEAR(total(r.dist.mixed), 1.0, 1e-12);
}

TEST(DecoderStep, CopyOnlyPreviousTokenIsEmbeddedAsUnknown) {
  const Model m = fixture::micro_model(Mode::gate);
  const Session s(m, fixture::micro_game().records);
  const std::size_t five = s.output_id("5");
  ASSERT_GE(five, m.vocab_size());
  const StepResult a = s.step(s.initial(), five);
  const StepResult b = s.step(s.initial(), Vocabulary::kUnk);
  EXPECT_EQ(a.dist.mixed, b.dist.mixed);
}

TEST(DecoderStep, InputFeedingCarriesAttentionalOutput) {
  const Model m = fixture::micro_model(Mode::gate);
  const Session s(m, fixture::micro_game().records);
  DecoderState changed = s.initial();
  changed.d_att.fill(0.5);
  const StepResult a = s.step(s.initial(), Vocabulary::kBegin);
  const StepResult b = s.step(changed, Vocabulary::kBegin);
  EXPECT_NE(a.dist.mixed, b.dist.mixed);
}

TEST(DecoderStep, StateShapesFollowTheConfiguration) {
  for (Mode mode : fixture::all_modes()) {
    const Model m = fixture::micro_model(mode);
    const Session s(m, fixture::micro_game().records);
    const StepResult r = s.step(s.initial(), Vocabulary::kBegin);
    EXPECT_EQ(r.state.h.size(), 2u);
    EXPECT_EQ(r.state.d_att.rows(), 8u);
    EXPECT_EQ(r.state.u.rows(), mode == Mode::edcc ? 0u : 2u);
    EXPECT_EQ(r.entity_weights.size(), mode == Mode::edcc ? 0u : 2u);
    EXPECT_EQ(r.gamma.size(), mode == Mode::gate ? 6u : 0u);
  }
}

TEST(SequenceLikelihood, EqualsNegatedTrainingLoss) {
  for (EncoderKind enc : {EncoderKind::flat, EncoderKind::sequential}) {
    for (Mode mode : fixture::all_modes()) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Model m = fixture::micro_model(mode, seed, enc);
        const data::GameInstance g = fixture::micro_game();
        const Session s(m, g.records);
        const double ll = sequence_log_likelihood(s, g.summary);
        const double loss = sequence_nll(m, g, 100).loss;
        ASSERT_NEAR(ll, -loss, 1e-8) << mode_name(mode) << " " << encoder_name(enc);
      }
    }
  }
}

TEST(SequenceLikelihood, MatchesStepwiseSummationOracle) {
  const Model m = fixture::micro_model(Mode::gate, 3);
  const data::GameInstance g = fixture::micro_game();
  const Session s(m, g.records);
  DecoderState state = s.initial();
  std::size_t prev = Vocabulary::kBegin;
  double expect = 0.0;
  std::vector<std::string> targets = g.summary;
  targets.push_back("</s>");
  for (const std::string& tok : targets) {
    StepResult r = s.step(state, prev);
    const std::vector<std::size_t>& matches = s.index().matching(tok);
    if (matches.empty()) {
      expect += std::log((1.0 - r.dist.switch_prob) * r.dist.p_gen[m.vocab.words.id(tok)]);
    } else {
      double copy = 0.0;
      for (std::size_t j : matches) copy += r.dist.p_copy[j];
      expect += std::log(r.dist.switch_prob * copy);
    }
    state = std::move(r.state);
    prev = s.output_id(tok);
  }
  EXPECT_NEAR(sequence_log_likelihood(s, g.summary), expect, 1e-10);
}

TEST(Greedy, StopsImmediatelyWhenEndDominates) {
  Model m = fixture::micro_model(Mode::gate);
  m.params.value("W_y").fill(0.0);
  m.params.value("b_y").fill(0.0);
  m.params.value("b_y")[Vocabulary::kEnd] = 50.0;
  m.params.value("w_s").fill(0.0);
  m.params.value("b_s").fill(-50.0);
  const Session s(m, fixture::micro_game().records);
  const Hypothesis h = greedy_decode(s);
  EXPECT_EQ(h.ids, (std::vector<std::size_t>{Vocabulary::kEnd}));
  EXPECT_TRUE(h.finished);
  EXPECT_TRUE(hypothesis_tokens(s, h).empty());
}

TEST(Greedy, IsDeterministicAndRespectsMaxLength) {
  const Model m = fixture::micro_model(Mode::gate, 9);
  const Session s(m, fixture::micro_game().records);
  const Hypothesis a = greedy_decode(s, 12);
  const Hypothesis b = greedy_decode(s, 12);
  EXPECT_EQ(a.ids, b.ids);
  EXPECT_EQ(a.score, b.score);
  EXPECT_LE(a.ids.size(), 12u);
  EXPECT_EQ(greedy_decode(s, 1).ids.size(), 1u);
}

TEST(Greedy, EqualsBeamOfOneOnRandomModels) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Model m = fixture::micro_model(fixture::all_modes()[seed % 4], seed);
    const Session s(m, fixture::micro_game().records);
    const Hypothesis g = greedy_decode(s, 15);
    // Independent argmax loop.
    DecoderState state = s.initial();
    std::size_t prev = Vocabulary::kBegin;
    std::vector<std::size_t> ids;
    for (std::size_t t = 0; t < 15; ++t) {
      StepResult r = s.step(state, prev);
      const std::vector<double> lp = search_log_probs(s, r.dist);
      prev = static_cast<std::size_t>(std::max_element(lp.begin(), lp.end()) - lp.begin());
      ids.push_back(prev);
      state = std::move(r.state);
      if (prev == Vocabulary::kEnd) break;
    }
    ASSERT_EQ(g.ids, ids) << "seed " << seed;
    ASSERT_EQ(beam_search(s, {.beam = 1, .max_len = 15}).front().ids, ids);
  }
}

TEST(Search, NeverProposesReservedTokens) {
  const Model m = fixture::micro_model(Mode::dyn, 2);
  const Session s(m, fixture::micro_game().records);
  for (const Hypothesis& h : beam_search(s, {.beam = 5, .max_len = 20})) {
    for (std::size_t id : h.ids) {
      EXPECT_NE(id, Vocabulary::kPad);
      EXPECT_NE(id, Vocabulary::kBegin);
      EXPECT_NE(id, Vocabulary::kUnk);
    }
  }
}

TEST(Beam, MatchesExhaustiveSearchOnThreeTokenVocabulary) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Model m = ab_model(fixture::all_modes()[seed % 4], seed);
    ASSERT_EQ(m.vocab_size(), 6u);
    const Session s(m, ab_game().records);
    ASSERT_EQ(s.index().output_size(), 6u);
    const std::size_t a = m.vocab.words.id("a"), b = m.vocab.words.id("b"), end = Vocabulary::kEnd;
    // Every sequence of at most three tokens that ends with the end symbol.
    std::vector<std::vector<std::size_t>> all{{end}};
    for (std::size_t x : {a, b}) {
      all.push_back({x, end});
      for (std::size_t y : {a, b}) all.push_back({x, y, end});
    }
    std::vector<std::size_t> best;
    double best_score = -INFINITY;
    for (const auto& seq : all) {
      const double sc = score_sequence(s, seq);
      if (sc > best_score) {
        best_score = sc;
        best = seq;
      }
    }
    const std::vector<Hypothesis> beam = beam_search(s, {.beam = 27, .max_len = 3});
    ASSERT_EQ(beam.size(), all.size());
    ASSERT_EQ(beam.front().ids, best) << "seed " << seed;
    ASSERT_NEAR(beam.front().score, best_score, 1e-12);
    for (std::size_t i = 1; i < beam.size(); ++i) ASSERT_GE(beam[i - 1].score, beam[i].score);
  }
}

TEST(Beam, ScoresAreSumsOfStepLogProbabilities) {
  const Model m = fixture::micro_model(Mode::gate, 4);
  const Session s(m, fixture::micro_game().records);
  for (const Hypothesis& h : beam_search(s, {.beam = 4, .max_len = 12})) {
    EXPECT_NEAR(h.score, score_sequence(s, h.ids), 1e-10);
  }
}

TEST(Beam, WiderBeamNeverScoresWorseOnTwentySeeds) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Model m = fixture::micro_model(fixture::all_modes()[seed % 4], seed);
    const Session s(m, fixture::micro_game().records);
    const Hypothesis one = beam_search(s, {.beam = 1, .max_len = 20}).front();
    const Hypothesis five = beam_search(s, {.beam = 5, .max_len = 20}).front();
    if (one.finished && five.finished) {
      EXPECT_GE(five.score, one.score - 1e-12) << "seed " << seed;
    }
  }
}

TEST(Beam, RejectsDegenerateOptions) {
  const Model m = fixture::micro_model(Mode::gate);
  const Session s(m, fixture::micro_game().records);
  EXPECT_THROW(beam_search(s, {.beam = 0, .max_len = 5}), UsageError);
  EXPECT_THROW(beam_search(s, {.beam = 2, .max_len = 0}), UsageError);
}
