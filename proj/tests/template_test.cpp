#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "d2t/data/lexicon.hpp"
#include "d2t/data/synth.hpp"
#include "d2t/errors.hpp"
#include "d2t/eval/metrics.hpp"
#include "d2t/templ/template.hpp"

namespace d2t {
namespace {

using data::Record;
using data::RecordSchema;
using data::SchemaKind;

Record mlb(std::string value, std::string entity, std::string type, std::string side,
           std::string inning = "-1", std::string play = "-1") {
  return Record{{value, entity, type, side, inning, play}};
}

Record rw(std::string value, std::string entity, std::string type, std::string side) {
  return Record{{value, entity, type, side}};
}

std::vector<Record> keller_table() {
  return {
      mlb("Royals", "Royals", "TEAM-NAME", "AWAY"),
      mlb("5", "Royals", "TEAM-R", "AWAY"),
      mlb("Pirates", "Pirates", "TEAM-NAME", "HOME"),
      mlb("2", "Pirates", "TEAM-R", "HOME"),
      mlb("B.", "B. Keller", "FIRST_NAME", "AWAY"),
      mlb("Keller", "B. Keller", "SECOND_NAME", "AWAY"),
      mlb("8.0", "B. Keller", "IP", "AWAY"),
      mlb("4", "B. Keller", "P-H", "AWAY"),
      mlb("2", "B. Keller", "P-R", "AWAY"),
      mlb("-1", "Jorge Soler", "home-run-batter", "AWAY", "6", "41"),
      mlb("-1", "Whit Merrifield", "single-batter", "AWAY", "1", "3"),
  };
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
  return s;
}

std::size_t count(const std::vector<std::string>& words, const std::string& w) {
  return static_cast<std::size_t>(std::count(words.begin(), words.end(), w));
}

const RecordSchema kMlb{SchemaKind::mlb6};
const RecordSchema kRw{SchemaKind::rw4};

TEST(Frames, BuiltinCoversBothSchemas) {
  const auto& f = templ::Frames::builtin();
  EXPECT_EQ(f.lookup("rw4.opening").size(), 1u);
  EXPECT_EQ(f.lookup("rw4.player").size(), 1u);
  EXPECT_EQ(f.lookup("rw4.player*").size(), 5u);
  EXPECT_EQ(f.lookup("mlb6.pitcher").size(), 2u);
  EXPECT_EQ(f.lookup("mlb6.play").size(), 1u);
  EXPECT_TRUE(f.lookup("nope").empty());
}

TEST(Frames, ParseSkipsCommentsAndRejectsMalformedLines) {
  std::istringstream ok("# comment\n\nk  a {b} c\nk d\n");
  const auto f = templ::Frames::parse(ok);
  EXPECT_EQ(f.lookup("k"), (std::vector<std::string>{"a {b} c", "d"}));
  std::istringstream bare("lonely\n");
  EXPECT_THROW(templ::Frames::parse(bare), DataError);
  std::istringstream open("k a {b c}\n");
  EXPECT_THROW(templ::Frames::parse(open), DataError);
}

TEST(Template, PitcherLineForKeller) {
  const auto out = templ::generate_template(keller_table(), kMlb);
  const std::string text = join(out);
  EXPECT_NE(text.find("The Royals ( 5 runs ) defeated the Pirates ( 2 runs ) ."), std::string::npos);
  EXPECT_NE(text.find("B. Keller pitched 8.0 innings , allowing 4 hits and 2 runs ."),
            std::string::npos);
  const auto rels = eval::extract_relations(out, keller_table());
  EXPECT_NE(std::find(rels.begin(), rels.end(), eval::Relation{"B. Keller", "8.0", "IP"}), rels.end());
  EXPECT_NE(std::find(rels.begin(), rels.end(), eval::Relation{"B. Keller", "4", "P-H"}), rels.end());
  EXPECT_NE(std::find(rels.begin(), rels.end(), eval::Relation{"B. Keller", "2", "P-R"}), rels.end());
}

TEST(Template, PlaysFollowInningOrder) {
  const auto out = templ::generate_template(keller_table(), kMlb);
  const std::string text = join(out);
  const auto first = text.find("Whit Merrifield singled in the first inning .");
  const auto sixth = text.find("Jorge Soler homered in the sixth inning .");
  ASSERT_NE(first, std::string::npos);
  ASSERT_NE(sixth, std::string::npos);
  EXPECT_LT(first, sixth);
}

TEST(Template, PitcherFallsBackToShortFrame) {
  auto table = keller_table();
  table.erase(std::remove_if(table.begin(), table.end(),
                             [](const Record& r) { return r.type() == "P-H"; }),
              table.end());
  const std::string text = join(templ::generate_template(table, kMlb));
  EXPECT_NE(text.find("B. Keller pitched 8.0 innings ."), std::string::npos);
  EXPECT_EQ(text.find("allowing"), std::string::npos);
}

TEST(Template, RequiresTwoTeamsWithScores) {
  auto table = keller_table();
  table.erase(table.begin() + 2, table.begin() + 4);
  EXPECT_THROW(templ::generate_template(table, kMlb), DataError);

  auto bad = keller_table();
  bad[1].features[0] = "five";
  EXPECT_THROW(templ::generate_template(bad, kMlb), DataError);

  EXPECT_THROW(templ::generate_template(keller_table(), kRw), DataError);
}

TEST(Template, TopKPlayersByPoints) {
  std::vector<Record> table = {
      rw("Hawks", "Hawks", "TEAM-NAME", "HOME"), rw("99", "Hawks", "TEAM-PTS", "HOME"),
      rw("Nets", "Nets", "TEAM-NAME", "AWAY"),   rw("101", "Nets", "TEAM-PTS", "AWAY"),
  };
  const std::vector<std::pair<std::string, int>> players = {
      {"A One", 5}, {"B Two", 30}, {"C Three", 12}, {"D Four", 30}, {"E Five", 1}};
  for (const auto& [name, pts] : players) table.push_back(rw(std::to_string(pts), name, "PTS", "HOME"));
  table.push_back(rw("7", "C Three", "REB", "HOME"));

  templ::TemplateOptions options;
  options.top_k = 3;
  const auto out = templ::generate_template(table, kRw, options);
  const std::string text = join(out);
  EXPECT_EQ(text,
            "The Nets ( 101 points ) defeated the Hawks ( 99 points ) . "
            "B Two scored 30 points . D Four scored 30 points . "
            "C Three scored 12 points . C Three had 7 rebounds .");
  options.top_k = 0;
  EXPECT_EQ(count(templ::generate_template(table, kRw, options), "scored"), 0u);
}

TEST(Template, Deterministic) {
  const auto games = data::synth_games(3, 10, 8, 4, kRw).train;
  for (const auto& g : games)
    EXPECT_EQ(templ::generate_template(g.records, kRw), templ::generate_template(g.records, kRw));
}

// Every relation the extractor finds in a template summary is in the table.
TEST(Template, PerfectRelationPrecisionOnSyntheticGames) {
  for (const RecordSchema& schema : {kRw, kMlb}) {
    const auto games = data::synth_games(11, 100, 10, 4, schema).train;
    std::size_t total = 0, supported = 0;
    for (const auto& g : games) {
      const auto out = templ::generate_template(g.records, schema);
      const auto rg = eval::rg_metric(eval::extract_relations(out, g.records), g.records);
      total += rg.count;
      supported += rg.supported;
    }
    EXPECT_GT(total, 100u) << schema.name();
    EXPECT_EQ(supported, total) << schema.name();
  }
}

// Dropping a play event or a verbalized player never lengthens the output.
TEST(Template, LengthMonotoneInTableContent) {
  for (const RecordSchema& schema : {kRw, kMlb}) {
    const auto games = data::synth_games(5, 20, 8, 4, schema).train;
    for (const auto& g : games) {
      const auto full = templ::generate_template(g.records, schema).size();
      for (std::size_t i = 0; i < g.records.size(); ++i) {
        const Record& r = g.records[i];
        const bool play = r.value() == data::kNoValue && !data::event_word(r.type()).empty();
        if (!play && r.type() != "PTS") continue;
        auto reduced = g.records;
        reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(i));
        EXPECT_LT(templ::generate_template(reduced, schema).size(), full);
      }
    }
  }
}

}  // namespace
}  // namespace d2t
