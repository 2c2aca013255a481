#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& work() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "d2t-cli-test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI inside the work directory, output discarded; returns the exit code.
int run(const std::string& args) {
  const std::string cmd =
      "cd '" + work().string() + "' && '" D2T_CLI "' " + args + " > last.log 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kTiny =
    " --n 16 --p 12 --word-dim 16 --layers 1 --epochs 2 --dropout 0 --batch 2";

void ensure_data() {
  static bool done = false;
  if (done) return;
  ASSERT_EQ(run("synth --seed 1 --games 6 --dev 2 --test 2 --out data"), 0);
  done = true;
}

TEST(Cli, SynthIsDeterministic) {
  ASSERT_EQ(run("synth --seed 4 --games 5 --test 2 --out s1"), 0);
  ASSERT_EQ(run("synth --seed 4 --games 5 --test 2 --out s2"), 0);
  for (const char* f : {"train.jsonl", "test.jsonl", "schema.txt"})
    EXPECT_EQ(slurp(work() / "s1" / f), slurp(work() / "s2" / f)) << f;
  EXPECT_FALSE(slurp(work() / "s1" / "train.jsonl").empty());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("synth --out x --no-such-flag 3"), 1);
  EXPECT_EQ(run("train --data missing-dir --out r"), 2);
  EXPECT_EQ(run("gradcheck --mode gate"), 0);
  EXPECT_EQ(run("gradcheck --mode hier --epsilon 0.5"), 3);
  EXPECT_EQ(run("gradcheck --mode nonsense"), 1);
}

TEST(Cli, GradcheckReportsError) {
  ASSERT_EQ(run("gradcheck --mode edcc"), 0);
  EXPECT_NE(slurp(work() / "last.log").find("max relative error"), std::string::npos);
}

TEST(Cli, TrainWritesRunDirectoryAndReplaysFromResolvedConfig) {
  ensure_data();
  ASSERT_EQ(run("train --data data --out run1" + kTiny), 0);
  for (const char* f : {"config.resolved", "metrics.csv", "metrics.json", "best.ckpt",
                        "checkpoints/epoch-1.ckpt", "checkpoints/epoch-2.ckpt", "model/model.cfg"})
    EXPECT_TRUE(fs::exists(work() / "run1" / f)) << f;
  ASSERT_EQ(run("train --config run1/config.resolved --out run2"), 0);
  EXPECT_EQ(slurp(work() / "run1" / "best.ckpt"), slurp(work() / "run2" / "best.ckpt"));
  EXPECT_EQ(slurp(work() / "run1" / "metrics.csv"), slurp(work() / "run2" / "metrics.csv"));
  // An explicit flag overrides the config file.
  ASSERT_EQ(run("train --config run1/config.resolved --out run3 --epochs 1"), 0);
  EXPECT_FALSE(fs::exists(work() / "run3" / "checkpoints/epoch-2.ckpt"));
}

TEST(Cli, GenerateAndEvaluate) {
  ensure_data();
  if (!fs::exists(work() / "run1" / "model")) ASSERT_EQ(run("train --data data --out run1" + kTiny), 0);
  ASSERT_EQ(run("generate --data data --model run1 --out gen --beam 2 --max-len 30 --dump-attention"), 0);
  const std::string gens = slurp(work() / "gen" / "generations.jsonl");
  EXPECT_EQ(std::count(gens.begin(), gens.end(), '\n'), 2);
  EXPECT_TRUE(fs::exists(work() / "gen" / "metrics.json"));
  EXPECT_TRUE(fs::exists(work() / "gen" / "config.resolved"));
  std::istringstream att(slurp(work() / "gen" / "attention.jsonl"));
  std::string line;
  ASSERT_TRUE(std::getline(att, line));
  const auto j = nlohmann::json::parse(line);
  EXPECT_TRUE(j.contains("alpha"));
  EXPECT_TRUE(j.contains("psi"));
  EXPECT_TRUE(j.contains("gamma"));

  EXPECT_EQ(run("generate --data data --model run1 --out gen2 --mode edcc"), 1);
  ASSERT_EQ(run("evaluate --gold data/test.jsonl --candidate gen/generations.jsonl --out ev"), 0);
  EXPECT_EQ(slurp(work() / "ev" / "metrics.json"), slurp(work() / "gen" / "metrics.json"));
}

TEST(Cli, TemplateSystemIsFullyFactual) {
  ensure_data();
  ASSERT_EQ(run("generate --data data --split train --system templ --out templ"), 0);
  const auto m = nlohmann::json::parse(slurp(work() / "templ" / "metrics.json"));
  EXPECT_EQ(m["rg_precision"].get<double>(), 1.0);
  EXPECT_GT(m["rg_count"].get<double>(), 0.0);
}

TEST(Cli, AblateWritesFourRowReport) {
  ensure_data();
  ASSERT_EQ(run("ablate --data data --out abl --max-len 20" + kTiny), 0);
  const std::string report = slurp(work() / "abl" / "report.txt");
  for (const char* col : {"RG#", "RG P%", "CS P%", "CS R%", "CO", "BLEU"})
    EXPECT_NE(report.find(col), std::string::npos) << col;
  const auto a = report.find("ED+CC"), b = report.find("+Hier"), c = report.find("+Dyn"),
             d = report.find("+Gate");
  ASSERT_NE(d, std::string::npos);
  EXPECT_LT(a, b);
  EXPECT_LT(b, c);
  EXPECT_LT(c, d);
  for (const char* mode : {"edcc", "hier", "dyn", "gate"}) {
    EXPECT_TRUE(fs::exists(work() / "abl" / mode / "generations.jsonl")) << mode;
    EXPECT_TRUE(fs::exists(work() / "abl" / mode / "model" / "model.cfg")) << mode;
  }
}

}  // namespace
