#include "msvar/config.hpp"
#include "msvar/error.hpp"
#include "msvar/pipeline.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace msvar;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("msvar_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Json fixture(const std::string& name) {
  std::ifstream in(fs::path(MSVAR_FIXTURE_DIR) / name);
  Json j;
  in >> j;
  return j;
}

fs::path place(const Json& j, const fs::path& dir) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args, const fs::path& stderr_file) {
  const std::string cmd = std::string("\"") + MSVAR_CLI_PATH + "\" " + args + " 2> \"" + stderr_file.string() + "\" > /dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(Config, UnknownKeysNamedWithPath) {
  Json j = fixture("synthetic.json");
  j["model"]["lags"] = 2;
  try {
    parse_config(j);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("'model.lags'"), std::string::npos);
  }
  j = fixture("synthetic.json");
  j["bogus"] = true;
  EXPECT_THROW(parse_config(j), ValidationError);
}

TEST(Config, ValidatesValuesBeforeRunning) {
  Json j = fixture("synthetic.json");
  j["model"]["ordering"] = {"cgd", "exp", "hc"};
  EXPECT_THROW(parse_config(j), ValidationError);
  j = fixture("synthetic.json");
  j["estimation"]["tol"] = -1;
  EXPECT_THROW(parse_config(j), ValidationError);
  j = fixture("synthetic.json");
  j["output"]["format"] = "xml";
  EXPECT_THROW(parse_config(j), ValidationError);
  j = fixture("synthetic.json");
  j["model"].erase("ordering");
  EXPECT_THROW(parse_config(j), ValidationError);
  j = fixture("synthetic.json");
  j["estimation"]["init"] = "level_clusters";
  EXPECT_EQ(parse_config(j).estimation.init, InitStrategy::level_clusters);
  j["estimation"]["init"] = "kmeans";
  EXPECT_THROW(parse_config(j), ValidationError);
  j = fixture("synthetic.json");
  j["transforms"] = {{"hc", {{{"op", "smooth"}}}}};
  EXPECT_THROW(parse_config(j), ValidationError);
}

TEST(Config, HashIgnoresOutputBlockAndTracksSeed) {
  const Json j = fixture("synthetic.json");
  auto a = parse_config(j);
  Json k = j;
  k["output"]["dir"] = "elsewhere";
  EXPECT_EQ(config_hash(a), config_hash(parse_config(k)));
  auto b = parse_config(j);
  b.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_EQ(fnv1a64(""), 14695981039346656037ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Config, RelativePathsResolveAgainstConfigDirectory) {
  const auto c = parse_config(fixture("synthetic.json"), "/data/run");
  EXPECT_EQ(c.input->path, fs::path("/data/run/simulate/SIM_panel.csv"));
  EXPECT_EQ(c.output.dir.lexically_normal(), fs::path("/data/run/"));
}

TEST(Pipeline, RandomWalkFixtureFailsToReject) {
  const auto dir = fresh_dir("rw");
  const auto config = load_config(place(fixture("random_walk.json"), dir));
  cmd_simulate(config);
  const auto result = cmd_pretest(config);
  EXPECT_FALSE(result.written.empty());
  const Json report = Json::parse(slurp(dir / "pretest" / "RW_stationarity.json"));
  int verdicts = 0;
  for (const auto& row : report["body"]["level"]) {
    if (row["verdict"].is_null()) continue;
    EXPECT_EQ(row["verdict"], "fail to reject") << row["method"];
    ++verdicts;
  }
  EXPECT_EQ(verdicts, 3);
  const std::string csv = slurp(dir / "pretest" / "RW_stationarity.csv");
  EXPECT_NE(csv.find("fail to reject"), std::string::npos);
}

TEST(Pipeline, FitThenAnalyzeIsByteIdentical) {
  std::vector<std::map<std::string, std::string>> trees;
  for (int run = 0; run < 2; ++run) {
    const auto dir = fresh_dir("det" + std::to_string(run));
    const auto config = load_config(place(fixture("synthetic.json"), dir));
    cmd_simulate(config);
    cmd_ingest(config);
    cmd_fit(config);
    cmd_analyze(config);
    std::map<std::string, std::string> tree;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file()) tree[fs::relative(e.path(), dir).string()] = slurp(e.path());
    }
    trees.push_back(std::move(tree));
  }
  EXPECT_EQ(trees[0], trees[1]);
  EXPECT_TRUE(trees[0].count("models/SIM.json"));
  EXPECT_TRUE(trees[0].count("analysis/covid_shock.csv"));
  EXPECT_TRUE(trees[0].count("analysis/SIM/fevd_regime_1.csv"));
  for (const auto& [name, body] : trees[0]) {
    if (name == "config.json") continue;
    const bool csv = name.size() > 4 && name.substr(name.size() - 4) == ".csv";
    if (csv) {
      EXPECT_EQ(body.rfind("# config_hash: ", 0), 0u) << name;
      EXPECT_NE(body.find("# cholesky_ordering: cgd,exp,hc,hdi"), std::string::npos) << name;
    } else {
      EXPECT_TRUE(Json::parse(body).contains("header")) << name;
    }
  }
}

TEST(Pipeline, AnalyzeUsesOnlySerializedModels) {
  const auto dir = fresh_dir("analyze_only");
  Json j = fixture("synthetic.json");
  const auto config = load_config(place(j, dir));
  EXPECT_THROW(cmd_analyze(config), IoError);
  cmd_simulate(config);
  cmd_fit(config);
  fs::remove(dir / "simulate" / "SIM_panel.csv");
  EXPECT_NO_THROW(cmd_analyze(config));
}

TEST(Cli, ExitCodesAndErrorRecord) {
  const auto dir = fresh_dir("cli");
  Json j = fixture("synthetic.json");
  j["unexpected"] = 1;
  const auto bad = place(j, dir);
  const auto err = dir / "stderr.txt";
  EXPECT_EQ(run_cli("fit --config \"" + bad.string() + "\"", err), 1);
  const std::string text = slurp(err);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  const Json record = Json::parse(text);
  EXPECT_EQ(record["kind"], "validation");
  EXPECT_NE(record["message"].get<std::string>().find("unexpected"), std::string::npos);

  EXPECT_EQ(run_cli("fit --config \"" + (dir / "missing.json").string() + "\"", err), 3);

  const auto good = place(fixture("synthetic.json"), dir);
  EXPECT_EQ(run_cli("analyze --config \"" + good.string() + "\" --out \"" + (dir / "empty").string() + "\"", err), 3);
  EXPECT_EQ(run_cli("simulate --config \"" + good.string() + "\" --seed 3 --format csv", err), 0);
  EXPECT_TRUE(fs::exists(dir / "simulate" / "SIM_panel.csv"));
  EXPECT_EQ(run_cli("frobnicate", err), 1);
}
