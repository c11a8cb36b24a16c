#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "coldrec/cli.hpp"
#include "coldrec/io.hpp"
#include "doctest.h"
#include "helpers.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int tool(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(COLDREC_TOOL) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path small_config(const fs::path& dir) {
  json cfg = {
      {"seed", 11},
      {"threads", 2},
      {"synth", {{"n_users", 150}, {"n_items", 60}, {"n_cold", 12}, {"feature_dim", 8},
                 {"latent_dim", 3}, {"frames_per_item", 3}}},
      {"split", {{"n_folds", 2}}},
      {"model", {{"latent_dim", 4}, {"max_sweeps", 4}, {"patience", 2}}},
      {"evaluation", {{"cutoffs", {5, 10}}}},
      {"tuning", {{"budget", 3}, {"strategy", "grid"}}},
      {"fusion", {{"method", "concat"}, {"inputs", {"mod0", "mod1"}}, {"output", "both"}}},
  };
  const fs::path p = dir / "config.json";
  std::ofstream(p) << cfg.dump(2);
  return p;
}

}  // namespace

TEST_CASE("resolved configuration") {
  const auto cfg = coldrec::cli::resolve_config(std::nullopt, 9, "somewhere", 3);
  CHECK(cfg.seed() == 9);
  CHECK(cfg.out() == fs::path("somewhere"));
  CHECK(cfg.json.at("data").at("interactions") == "somewhere/data/interactions.csv");
  CHECK(cfg.json.at("evaluation").at("cutoffs") == json({5, 15, 30}));

  testing::TempDir tmp("cfg");
  std::ofstream(tmp.path() / "bad.json") << R"({"modle": {}})";
  CHECK_THROWS(coldrec::cli::resolve_config(tmp.path() / "bad.json", std::nullopt, std::nullopt, std::nullopt));
}

TEST_CASE("end-to-end pipeline through the binary") {
  testing::TempDir tmp("cli");
  const fs::path cfg = small_config(tmp.path());
  const fs::path out = tmp.path() / "run";
  const fs::path log = tmp.path() / "log.txt";
  const std::string base = "--config " + cfg.string() + " --out " + out.string() + " ";

  REQUIRE(tool(base + "synth", log) == 0);
  CHECK(fs::exists(out / "data" / "interactions.csv"));
  CHECK(fs::exists(out / "data" / "features" / "content.fmat"));
  CHECK(fs::exists(out / "data" / "frames" / "mod1"));
  const std::string first = coldrec::io::read_file(out / "data" / "interactions.csv");
  REQUIRE(tool(base + "synth", log) == 0);
  CHECK(coldrec::io::read_file(out / "data" / "interactions.csv") == first);

  REQUIRE(tool(base + "split", log) == 0);
  CHECK(fs::exists(out / "split" / "fold1" / "cold_items.txt"));
  CHECK_FALSE(fs::exists(out / "split" / "fold2"));

  CHECK(tool(base + "evaluate --scenario cold", log) == 1);
  CHECK(coldrec::io::read_file(log).find("hyper.json") != std::string::npos);

  REQUIRE(tool(base + "aggregate", log) == 0);
  CHECK(fs::exists(out / "features" / "mod0.fmat"));
  REQUIRE(tool(base + "fuse", log) == 0);
  CHECK(coldrec::io::read_fmat(out / "features" / "both.fmat").n_items() == 60);

  REQUIRE(tool(base + "train", log) == 0);
  CHECK(fs::exists(out / "models" / "fold0" / "hyper.json"));
  CHECK(fs::exists(out / "models" / "fold1" / "W.fmat"));

  REQUIRE(tool(base + "evaluate --scenario cold --markdown", log) == 0);
  const fs::path eval = out / "eval" / "cold";
  CHECK(fs::exists(eval / "report.md"));
  const json echoed = json::parse(coldrec::io::read_file(eval / "config.json"));
  CHECK(echoed.at("model").at("latent_dim") == 4);
  CHECK(echoed.at("seed") == 11);
  const auto report = coldrec::io::report_from_json(json::parse(coldrec::io::read_file(eval / "report.json")));
  CHECK(report.folds.size() == 2);
  CHECK(report.cutoffs == std::vector<coldrec::Index>{5, 10});

  REQUIRE(tool("report --format csv " + eval.string(), log) == 0);
  CHECK(coldrec::io::read_file(log) == coldrec::io::comparison_csv({{eval.string(), report}}));

  REQUIRE(tool(base + "tune", log) == 0);
  const json best = json::parse(coldrec::io::read_file(out / "tuning" / "best_d.json"));
  CHECK(best.at("evaluations") == 3);
  REQUIRE(tool(base + "train --use-tuned", log) == 0);
  const json hyper = json::parse(coldrec::io::read_file(out / "models" / "fold0" / "hyper.json"));
  CHECK(hyper.at("scaling") == best.at("best_d"));
}

TEST_CASE("command errors exit with status 1") {
  testing::TempDir tmp("cli_err");
  const fs::path log = tmp.path() / "log.txt";
  const fs::path out = tmp.path() / "run";

  json bad = {{"synth", {{"n_items", 10}, {"n_cold", 10}}}};
  std::ofstream(tmp.path() / "bad.json") << bad.dump();
  CHECK(tool("--config " + (tmp.path() / "bad.json").string() + " --out " + out.string() + " synth", log) == 1);
  CHECK(coldrec::io::read_file(log).rfind("error: ", 0) == 0);
  CHECK_FALSE(fs::exists(out / "data"));

  json one = {{"fusion", {{"inputs", {"content"}}}}};
  std::ofstream(tmp.path() / "one.json") << one.dump();
  CHECK(tool("--config " + (tmp.path() / "one.json").string() + " --out " + out.string() + " fuse", log) == 1);

  CHECK(tool("--out " + out.string() + " split", log) == 1);
  CHECK(coldrec::io::read_file(log).find("interactions.csv") != std::string::npos);
  CHECK(tool("report " + (tmp.path() / "nope").string(), log) == 1);
  CHECK(tool("evaluate --scenario lukewarm", log) != 0);
}
