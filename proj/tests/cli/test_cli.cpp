#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("hyperperc_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string write(const std::string& name, const json& j) const {
    const auto path = (dir / name).string();
    std::ofstream(path) << j.dump();
    return path;
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
  const std::string cmd = std::string(HYPERPERC_BIN) + " " + args + " > " + stdout_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Workdir& work() {
  static Workdir w;
  return w;
}

}  // namespace

TEST_CASE("percolate writes a CSV and a run record") {
  const auto cfg = work().write("perc.json", {{"family", {{"kind", "tree"}, {"k", 3}}},
                                              {"R", 6},
                                              {"p_grid", {0.2, 0.4}},
                                              {"estimators", {"two_point", "susceptibility"}},
                                              {"n_samples", 2000},
                                              {"seed", 3}});
  const auto out = work().path("perc.csv");
  REQUIRE(run("percolate --config " + cfg + " --out " + out) == 0);
  const auto csv = slurp(out);
  CHECK(csv.rfind("estimator,params,p,value,std_error,boundary_touch_fraction,n_samples,seed,window_R\n", 0) == 0);
  CHECK(csv.find("susceptibility,") != std::string::npos);
  const auto record = json::parse(slurp(out + ".record.json"));
  CHECK(record["experiment"] == "percolate");
  CHECK(record["seed"] == 3);
}

TEST_CASE("output does not depend on the thread count") {
  const auto cfg = work().write("det.json", {{"family", {{"kind", "tiling"}, {"p", 3}, {"q", 7}}},
                                             {"R", 3},
                                             {"p", 0.3},
                                             {"estimators", {"susceptibility", "two_point"}},
                                             {"n_samples", 5000},
                                             {"seed", 9}});
  REQUIRE(run("percolate --config " + cfg + " --threads 1", work().path("t1.csv")) == 0);
  REQUIRE(run("percolate --config " + cfg + " --threads 4", work().path("t4.csv")) == 0);
  CHECK(slurp(work().path("t1.csv")) == slurp(work().path("t4.csv")));
  CHECK(!slurp(work().path("t1.csv")).empty());
  // The seed flag overrides the config and changes the numbers.
  REQUIRE(run("percolate --config " + cfg + " --seed 10", work().path("s10.csv")) == 0);
  CHECK(slurp(work().path("s10.csv")) != slurp(work().path("t1.csv")));
}

TEST_CASE("schema and range errors exit with code 2") {
  const json base = {{"family", {{"kind", "tree"}, {"k", 3}}},
                     {"R", 5},
                     {"p", 0.3},
                     {"estimators", {"two_point"}},
                     {"n_samples", 1000},
                     {"seed", 1}};
  auto bad_p = base;
  bad_p["p"] = 1.5;
  CHECK(run("percolate --config " + work().write("badp.json", bad_p)) == 2);
  auto no_seed = base;
  no_seed.erase("seed");
  CHECK(run("percolate --config " + work().write("noseed.json", no_seed)) == 2);
  CHECK(run("percolate --config " + work().path("missing.json")) == 2);
  CHECK(run("percolate") == 2);
  CHECK(run("nonsense") == 2);
  auto huge = base;
  huge["n_samples"] = 2'000'000'000;
  CHECK(run("percolate --config " + work().write("huge.json", huge)) == 4);
}

TEST_CASE("generate and magic") {
  const auto gen = work().write("gen.json", {{"family", {{"kind", "tiling"}, {"p", 3}, {"q", 7}}}, {"R", 3}});
  const auto win = work().path("win.json");
  REQUIRE(run("generate --config " + gen + " --out " + win) == 0);
  const auto w = json::parse(slurp(win));
  CHECK(w["family"] == "tiling");
  CHECK(w["coords"].is_array());

  const auto mag = work().write("magic.json", {{"window_file", win}, {"epsilon", 0.3}});
  const auto out = work().path("magic_out.json");
  REQUIRE(run("magic --config " + mag + " --out " + out) == 0);
  const auto m = json::parse(slurp(out));
  REQUIRE(m["selected"].is_array());
  CHECK(m["selected"].size() == m["witnesses"].size());
  for (const auto& wit : m["witnesses"]) CHECK(wit["dist"].get<double>() >= 1.0 / 0.3);

  const auto close = work().write("close.json", {{"points", {{{"coords", {0, 1}}}, {{"coords", {0, 1.01}}}}},
                                                {"c", 1},
                                                {"epsilon", 0.25}});
  CHECK(run("magic --config " + close) == 2);
}

TEST_CASE("norms and sweep") {
  const auto n = work().write("norms.json", {{"family", {{"kind", "tree"}, {"k", 3}}},
                                             {"R", 4},
                                             {"p_grid", {0.3}},
                                             {"q_list", {1.5}},
                                             {"estimators", {"norm_1", "norm_2", "norm_q"}},
                                             {"seed", 1}});
  REQUIRE(run("norms --config " + n, work().path("norms.csv")) == 0);
  CHECK(slurp(work().path("norms.csv")).rfind("quantity,q,p,value,residual,converged,n_samples,seed,window_R\n", 0) == 0);
  const auto s = work().write("sweep.json", {{"family", {{"kind", "tree"}, {"k", 3}}}, {"R", 3}, {"p_grid", {0.3, 0.4}}, {"seed", 1}});
  REQUIRE(run("sweep --config " + s, work().path("sweep.csv")) == 0);
  const auto csv = slurp(work().path("sweep.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("verify") {
  const auto out = work().path("verify.json");
  CHECK(run("verify oracles", out) == 0);
  CHECK(json::parse(slurp(out))["passed"] == true);
  CHECK(run("verify oracles --fault oracle-constant", out) == 1);
  const auto rep = json::parse(slurp(out));
  CHECK(rep["failed"][0] == "oracles.susceptibility_closed_vs_series");
  CHECK(run("verify nonsense") == 2);
  CHECK(run("verify oracles --fault nonsense") == 2);
}
