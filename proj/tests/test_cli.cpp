#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pkattract/cli.hpp"
#include "pkattract/io.hpp"
#include "pkattract/trapping.hpp"

using namespace pkattract;
namespace fs = std::filesystem;

namespace {

std::string scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "pkattract_test_cli";
  fs::create_directories(dir);
  return (dir / name).string();
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream is(path);
  return nlohmann::json::parse(is);
}

std::string slurp(const std::string& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("verify at the default parameters passes") {
  auto out = scratch("verify.json");
  CHECK(run_command({"verify", "--k", "2", "--lambda-re", "0.01", "--seed", "7", "--out", out}) == kExitOk);
  auto j = read_json(out);
  REQUIRE(j.size() >= 6);
  for (const auto& r : j) CHECK_MESSAGE(r["passed"].get<bool>(), r["lemma_id"]);
  auto m = read_json(out + ".manifest.json");
  CHECK(m["command"] == "verify");
  CHECK(m["seed"] == 7);
  CHECK(m["artifacts"][out] == fnv1a_file(out));
}

TEST_CASE("out-of-range lambda is a usage error") {
  CHECK(run_command({"green", "--lambda-re", "0.3", "--out", scratch("g.csv")}) == kExitUsage);
  CHECK(run_command({"green", "--lambda-re", "0", "--out", scratch("g.csv")}) == kExitUsage);
  CHECK(run_command({"attractor", "--lambda-re", "0.01", "--rho", "0.5", "--out", scratch("a.csv")}) == kExitUsage);
}

TEST_CASE("malformed command lines are usage errors") {
  CHECK(run_command({}) == kExitUsage);
  CHECK(run_command({"frobnicate"}) == kExitUsage);
  CHECK(run_command({"verify", "--lambda-re", "abc"}) == kExitUsage);
  CHECK(run_command({"verify", "--k", "1"}) == kExitUsage);
  CHECK(run_command({"iterate", "--start", "1,0,2", "--out", scratch("o.csv")}) == kExitUsage);
  CHECK(run_command({"render", "--x", "0:re:1", "--out", scratch("r")}) == kExitUsage);
}

TEST_CASE("attractor writes the requested samples, all trapped, reproducibly") {
  auto out = scratch("cloud.csv");
  REQUIRE(run_command({"attractor", "--k", "2", "--lambda-re", "0.01", "--samples", "100000", "--seed", "7", "--out",
                       out}) == kExitOk);
  Cloud c = read_cloud_csv(out);
  CHECK(c.size() == 100000);
  Params p = Params::with_default_rho(2, {0.01, 0.0});
  std::size_t outside = 0;
  for (const auto& x : c.points)
    if (!in_trap(p, x).inside) ++outside;
  CHECK(outside == 0);

  auto manifest = slurp(out + ".manifest.json");
  auto again = scratch("cloud2.csv");
  REQUIRE(run_command({"attractor", "--k", "2", "--lambda-re", "0.01", "--samples", "100000", "--seed", "7", "--out",
                       again, "--workers", "3"}) == kExitOk);
  CHECK(fnv1a_file(out) == fnv1a_file(again));
  CHECK(read_json(out + ".manifest.json")["artifacts"][out] == fnv1a_file(again));
  CHECK(manifest == slurp(out + ".manifest.json"));
}

TEST_CASE("small runs of the other subcommands") {
  CHECK(run_command({"iterate", "--map", "base", "--steps", "20", "--start", "1,0,0.3,0.1", "--out",
                     scratch("orbit.csv")}) == kExitOk);
  CHECK(read_cloud_csv(scratch("orbit.csv")).size() == 21);
  CHECK(run_command({"iterate", "--map", "g_lambda", "--k", "3", "--steps", "5", "--out", scratch("g.csv")}) ==
        kExitOk);

  CHECK(run_command({"green", "--samples", "50", "--out", scratch("green.csv")}) == kExitOk);

  CHECK(run_command({"preimages", "--map", "f_lambda", "--depth", "2", "--out", scratch("pre.csv")}) == kExitOk);
  CHECK(read_cloud_csv(scratch("pre.csv")).size() == 16);
  CHECK(run_command({"preimages", "--map", "base", "--k", "3", "--depth", "3", "--out", scratch("preb.csv")}) ==
        kExitOk);

  CHECK(run_command({"periodic", "--n", "5", "--out", scratch("per.csv")}) == kExitOk);
  CHECK(read_cloud_csv(scratch("per.csv")).size() == 33);
  CHECK(run_command({"periodic", "--n", "3", "--map", "f_lambda", "--out", scratch("perl.csv")}) == kExitOk);

  CHECK(run_command({"lyapunov", "--orbits", "4", "--length", "200", "--out", scratch("ly.json")}) == kExitOk);
  auto ly = read_json(scratch("ly.json"));
  CHECK(ly["exponents"].size() == 2);
  CHECK(ly["exponents"][0].get<double>() > 0.2);

  CHECK(run_command({"entropy", "--method", "periodic", "--n-max", "8", "--out", scratch("ent.json")}) == kExitOk);
  CHECK(std::abs(read_json(scratch("ent.json"))["slope"].get<double>() - std::log(2.0)) < 0.01);
  CHECK(run_command({"entropy", "--method", "spanning", "--samples", "500", "--n-max", "5", "--out",
                     scratch("span.json")}) == kExitOk);
  CHECK(run_command({"entropy", "--method", "bk", "--map", "base", "--samples", "2000", "--n-max", "4", "--eps",
                     "0.2", "--out", scratch("bk.json")}) == kExitOk);

  CHECK(run_command({"mixing", "--samples", "2000", "--n-max", "3", "--trials", "50", "--out", scratch("mix.json")}) ==
        kExitOk);
  CHECK(read_json(scratch("mix.json"))["correlations"].size() == 4);
}

TEST_CASE("render shows the attractor slice in the (u, s) chart") {
  auto prefix = scratch("slice");
  REQUIRE(run_command({"render", "--samples", "4000", "--nx", "64", "--ny", "64", "--out", prefix}) == kExitOk);
  auto m = read_json(prefix + ".manifest.json");
  const long long in = m["sizes"]["in_window"], out = m["sizes"]["out_of_window"];
  CHECK(in + out == m["sizes"]["points"].get<long long>());
  CHECK(in > 0);
  std::stringstream counts(slurp(prefix + ".counts.csv"));
  std::string line, cell;
  int nonzero = 0;
  long long total = 0;
  while (std::getline(counts, line)) {
    std::stringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      long long v = std::stoll(cell);
      total += v;
      nonzero += v > 0;
    }
  }
  CHECK(total == in);
  CHECK(nonzero > 20);

  // rendering a saved cloud
  auto cloud = scratch("rcloud.csv");
  REQUIRE(run_command({"attractor", "--samples", "2000", "--out", cloud}) == kExitOk);
  CHECK(run_command({"render", "--in", cloud, "--chart", "0", "--x", "1:re:-2:2", "--y", "2:re:-0.05:0.05", "--out",
                     scratch("r2")}) == kExitOk);
}
