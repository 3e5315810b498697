#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pkattract/error.hpp"
#include "pkattract/io.hpp"

using namespace pkattract;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "pkattract_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Usage;
}

}  // namespace

TEST_CASE("single point round-trips exactly") {
  Cloud c;
  c.dim = 2;
  c.points.push_back(ProjPoint{1.0, 1.0, 0.01});
  c.weights.push_back(1.0);
  auto path = scratch("one.csv");
  write_cloud_csv(c, path.string());
  std::string text = slurp(path);
  CHECK(text == "dim,weight,c0_re,c0_im,c1_re,c1_im,c2_re,c2_im\n2,1,1,0,1,0,0.01,0\n");
  Cloud back = read_cloud_csv(path.string());
  REQUIRE(back.size() == 1);
  CHECK(back.dim == 2);
  CHECK(back.weights[0] == 1.0);
  CHECK(back.points[0].coords() == c.points[0].coords());
}

TEST_CASE("large cloud round-trip has zero drift") {
  Rng rng = make_stream(11, 0);
  Cloud c;
  c.dim = 3;
  for (int i = 0; i < 100000; ++i) {
    CVec v(4);
    for (auto& z : v) z = uniform_disc(rng, 3.0);
    c.points.push_back(normalize(ProjPoint(std::move(v))));
    c.weights.push_back(uniform01(rng));
  }
  auto path = scratch("big.csv");
  write_cloud_csv(c, path.string());
  Cloud back = read_cloud_csv(path.string());
  REQUIRE(back.size() == c.size());
  double drift = 0.0;
  bool bitwise = true;
  for (std::size_t i = 0; i < c.size(); ++i) {
    drift = std::max(drift, fs_distance(c.points[i], back.points[i]));
    bitwise = bitwise && c.points[i].coords() == back.points[i].coords() && c.weights[i] == back.weights[i];
  }
  CHECK(drift == 0.0);
  CHECK(bitwise);
  // writing what was read gives the same bytes
  auto again = scratch("big2.csv");
  write_cloud_csv(back, again.string());
  CHECK(fnv1a_file(path.string()) == fnv1a_file(again.string()));
}

TEST_CASE("rows are written in normalized form") {
  Cloud c = Cloud::uniform(1, {ProjPoint{cplx(0, 2), cplx(4, 0)}});
  auto path = scratch("norm.csv");
  write_cloud_csv(c, path.string());
  Cloud back = read_cloud_csv(path.string());
  CHECK(back.points[0][1] == cplx(1.0));
  CHECK(back.points[0][0] == cplx(0.0, 0.5));
}

TEST_CASE("malformed rows carry their line number") {
  auto path = scratch("bad.csv");
  spit(path, "dim,weight,c0_re,c0_im,c1_re,c1_im\n1,1,1,0,0,0\n1,1,0,0,0,0\n");
  try {
    read_cloud_csv(path.string());
    FAIL("expected MalformedRow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedRow);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  spit(path, "dim,weight,c0_re,c0_im,c1_re,c1_im\n1,1,1,0,0\n");
  CHECK(code_of([&] { read_cloud_csv(path.string()); }) == ErrorCode::MalformedRow);
  spit(path, "dim,weight,c0_re,c0_im,c1_re,c1_im\n1,1,1,x,0,0\n");
  CHECK(code_of([&] { read_cloud_csv(path.string()); }) == ErrorCode::MalformedRow);
  spit(path, "dim,weight,c0_re,c0_im,c1_re,c1_im\n2,1,1,0,0,0\n");
  CHECK(code_of([&] { read_cloud_csv(path.string()); }) == ErrorCode::MalformedRow);
  spit(path, "x,y\n");
  CHECK(code_of([&] { read_cloud_csv(path.string()); }) == ErrorCode::MalformedRow);
}

TEST_CASE("single atom at the window center fills one cell") {
  Cloud c = Cloud::uniform(2, {ProjPoint{0.25, 1.0, 0.01}});
  HistogramWindow w;
  w.chart = 1;
  w.x = {0, false, -0.5, 1.0};
  w.y = {2, false, -0.02, 0.04};
  w.nx = 64;
  w.ny = 48;
  HistogramSummary s;
  auto grid = histogram_counts(c, w, &s);
  CHECK(s.in_window == 1);
  CHECK(s.nonzero_cells == 1);
  CHECK(s.out_of_window == 0);
  CHECK_FALSE(s.empty_window);
  CHECK(grid.size() == 48);
  CHECK(grid[0].size() == 64);
}

TEST_CASE("histogram conserves mass and files agree") {
  Rng rng = make_stream(5, 0);
  std::vector<ProjPoint> pts;
  for (int i = 0; i < 5000; ++i) pts.push_back(ProjPoint{uniform_disc(rng, 1.5), 1.0, uniform_disc(rng, 0.05)});
  pts.push_back(ProjPoint{1.0, 0.0, 0.0});  // chart 1 undefined
  Cloud c = Cloud::uniform(2, std::move(pts));
  HistogramWindow w;
  w.chart = 1;
  w.x = {0, false, -1.0, 1.0};
  w.y = {2, true, -0.02, 0.04};
  w.nx = 40;
  w.ny = 30;
  auto prefix = scratch("hist").string();
  HistogramSummary s = write_histogram(c, w, prefix);
  CHECK(s.in_window + s.out_of_window == c.size());
  CHECK(s.out_of_window >= 1);
  CHECK(s.nonzero_cells > 10);

  std::stringstream counts(slurp(prefix + ".counts.csv"));
  std::size_t total = 0, rows = 0;
  std::string line;
  while (std::getline(counts, line)) {
    ++rows;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) total += std::stoul(cell);
  }
  CHECK(rows == 30);
  CHECK(total == s.in_window);

  std::stringstream pgm(slurp(prefix + ".pgm"));
  std::string magic;
  int nx = 0, ny = 0, maxv = 0;
  pgm >> magic >> nx >> ny >> maxv;
  CHECK(magic == "P2");
  CHECK(nx == 40);
  CHECK(ny == 30);
  CHECK(maxv == 255);
  int v = 0, n = 0, top = 0, nonzero = 0;
  while (pgm >> v) {
    ++n;
    top = std::max(top, v);
    if (v) ++nonzero;
  }
  CHECK(n == 40 * 30);
  CHECK(top == 255);
  CHECK(static_cast<std::size_t>(nonzero) == s.nonzero_cells);
}

TEST_CASE("window far from the cloud is flagged") {
  Cloud c = Cloud::uniform(1, {ProjPoint{0.1, 1.0}, ProjPoint{0.2, 1.0}});
  HistogramWindow w;
  w.chart = 1;
  w.x = {0, false, 5.0, 6.0};
  w.y = {0, true, -1.0, 1.0};
  HistogramSummary s;
  histogram_counts(c, w, &s);
  CHECK(s.empty_window);
  CHECK(s.in_window == 0);
  CHECK(s.out_of_window == 2);
}

TEST_CASE("histogram argument checks") {
  Cloud c = Cloud::uniform(1, {ProjPoint{0.1, 1.0}});
  HistogramWindow w;
  w.chart = 1;
  w.x = {0, false, -1, 1};
  w.y = {0, true, -1, 1};
  w.nx = 4097;
  CHECK(code_of([&] { histogram_counts(c, w); }) == ErrorCode::InvalidParams);
  w.nx = 16;
  w.x.coord = 1;
  CHECK(code_of([&] { histogram_counts(c, w); }) == ErrorCode::InvalidParams);
  w.x.coord = 5;
  CHECK(code_of([&] { histogram_counts(c, w); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("fnv1a matches published vectors") {
  auto p = scratch("fnv.txt");
  spit(p, "");
  CHECK(fnv1a_file(p.string()) == "cbf29ce484222325");
  spit(p, "a");
  CHECK(fnv1a_file(p.string()) == "af63dc4c8601ec8c");
  spit(p, "foobar");
  CHECK(fnv1a_file(p.string()) == "85944171f73967e8");
}

TEST_CASE("manifest JSON carries parameters and hashes") {
  auto art = scratch("art.txt");
  spit(art, "a");
  RunManifest m;
  m.command = "attractor";
  m.argv = {"attractor", "--seed", "7"};
  m.k = 3;
  m.lambda_re = 0.01;
  m.rho = 0.0447;
  m.seed = 7;
  m.workers = 2;
  m.sizes["samples"] = 100;
  m.add_artifact(art.string());
  auto j = nlohmann::json::parse(m.to_json());
  CHECK(j["command"] == "attractor");
  CHECK(j["params"]["k"] == 3);
  CHECK(j["params"]["lambda_re"] == 0.01);
  CHECK(j["seed"] == 7);
  CHECK(j["worker_count"] == 2);
  CHECK(j["sizes"]["samples"] == 100);
  CHECK(j["artifacts"][art.string()] == "af63dc4c8601ec8c");
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(m.to_json() == m.to_json());
}
