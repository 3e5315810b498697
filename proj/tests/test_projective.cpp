#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pkattract/error.hpp"
#include "pkattract/projective.hpp"
#include "pkattract/rng.hpp"

using namespace pkattract;

namespace {

ProjPoint random_point(Rng& rng, int m) {
  CVec c(static_cast<std::size_t>(m) + 1);
  for (auto& z : c) z = uniform_disc(rng, 1.0);
  return ProjPoint(c);
}

oracle::LVec widen(const ProjPoint& p) {
  oracle::LVec v;
  for (auto c : p.coords()) v.emplace_back(c.real(), c.imag());
  return v;
}

}  // namespace

TEST_CASE("normalize examples") {
  ProjPoint a = normalize(ProjPoint{2.0, 0.0});
  CHECK(a[0] == cplx(1.0));
  CHECK(a[1] == cplx(0.0));

  ProjPoint b = normalize(ProjPoint{cplx(1, 1), cplx(1, -1)});
  CHECK(b[0] == cplx(1.0));
  CHECK(std::abs(b[1] - cplx(0, -1)) < 1e-15);

  CHECK_THROWS_AS(normalize(ProjPoint{0.0, 0.0}), Error);
  try {
    normalize(ProjPoint{0.0, 0.0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroVector);
  }
}

TEST_CASE("normalize ties go to the lowest index") {
  ProjPoint p = normalize(ProjPoint{cplx(0, 3), 3.0, -3.0});
  CHECK(p.max_index() == 0);
  CHECK(p[0] == cplx(1.0));
}

TEST_CASE("normalize is idempotent and scale invariant") {
  Rng rng = make_stream(11, 0);
  for (int i = 0; i < 500; ++i) {
    ProjPoint p = random_point(rng, 3);
    ProjPoint n1 = normalize(p);
    CHECK(fs_distance(normalize(n1), n1) < 1e-12);
    cplx c = uniform_disc(rng, 10.0) + cplx(0.1, 0);
    CVec s = p.coords();
    for (auto& z : s) z *= c;
    ProjPoint n2 = normalize(ProjPoint(s));
    for (std::size_t j = 0; j < n1.size(); ++j) CHECK(std::abs(n1[j] - n2[j]) < 1e-12);
  }
}

TEST_CASE("fs_distance examples") {
  CHECK(fs_distance(ProjPoint{1.0, 0.0}, ProjPoint{0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  ProjPoint p{cplx(0.3, 0.1), cplx(-1, 2)};
  CHECK(fs_distance(p, p) == 0.0);
  CHECK(fs_distance(ProjPoint{1.0, 1.0}, ProjPoint{1.0, 0.0}) == doctest::Approx(0.70710678118654752).epsilon(1e-15));
  CHECK_THROWS_AS(fs_distance(ProjPoint{1.0, 0.0}, ProjPoint{1.0, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(fs_distance(ProjPoint{0.0, 0.0}, ProjPoint{1.0, 0.0}), Error);
}

TEST_CASE("fs_distance matches the inner-product formula and is a bounded metric") {
  Rng rng = make_stream(12, 0);
  for (int i = 0; i < 1000; ++i) {
    ProjPoint p = random_point(rng, 2), q = random_point(rng, 2), r = random_point(rng, 2);
    double d = fs_distance(p, q);
    CHECK(std::abs(d - static_cast<double>(oracle::fs_distance(widen(p), widen(q)))) < 1e-12);
    CHECK(d <= 1.0);
    CHECK(d == fs_distance(q, p));
    CHECK(fs_distance(p, r) <= d + fs_distance(q, r) + 1e-12);
  }
}

TEST_CASE("fs_distance keeps precision for nearby points") {
  ProjPoint p{1.0, 0.5};
  ProjPoint q{1.0, 0.5 + 1e-13};
  // Exact value: 1e-13 |p0|^2 / (|p||q|) ~ 8e-14.
  CHECK(fs_distance(p, q) == doctest::Approx(1e-13 / 1.25).epsilon(1e-6));
}

TEST_CASE("charts round-trip") {
  Rng rng = make_stream(13, 0);
  for (int i = 0; i < 200; ++i) {
    ProjPoint p = random_point(rng, 3);
    ChartCoords c = to_chart(p);
    CHECK(c.chart_index == normalize(p).max_index());
    CHECK(c.values.size() == 3);
    CHECK(fs_distance(from_chart(c), p) < 1e-14);
    ChartCoords c0 = to_chart(p, 0);
    CHECK(fs_distance(from_chart(c0), p) < 1e-13);
  }
  CHECK_THROWS_AS(to_chart(ProjPoint{0.0, 1.0}, 0), Error);
}

TEST_CASE("embed and project") {
  ProjPoint e = embed_pi(ProjPoint{1.0, 1.0});
  CHECK(e.size() == 3);
  CHECK(e[2] == cplx(0.0));
  CHECK(embed_pi(ProjPoint{1.0, 0.0, 0.0}).size() == 4);
  CHECK(proj_equal(project_pi(ProjPoint{1.0, 1.0, 0.01}), ProjPoint{1.0, 1.0}));
  try {
    project_pi(ProjPoint{0.0, 0.0, 1.0});
    FAIL("expected ProjectionUndefined");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProjectionUndefined);
  }
  Rng rng = make_stream(14, 0);
  for (int i = 0; i < 1000; ++i) {
    ProjPoint q = random_point(rng, 2);
    CHECK(fs_distance(project_pi(embed_pi(q)), q) < 1e-15);
  }
}
