#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pkattract/error.hpp"
#include "pkattract/trapping.hpp"

using namespace pkattract;

namespace {

const cplx kLam{0.01, 0.0};

ProjPoint random_base(Rng& rng, int k) {
  CVec c(static_cast<std::size_t>(k));
  for (auto& z : c) z = uniform_disc(rng, 1.0);
  return normalize(ProjPoint(c));
}

}  // namespace

TEST_CASE("default_rho") {
  CHECK(default_rho(kLam) == doctest::Approx(0.044721360).epsilon(1e-8));
  double r = default_rho(0.01);
  CHECK(0.02 < r);
  CHECK(r < 0.1);
  double r24 = default_rho(0.24);
  CHECK(2 * 0.24 < r24);
  CHECK(r24 < std::sqrt(0.24));
  CHECK_NOTHROW(Params::with_default_rho(2, 0.24));
  try {
    default_rho(0.0);
    FAIL("expected LambdaOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LambdaOutOfRange);
  }
  CHECK_THROWS_AS(default_rho(0.25), Error);
}

TEST_CASE("in_trap") {
  Params prm = Params::with_default_rho(2, kLam);
  CHECK(in_trap(prm, ProjPoint{1.0, 1.0, 0.03}).inside);
  CHECK(in_trap(prm, ProjPoint{1.0, 1.0, 0.03}).margin == doctest::Approx(prm.rho - 0.03));
  CHECK_FALSE(in_trap(prm, ProjPoint{1.0, 1.0, 0.05}).inside);
  Rng rng = make_stream(1, 0);
  for (int i = 0; i < 100; ++i) CHECK(in_trap(prm, embed_pi(random_base(rng, 2))).inside);
}

TEST_CASE("trap forward check") {
  Params p2 = Params::with_default_rho(2, kLam);
  TrapReport r = trap_forward_check(p2, 100000, 42);
  CHECK(r.samples == 100000);
  CHECK(r.violations == 0);
  CHECK(r.max_image_ratio < 0.02);
  CHECK(r.margin > 0.0);

  Params p3 = Params::with_default_rho(3, 0.005);
  TrapReport r3 = trap_forward_check(p3, 100000, 43);
  CHECK(r3.violations == 0);
  CHECK(r3.max_image_ratio < 0.01);

  CHECK_THROWS_AS(Params::make(2, kLam, 3.0 * 0.01 * 20.0), Error);
}

TEST_CASE("trap check is independent of the worker count") {
  Params prm = Params::with_default_rho(2, kLam);
  TrapReport a = trap_forward_check(prm, 5000, 7, 1);
  TrapReport b = trap_forward_check(prm, 5000, 7, 3);
  CHECK(a.max_image_ratio == b.max_image_ratio);
}

TEST_CASE("fiber contraction at the fixed base point") {
  Params prm = Params::with_default_rho(2, kLam);
  auto d = fiber_contraction(prm, ProjPoint{1.0, 1.0}, 8);
  REQUIRE(d.size() == 8);
  const double target = 2.0 * std::abs(t_fixed(kLam));
  for (int m = 3; m < 7; ++m) CHECK(d[m] / d[m - 1] == doctest::Approx(target).epsilon(0.02));
  CHECK(d.back() < d.front());

  auto one = fiber_contraction(prm, ProjPoint{1.0, 1.0}, 1);
  REQUIRE(one.size() == 1);
  const double diam_v = fs_distance(ProjPoint{1.0, 1.0, prm.rho}, ProjPoint{1.0, 1.0, -prm.rho});
  CHECK(one[0] > 0.0);
  CHECK(one[0] < diam_v);
}

TEST_CASE("fiber contraction is uniform in the base point") {
  Params prm = Params::with_default_rho(2, kLam);
  Rng rng = make_stream(2, 0);
  double worst = 0.0, lo1 = 1.0, hi1 = 0.0, lo5 = 1.0, hi5 = 0.0;
  for (int i = 0; i < 100; ++i) {
    ProjPoint a = random_base(rng, 2);
    auto d = fiber_contraction(prm, a, 30);
    worst = std::max(worst, d.back());
    lo1 = std::min(lo1, d[0]);
    hi1 = std::max(hi1, d[0]);
    // geometric mean contraction per step over the first five steps
    double rate = std::pow(d[4] / d[0], 0.25);
    lo5 = std::min(lo5, rate);
    hi5 = std::max(hi5, rate);
  }
  CHECK(worst < 1e-8);
  CHECK(hi1 / lo1 < 10.0);
  CHECK(hi5 / lo5 < 10.0);
}

TEST_CASE("phi_lambda") {
  Params prm = Params::with_default_rho(2, kLam);
  Prehistory fixed;
  fixed.points.assign(41, ProjPoint{1.0, 1.0});
  PhiResult r = phi_lambda(prm, fixed);
  CHECK(fs_distance(r.point, p_lambda(2, kLam)) < 1e-10);
  CHECK(r.depth_used == 40);
  CHECK(in_trap(prm, r.point).inside);

  Prehistory zero;
  zero.points = {ProjPoint{1.0, 0.5}};
  PhiResult z = phi_lambda(prm, zero);
  CHECK(fs_distance(z.point, embed_pi(ProjPoint{1.0, 0.5})) == 0.0);

  Prehistory bad;
  bad.points = {ProjPoint{1.0, 0.5}, ProjPoint{1.0, 0.3}};
  try {
    phi_lambda(prm, bad);
    FAIL("expected InvalidPrehistory");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPrehistory);
  }
}

TEST_CASE("phi_lambda agrees with direct forward iteration") {
  for (int k : {2, 3}) {
    Params prm = Params::with_default_rho(k, kLam);
    Rng rng = make_stream(3, k);
    for (int i = 0; i < 20; ++i) {
      Prehistory a = sample_prehistory(k, random_base(rng, k), 12, rng);
      ProjPoint direct = FLambdaMap(k, kLam).iterate(embed_pi(a.at(12)), 12);
      // Forward iteration amplifies base rounding, the fiber-only path does not.
      CHECK(fs_distance(direct, phi_lambda(prm, a).point) < 1e-9);
    }
  }
}

TEST_CASE("phi_lambda commuting square and Cauchy property") {
  Rng rng = make_stream(4, 0);
  for (int k : {2, 3}) {
    Params prm = Params::with_default_rho(k, kLam);
    FLambdaMap f(k, kLam);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      Prehistory a = sample_prehistory(k, random_base(rng, k), 45, rng);
      Prehistory a40 = truncate(a, 40);
      PhiResult r = phi_lambda(prm, a40);
      PhiResult s = phi_lambda(prm, lift_map(k, a40));
      worst = std::max(worst, fs_distance(f.apply(r.point), s.point));
      CHECK(in_trap(prm, r.point).inside);
      CHECK(fs_distance(project_pi(r.point), a.at(0)) < 1e-12);

      Prehistory a10 = truncate(a, 10), a15 = truncate(a, 15);
      PhiResult r10 = phi_lambda(prm, a10);
      CHECK(fs_distance(r10.point, phi_lambda(prm, a15).point) <= r10.error_bound + 1e-15);
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("phi_lambda early stop") {
  Params prm = Params::with_default_rho(2, kLam);
  Rng rng = make_stream(5, 0);
  Prehistory a = sample_prehistory(2, random_base(rng, 2), 40, rng);
  PhiOptions opt;
  opt.early_stop = true;
  PhiResult e = phi_lambda(prm, a, opt);
  PhiResult full = phi_lambda(prm, a);
  CHECK(e.depth_used < 40);
  CHECK(fs_distance(e.point, full.point) < 1e-12);
}

TEST_CASE("forward attractor sampling") {
  Params prm = Params::with_default_rho(2, kLam);
  Cloud c = sample_attractor_forward(prm, 30, 4096, 9);
  CHECK(c.size() == 4096);
  double wsum = 0.0;
  for (double w : c.weights) wsum += w;
  CHECK(std::abs(wsum - 1.0) < 1e-12);
  for (const auto& p : c.points) CHECK(in_trap(prm, p).inside);
  CHECK_THROWS_AS(sample_attractor_forward(prm, 10, 10, 1), Error);

  auto orbit = iterate_orbit(prm, p_lambda(2, kLam), 10);
  for (const auto& p : orbit) CHECK(fs_distance(p, p_lambda(2, kLam)) < 1e-12);

  Cloud c1 = sample_attractor_forward(prm, 30, 3000, 9, 1);
  Cloud c3 = sample_attractor_forward(prm, 30, 3000, 9, 3);
  for (std::size_t i = 0; i < c1.size(); ++i) CHECK(fs_distance(c1.points[i], c3.points[i]) == 0.0);
}

TEST_CASE("forward samples match phi_lambda of their own base orbit") {
  // Two constructions of K_lambda: the forward orbit x_N = f^N(x_0) and the
  // nested-fiber point over the prehistory (pi x_N, ..., pi x_0).
  Params prm = Params::with_default_rho(2, kLam);
  FLambdaMap f(2, kLam);
  Rng rng = make_stream(10, 0);
  for (int i = 0; i < 100; ++i) {
    std::vector<ProjPoint> orbit{sample_trap_point(prm, rng)};
    for (int s = 0; s < 40; ++s) orbit.push_back(f.apply(orbit.back()));
    Prehistory a;
    for (int s = 40; s >= 0; --s) a.points.push_back(project_pi(orbit[static_cast<std::size_t>(s)]));
    CHECK(fs_distance(phi_lambda(prm, a).point, orbit.back()) < 1e-6);
  }
}
