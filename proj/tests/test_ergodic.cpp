#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pkattract/ergodic.hpp"
#include "pkattract/error.hpp"
#include "pkattract/green.hpp"
#include "pkattract/trapping.hpp"

using namespace pkattract;

namespace {

using lcplx = std::complex<long double>;
using LPoly = std::vector<lcplx>;  // coefficient i multiplies z0^{D-i} z1^i

LPoly mul(const LPoly& a, const LPoly& b) {
  LPoly c(a.size() + b.size() - 1, 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

LPoly sub(LPoly a, const LPoly& b) {
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return a;
}

// F^n(z) ^ z for the k = 2 base map [z0 : z1] -> [(z0 - 2 z1)^2 : z0^2], by
// expanding the homogeneous components symbolically.
LPoly periodic_polynomial(int n) {
  LPoly A{1.0L, 0.0L}, B{0.0L, 1.0L};  // z0, z1
  for (int i = 0; i < n; ++i) {
    LPoly d = sub(A, mul({2.0L}, B));
    LPoly nA = mul(d, d);
    LPoly nB = mul(A, A);
    A = std::move(nA);
    B = std::move(nB);
  }
  // A z1 - B z0, both of degree 2^n + 1.
  LPoly z0{1.0L, 0.0L}, z1{0.0L, 1.0L};
  return sub(mul(A, z1), mul(B, z0));
}

// Value relative to the sum of absolute terms, at a max-modulus-1 point.
long double relative_residual(const LPoly& p, const ProjPoint& x) {
  ProjPoint q = normalize(x);
  const lcplx z0(q[0].real(), q[0].imag()), z1(q[1].real(), q[1].imag());
  const int D = static_cast<int>(p.size()) - 1;
  lcplx v = 0;
  long double scale = 0;
  for (int i = 0; i <= D; ++i) {
    lcplx term = p[i] * std::pow(z0, D - i) * std::pow(z1, i);
    v += term;
    scale += std::abs(term);
  }
  return std::abs(v) / scale;
}

double min_gap(const std::vector<ProjPoint>& pts) {
  double g = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) g = std::min(g, fs_distance(pts[i], pts[j]));
  return g;
}

const Params kParams = Params::with_default_rho(2, cplx(0.01, 0.0));

}  // namespace

TEST_CASE("lefschetz counts") {
  for (int n = 1; n <= 10; ++n) CHECK(lefschetz_count(2, 1, n) == (1LL << n) + 1);
  CHECK(lefschetz_count(2, 2, 1) == 7);
  CHECK(lefschetz_count(2, 2, 3) == 73);
}

TEST_CASE("base fixed points are 1 and +-i/2 in the chart z1/z0") {
  PeriodicSet s = periodic_points_base(2, 1);
  REQUIRE(s.points.size() == 3);
  CHECK_FALSE(s.incomplete);
  const cplx expected[] = {1.0, cplx(0, 0.5), cplx(0, -0.5)};
  for (cplx e : expected) {
    ProjPoint target({1.0, e});
    double best = 1.0;
    for (const auto& p : s.points) best = std::min(best, fs_distance(p, target));
    CHECK(best < 1e-12);
  }
}

TEST_CASE("periodic counts equal 2^n + 1 through n = 10") {
  for (int n = 1; n <= 10; ++n) {
    PeriodicSet s = periodic_points_base(2, n);
    CAPTURE(n);
    CHECK(s.points.size() == static_cast<std::size_t>((1 << n) + 1));
    CHECK_FALSE(s.incomplete);
    REQUIRE(s.expected_count.has_value());
    CHECK(*s.expected_count == (1LL << n) + 1);
    for (double r : s.residuals) CHECK(r < 1e-9);
    if (n <= 8) CHECK(min_gap(s.points) > 1e-6);
  }
}

TEST_CASE("brute-force polynomial oracle agrees with the multi-start search") {
  for (int n = 1; n <= 6; ++n) {
    LPoly p = periodic_polynomial(n);
    CHECK(p.size() == static_cast<std::size_t>((1 << n) + 2));
    PeriodicSet s = periodic_points_base(2, n);
    // Distinct roots, as many as the degree: these are all of them.
    CHECK(s.points.size() == p.size() - 1);
    for (const auto& x : s.points) CHECK(relative_residual(p, x) < 1e-12L);
  }
  // Small n: companion-matrix roots in the chart z0 = 1 match point for point.
  for (int n = 1; n <= 4; ++n) {
    LPoly p = periodic_polynomial(n);
    const int D = static_cast<int>(p.size()) - 1;
    REQUIRE(std::abs(p[D]) > 0.0L);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(D, D);
    for (int i = 1; i < D; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < D; ++i) {
      lcplx c = -p[i] / p[D];
      C(i, D - 1) = cplx(static_cast<double>(c.real()), static_cast<double>(c.imag()));
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C);
    PeriodicSet s = periodic_points_base(2, n);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      ProjPoint r({1.0, es.eigenvalues()(i)});
      double best = 1.0;
      for (const auto& q : s.points) best = std::min(best, fs_distance(q, r));
      CHECK(best < 1e-8);
    }
  }
}

TEST_CASE("k = 3 fixed points are complete") {
  PeriodicSet s = periodic_points_base(3, 1);
  CHECK(s.points.size() == 7);
  CHECK_FALSE(s.incomplete);
}

TEST_CASE("periodic_in_attractor") {
  SUBCASE("constant base point lifts to p_lambda") {
    AttractorPeriodic a = periodic_in_attractor(kParams, ProjPoint({1.0, 1.0}), 1);
    CHECK(fs_distance(a.point, p_lambda(2, kParams.lambda)) < 1e-12);
  }
  SUBCASE("fixed point at i/2") {
    AttractorPeriodic a = periodic_in_attractor(kParams, ProjPoint({1.0, cplx(0, 0.5)}), 1);
    CHECK(a.residual < 1e-10);
    CHECK(in_trap(kParams, a.point).inside);
  }
  SUBCASE("every base cycle of period 4 lifts to an f_lambda cycle") {
    PeriodicSet s = periodic_points_base(2, 4);
    FLambdaMap f(2, kParams.lambda);
    for (const auto& x : s.points) {
      AttractorPeriodic a = periodic_in_attractor(kParams, x, 4);
      CHECK(fs_distance(f.iterate(a.point, 4), a.point) < 1e-10);
      CHECK(fs_distance(project_pi(a.point), x) < 1e-12);
    }
  }
  SUBCASE("non-periodic base point is rejected") {
    CHECK_THROWS_AS(periodic_in_attractor(kParams, ProjPoint({1.0, cplx(0.3, 0.1)}), 2), Error);
  }
}

TEST_CASE("entropy from periodic growth") {
  std::vector<std::pair<int, double>> flat, p1, p2;
  for (int n = 1; n <= 10; ++n) {
    flat.emplace_back(n, 5.0);
    p1.emplace_back(n, std::ldexp(1.0, n) + 1.0);
    p2.emplace_back(n, std::ldexp(1.0, 2 * n) + std::ldexp(1.0, n) + 1.0);
  }
  CHECK(std::abs(entropy_from_periodic_growth(flat)) < 1e-12);
  CHECK(std::abs(entropy_from_periodic_growth(p1) - std::numbers::ln2) < 0.01);
  CHECK(std::abs(entropy_from_periodic_growth(p2) - 2.0 * std::numbers::ln2) < 0.01);
  try {
    entropy_from_periodic_growth({{1, 3.0}, {2, 5.0}});
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }
}

TEST_CASE("identity map: no orbit separation") {
  Cloud c = sample_mu0(2, 20, 4000, 3);
  IdentityMap id(1);
  OrbitBundle ob = make_orbits(id, c.points, 8);
  SpanningReport r = topological_entropy_estimate(ob, {1, 2, 3, 4, 5, 6, 7, 8}, {0.2, 0.1});
  for (double s : r.slopes) CHECK(std::abs(s) < 1e-12);
  SensitivityReport sr = sensitivity_probe(
      id, [&](Rng& g) { return c.points[g() % c.size()]; }, 1e-3, 50, 200, 4);
  CHECK(sr.separated_fraction == 0.0);
}

TEST_CASE("base map separates nearby orbits") {
  Cloud c = sample_mu0(2, 20, 2000, 5);
  SensitivityReport sr = sensitivity_probe(
      BaseMap(2), [&](Rng& g) { return c.points[g() % c.size()]; }, 1e-3, 60, 300, 6);
  CHECK(sr.separated_fraction > 0.99);
}

TEST_CASE("Brin-Katok on an atom is zero") {
  ProjPoint fixed({1.0, 1.0});
  Cloud atom = Cloud::uniform(1, std::vector<ProjPoint>(50, fixed));
  BrinKatokReport r = brin_katok_entropy(atom, BaseMap(2), 6, 0.1, 20, 1);
  CHECK(r.plain == doctest::Approx(0.0));
  CHECK(r.differenced == doctest::Approx(0.0));
  CHECK(r.empty_balls == 0);
}

TEST_CASE("Brin-Katok rejects bad windows") {
  Cloud c = sample_mu0(2, 20, 100, 1);
  CHECK_THROWS_AS(brin_katok_entropy(c, BaseMap(2), 3, 0.1, 5, 1, 3), Error);
}

TEST_CASE("Lyapunov exponent of z^2 on the unit circle") {
  QuadraticMap sq(cplx(0.0, 0.0));
  auto sampler = [](Rng& g) { return ProjPoint({uniform_circle(g, 1.0), 1.0}); };
  auto onto_circle = [](const ProjPoint& p) {
    ProjPoint q = normalize(p);
    cplx z = q[0] / q[1];
    return ProjPoint({z / std::abs(z), 1.0});
  };
  LyapunovReport r = lyapunov_exponents(sq, sampler, 400, 20, 7, 1, onto_circle);
  REQUIRE(r.exponents.size() == 1);
  CHECK(std::abs(r.exponents[0] - std::numbers::ln2) < 2.0 * r.standard_errors[0] + 1e-9);
}

TEST_CASE("Lyapunov exponents at p_lambda are log 4 and log|2 t_lambda|") {
  FLambdaMap f(2, kParams.lambda);
  const double e0 = std::log(4.0), e1 = std::log(std::abs(2.0 * t_fixed(kParams.lambda)));
  // The initial frame is not the eigenframe; that costs O(1) once, so the
  // error decays like 1/L.
  double prev = 1.0;
  for (int L : {200, 2000, 20000}) {
    LyapunovReport r = lyapunov_from_starts(f, {p_lambda(2, kParams.lambda)}, L);
    REQUIRE(r.exponents.size() == 2);
    double err = std::max(std::abs(r.exponents[0] - e0), std::abs(r.exponents[1] - e1));
    CAPTURE(L);
    CHECK(err < 2.0 / L);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("lifted orbits carry the base exponent") {
  auto hist = sample_history_mu0(2, 4, 40, 11);
  LyapunovReport lifted = lyapunov_lifted(2, hist, 2000);
  std::vector<ProjPoint> heads;
  for (const auto& h : hist) heads.push_back(h.head());
  LyapunovReport base = lyapunov_from_starts(BaseMap(2), heads, 2000);
  CHECK(lifted.exponents[0] == doctest::Approx(base.exponents[0]).epsilon(1e-12));
  CHECK(std::abs(base.exponents[0] - 0.5 * std::numbers::ln2) < 3.0 * base.standard_errors[0] + 0.01);
}

TEST_CASE("correlation sanity") {
  Cloud c = sample_mu0(2, 20, 20000, 13);
  BaseMap f(2);
  Observable one = [](const ProjPoint&) { return 1.0; };
  Observable bump = chart_bump(0, CVec{0.5}, 0.3);
  CHECK(std::abs(correlation(c, f, one, bump, 3).value) < 1e-12);
  CorrelationEstimate v = correlation(c, f, bump, bump, 0);
  CHECK(v.value >= 0.0);
  CHECK(v.value > 0.0);
}

TEST_CASE("chart bump shape") {
  Observable b = chart_bump(0, CVec{0.0}, 0.3);
  CHECK(b(ProjPoint({1.0, 0.0})) == doctest::Approx(1.0));
  CHECK(b(ProjPoint({1.0, 0.3})) == doctest::Approx(0.0));
  CHECK(b(ProjPoint({1.0, 0.6})) == 0.0);
  CHECK(b(ProjPoint({0.0, 1.0})) == 0.0);
}

TEST_CASE("periodic distribution approaches mu0") {
  Cloud c = sample_mu0(2, 30, 200000, 8);
  double prev = 1.0;
  for (int n : {4, 6, 8}) {
    PeriodicDistribution d = periodic_distribution_compare(periodic_points_base(2, n), c);
    CHECK_FALSE(d.incomplete);
    CHECK(d.discrepancy < prev);
    prev = d.discrepancy;
  }
}

TEST_CASE("estimators do not depend on the worker count") {
  Cloud c = sample_mu0(2, 20, 3000, 21);
  OrbitBundle a = make_orbits(BaseMap(2), c.points, 6, 1);
  OrbitBundle b = make_orbits(BaseMap(2), c.points, 6, 3);
  CHECK(a.data == b.data);
  auto sampler = [&](Rng& g) { return c.points[g() % c.size()]; };
  LyapunovReport l1 = lyapunov_exponents(BaseMap(2), sampler, 200, 8, 3, 1);
  LyapunovReport l3 = lyapunov_exponents(BaseMap(2), sampler, 200, 8, 3, 3);
  CHECK(l1.exponents == l3.exponents);
}
