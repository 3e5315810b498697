#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pkattract/cloud.hpp"
#include "pkattract/dynamics.hpp"
#include "pkattract/history.hpp"

namespace pkattract {

// ---------------------------------------------------------------------------
// Periodic points

struct PeriodicSet {
  int n = 0;
  std::vector<ProjPoint> points;
  std::vector<int> multiplicities;
  std::vector<double> residuals;  // fs_distance(f^n(x), x)
  std::optional<long long> expected_count;
  bool incomplete = false;
};

struct PeriodicOptions {
  std::size_t max_count = 1u << 16;
  int seed_targets = 8;     // generic points whose n-th preimages seed Newton
  int extra_starts = 4096;  // quasi-random starts on top of the seeds
  double dedupe = 1e-7;
  double verify_tol = 1e-9;
  int newton_iters = 60;
};

/// sum_{i=0}^{m} d^{n i}: fixed points of f^n on P^m, counted with multiplicity.
long long lefschetz_count(int degree, int m, int n);

/// Multi-start Newton for f^n(x) = x in affine charts, started from `seeds`
/// and a Halton sequence, forward-verified and deduplicated.
PeriodicSet periodic_points(const HomogeneousMap& map, int n, const std::vector<ProjPoint>& seeds,
                            const PeriodicOptions& opts = {});
/// Base map f on P^{k-1}. Seeds are the n-th preimages of generic points.
/// Throws InvalidParams if 2^{(k-1)n} exceeds opts.max_count.
PeriodicSet periodic_points_base(int k, int n, const PeriodicOptions& opts = {});

struct AttractorPeriodic {
  ProjPoint point;
  double residual = 0.0;  // fs_distance(f_lambda^n(x), x)
  int cycles = 0;
};

/// The f_lambda-periodic point in the fiber over a periodic base point,
/// found by iterating the fiber maps around the base cycle from t = 0.
/// Throws NotPeriodic and NoConvergence.
AttractorPeriodic periodic_in_attractor(const Params& params, const ProjPoint& base_point, int n,
                                        int max_cycles = 500);

// ---------------------------------------------------------------------------
// Entropy

/// Least-squares slope of log N_n against n over the upper half of the n
/// range (at least three points). Throws InsufficientData.
double entropy_from_periodic_growth(std::vector<std::pair<int, double>> counts);

/// Orbit segments stored flat: orbit i, step s, coordinate c at
/// data[(i * length + s) * (dim + 1) + c].
struct OrbitBundle {
  int dim = 0;
  int length = 0;
  std::vector<cplx> data;

  std::size_t count() const { return length ? data.size() / (static_cast<std::size_t>(length) * (dim + 1)) : 0; }
  std::span<const cplx> at(std::size_t i, int s) const {
    return {data.data() + (i * static_cast<std::size_t>(length) + static_cast<std::size_t>(s)) * (dim + 1),
            static_cast<std::size_t>(dim + 1)};
  }
};

/// Forward orbits of `length` points (x, f x, ...) from each start.
OrbitBundle make_orbits(const HomogeneousMap& map, const std::vector<ProjPoint>& starts, int length,
                        int workers = 1);

struct SpanningReport {
  std::vector<int> n_values;
  std::vector<double> eps_values;
  std::vector<std::vector<std::size_t>> counts;  // [eps][n]
  std::vector<double> slopes;                    // per eps; NaN if fewer than 3 unsaturated n
  std::vector<int> fitted_points;                // per eps
  std::size_t orbits = 0;
};

/// Greedy (n, eps)-spanning set sizes of the sampled orbit segments under
/// d_n = max_{i<n} d(f^i x, f^i y). Counts above saturation * orbits are
/// left out of the slope fit. Throws InsufficientData.
SpanningReport topological_entropy_estimate(const OrbitBundle& orbits, const std::vector<int>& n_values,
                                            const std::vector<double>& eps_values, double saturation = 0.1);

struct BrinKatokReport {
  double plain = 0.0;        // mean of -(1/n) log m(B_n)
  double differenced = 0.0;  // mean of -log(m(B_n) / m(B_n0)) / (n - n0)
  double std_error = 0.0;    // of the differenced estimate
  int centers_used = 0;
  int empty_balls = 0;
};

/// Bowen-ball masses in the orbit bundle (the cloud pushed forward), for
/// `centers` randomly chosen cloud points. Empty balls are counted and
/// skipped; throws EmptyBall if every ball is empty.
BrinKatokReport brin_katok_entropy(const OrbitBundle& orbits, int n, double eps, int centers, std::uint64_t seed,
                                   int n0 = 1);
BrinKatokReport brin_katok_entropy(const Cloud& cloud, const HomogeneousMap& map, int n, double eps, int centers,
                                   std::uint64_t seed, int n0 = 1, int workers = 1);
/// Same estimator on prehistories under f-hat with the hat metric.
BrinKatokReport brin_katok_entropy_hat(int k, const std::vector<Prehistory>& cloud, int n, double eps, int centers,
                                       std::uint64_t seed, int n0 = 1);

// ---------------------------------------------------------------------------
// Lyapunov exponents

struct LyapunovReport {
  std::vector<double> exponents;  // descending
  std::vector<double> standard_errors;
  int orbit_count = 0;
  int orbit_length = 0;
};

using PointSampler = std::function<ProjPoint(Rng&)>;
using PointProjector = std::function<ProjPoint(const ProjPoint&)>;

/// QR-reorthonormalized chart-Jacobian cocycle. The image chart of one step
/// is the input chart of the next, so no transition factors arise. An
/// optional projector is applied to every new orbit point (used to keep
/// orbits on a known invariant set).
LyapunovReport lyapunov_exponents(const HomogeneousMap& map, const PointSampler& sampler, int orbit_length,
                                  int n_orbits, std::uint64_t seed, int workers = 1,
                                  const PointProjector& projector = nullptr, int burn_in = 0);
/// Same cocycle from explicit starts.
LyapunovReport lyapunov_from_starts(const HomogeneousMap& map, const std::vector<ProjPoint>& starts,
                                    int orbit_length, int workers = 1, const PointProjector& projector = nullptr);
/// Lifted orbits: the f-hat orbit of each prehistory, whose heads carry the
/// tangent dynamics.
LyapunovReport lyapunov_lifted(int k, const std::vector<Prehistory>& starts, int orbit_length, int workers = 1);

// ---------------------------------------------------------------------------
// Mixing and sensitivity

using Observable = std::function<double(const ProjPoint&)>;

/// (1 - |u - u0|^2 / r^2)^2 inside the ball of radius r in chart `chart`,
/// 0 outside and where the chart is undefined.
Observable chart_bump(int chart, CVec center, double radius = 0.3);
/// |p_j| / max_i |p_i|.
Observable coordinate_modulus(int j);

struct CorrelationEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// C_n = <(phi o f^n) psi> - <phi o f^n><psi> over the weighted cloud.
CorrelationEstimate correlation(const Cloud& cloud, const HomogeneousMap& map, const Observable& phi,
                                const Observable& psi, int n, int workers = 1);

struct SensitivityReport {
  int trials = 0;
  double separated_fraction = 0.0;
  std::vector<int> separation_time_histogram;  // index = first step with d >= delta0
};

/// Pairs (x, y) with d(x, y) < delta / 100; counts pairs whose orbits reach
/// distance delta0 within the horizon.
SensitivityReport sensitivity_probe(const HomogeneousMap& map, const PointSampler& sampler, double delta,
                                    int horizon, int trials, std::uint64_t seed, double delta0 = 0.1);

struct PeriodicDistribution {
  double discrepancy = 0.0;
  bool incomplete = false;
};

/// Coarse-bin discrepancy between the uniform measure on E_n (multiplicity
/// weighted) and the cloud.
PeriodicDistribution periodic_distribution_compare(const PeriodicSet& pset, const Cloud& cloud);
/// Lifts every base periodic point into K_lambda.
PeriodicSet lift_periodic_set(const Params& params, const PeriodicSet& base);

}  // namespace pkattract
