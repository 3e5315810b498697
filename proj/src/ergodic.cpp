#include "pkattract/ergodic.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "pkattract/error.hpp"
#include "pkattract/green.hpp"

namespace pkattract {

namespace {

// Bloch-type coordinates of the first two homogeneous coordinates. They move
// by at most 2 d(p, q), so a grid of cell 2 eps finds every eps-neighbour in
// the 27 surrounding cells.
std::array<double, 3> embed3(std::span<const cplx> p) {
  double n = 0.0;
  for (auto c : p) n += std::norm(c);
  cplx x = p[0] * std::conj(p[1]);
  return {(std::norm(p[0]) - std::norm(p[1])) / n, 2.0 * x.real() / n, 2.0 * x.imag() / n};
}

class GridHash {
 public:
  explicit GridHash(double cell) : inv_(1.0 / cell) {}

  void insert(std::uint32_t id, std::span<const cplx> p) { map_[key(cell_of(p))].push_back(id); }

  template <class F>
  void for_neighbours(std::span<const cplx> p, F&& f) const {
    auto c = cell_of(p);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = map_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == map_.end()) continue;
          for (std::uint32_t id : it->second) f(id);
        }
  }

 private:
  std::array<std::int64_t, 3> cell_of(std::span<const cplx> p) const {
    auto e = embed3(p);
    return {static_cast<std::int64_t>(std::floor(e[0] * inv_)), static_cast<std::int64_t>(std::floor(e[1] * inv_)),
            static_cast<std::int64_t>(std::floor(e[2] * inv_))};
  }
  static std::uint64_t key(const std::array<std::int64_t, 3>& c) {
    auto u = [](std::int64_t v) { return static_cast<std::uint64_t>(v + (1 << 20)) & 0x1fffff; };
    return (u(c[0]) << 42) | (u(c[1]) << 21) | u(c[2]);
  }

  double inv_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> map_;
};

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

ProjPoint halton_point(std::uint64_t i, int m) {
  static const std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const int chart = static_cast<int>(i % static_cast<std::uint64_t>(m + 1));
  CVec x(static_cast<std::size_t>(m) + 1);
  int q = 0;
  for (int j = 0; j <= m; ++j) {
    if (j == chart) {
      x[static_cast<std::size_t>(j)] = 1.0;
      continue;
    }
    double r = std::sqrt(radical_inverse(i + 1, primes[(2 * q) % 12]));
    double th = 2.0 * std::numbers::pi * radical_inverse(i + 1, primes[(2 * q + 1) % 12]);
    x[static_cast<std::size_t>(j)] = std::polar(r, th);
    ++q;
  }
  return ProjPoint(std::move(x));
}

std::optional<ProjPoint> newton_periodic(const HomogeneousMap& fn, const ProjPoint& start, const PeriodicOptions& opts) {
  const int m = fn.dim();
  ProjPoint x = normalize(start);
  for (int it = 0; it < opts.newton_iters; ++it) {
    const int a = x.max_index();
    ChartJacobian J;
    try {
      J = jacobian_chart(fn, x, a, a);
    } catch (const Error&) {
      return std::nullopt;
    }
    CVec y = fn.lift(x.coords());
    const cplx ya = y[static_cast<std::size_t>(a)];
    Eigen::VectorXcd g(m);
    for (int i = 0, r = 0; i <= m; ++i) {
      if (i == a) continue;
      g(r++) = y[static_cast<std::size_t>(i)] / ya - x[static_cast<std::size_t>(i)];
    }
    if (!g.allFinite()) return std::nullopt;
    CMat A = J.matrix - CMat::Identity(m, m);
    Eigen::VectorXcd d = A.fullPivLu().solve(-g);
    if (!d.allFinite()) return std::nullopt;
    double step = d.norm();
    if (step > 0.5) d *= 0.5 / step;
    CVec nx = x.coords();
    for (int i = 0, r = 0; i <= m; ++i) {
      if (i == a) continue;
      nx[static_cast<std::size_t>(i)] += d(r++);
    }
    try {
      x = normalize(ProjPoint(std::move(nx)));
    } catch (const Error&) {
      return std::nullopt;
    }
    if (step < 1e-15) break;
  }
  return x;
}

}  // namespace

long long lefschetz_count(int degree, int m, int n) {
  long long dn = 1;
  for (int i = 0; i < n; ++i) dn *= degree;
  long long s = 0, p = 1;
  for (int i = 0; i <= m; ++i, p *= dn) s += p;
  return s;
}

PeriodicSet periodic_points(const HomogeneousMap& map, int n, const std::vector<ProjPoint>& seeds,
                            const PeriodicOptions& opts) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "period must be >= 1");
  MapPtr inner(std::shared_ptr<const HomogeneousMap>(&map, [](const HomogeneousMap*) {}));
  IteratedMap fn(inner, n);
  PeriodicSet out;
  out.n = n;
  out.expected_count = lefschetz_count(map.degree(), map.dim(), n);

  auto consider = [&](const ProjPoint& s) {
    auto r = newton_periodic(fn, s, opts);
    if (!r) return;
    double res;
    try {
      res = fs_distance(fn.apply(*r), *r);
    } catch (const Error&) {
      return;
    }
    if (!(res < opts.verify_tol)) return;
    for (const auto& q : out.points)
      if (fs_distance(q, *r) < opts.dedupe) return;
    out.points.push_back(*r);
    out.multiplicities.push_back(1);
    out.residuals.push_back(res);
  };
  for (const auto& s : seeds) {
    consider(s);
    if (out.expected_count && static_cast<long long>(out.points.size()) >= *out.expected_count) break;
  }
  for (int i = 0; i < opts.extra_starts; ++i) {
    if (out.expected_count && static_cast<long long>(out.points.size()) >= *out.expected_count) break;
    consider(halton_point(static_cast<std::uint64_t>(i), map.dim()));
  }
  out.incomplete = out.expected_count && static_cast<long long>(out.points.size()) < *out.expected_count;
  return out;
}

PeriodicSet periodic_points_base(int k, int n, const PeriodicOptions& opts) {
  const double tree = std::ldexp(1.0, (k - 1) * n);
  if (tree > static_cast<double>(opts.max_count)) {
    throw Error(ErrorCode::InvalidParams, "2^{(k-1)n} = " + std::to_string(tree) + " exceeds max_count");
  }
  std::vector<ProjPoint> seeds;
  for (int t = 0; t < opts.seed_targets; ++t) {
    CVec g(static_cast<std::size_t>(k), 1.0);
    for (int j = 1; j < k; ++j) g[static_cast<std::size_t>(j)] = cplx(0.37 + 0.13 * t - 0.05 * j, 0.23 - 0.29 * t + 0.17 * j);
    Cloud c = preimage_tree(k, ProjPoint(std::move(g)), n, opts.max_count);
    seeds.insert(seeds.end(), c.points.begin(), c.points.end());
  }
  return periodic_points(BaseMap(k), n, seeds, opts);
}

AttractorPeriodic periodic_in_attractor(const Params& params, const ProjPoint& base_point, int n, int max_cycles) {
  const int k = params.k;
  if (base_point.dim() != k - 1) throw Error(ErrorCode::DimensionMismatch, "base point not in P^{k-1}");
  if (n < 1) throw Error(ErrorCode::InvalidParams, "period must be >= 1");
  const BaseMap f(k);
  std::vector<ProjPoint> orbit{normalize(base_point)};
  for (int i = 1; i < n; ++i) orbit.push_back(f.apply(orbit.back()));
  if (!(fs_distance(f.apply(orbit.back()), orbit.front()) < 1e-9)) {
    throw Error(ErrorCode::NotPeriodic, "base point is not periodic with period " + std::to_string(n));
  }
  // Fiber step o_i -> o_{i+1}: t -> (t^2 + lambda z_i^2) / c_i with F(o_i) = c_i o_{i+1}.
  std::vector<cplx> lz2(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const ProjPoint& o = orbit[static_cast<std::size_t>(i)];
    const ProjPoint& next = orbit[static_cast<std::size_t>((i + 1) % n)];
    CVec y = f.lift(o.coords());
    const int j = next.max_index();
    c[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(j)] / next[static_cast<std::size_t>(j)];
    lz2[static_cast<std::size_t>(i)] = params.lambda * o[0] * o[0];
  }
  cplx t = 0.0;
  AttractorPeriodic out;
  bool converged = false;
  for (int cyc = 1; cyc <= max_cycles; ++cyc) {
    cplx prev = t;
    for (int i = 0; i < n; ++i) t = (t * t + lz2[static_cast<std::size_t>(i)]) / c[static_cast<std::size_t>(i)];
    out.cycles = cyc;
    if (std::abs(t - prev) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(t)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "fiber iteration did not settle");
  out.point = embed_pi(orbit.front());
  out.point[static_cast<std::size_t>(k)] = t;
  out.residual = fs_distance(FLambdaMap(k, params.lambda).iterate(out.point, n), out.point);
  return out;
}

double entropy_from_periodic_growth(std::vector<std::pair<int, double>> counts) {
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               counts.end());
  if (counts.size() < 3) throw Error(ErrorCode::InsufficientData, "need at least three periods");
  for (const auto& c : counts)
    if (!(c.second > 0.0)) throw Error(ErrorCode::InsufficientData, "periodic counts must be positive");
  const std::size_t use = std::max<std::size_t>(3, (counts.size() + 1) / 2);
  const std::size_t first = counts.size() - use;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < counts.size(); ++i) {
    double x = counts[i].first, y = std::log(counts[i].second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(use);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

OrbitBundle make_orbits(const HomogeneousMap& map, const std::vector<ProjPoint>& starts, int length, int workers) {
  if (length < 1) throw Error(ErrorCode::InvalidParams, "orbit length must be >= 1");
  OrbitBundle b;
  b.dim = map.dim();
  b.length = length;
  const std::size_t stride = static_cast<std::size_t>(b.dim) + 1;
  b.data.resize(starts.size() * static_cast<std::size_t>(length) * stride);
  parallel_chunks(starts.size(), workers, 0, [&](std::size_t lo, std::size_t hi, Rng&) {
    for (std::size_t i = lo; i < hi; ++i) {
      ProjPoint x = normalize(starts[i]);
      for (int s = 0; s < length; ++s) {
        if (s > 0) x = map.apply(x);
        std::copy(x.coords().begin(), x.coords().end(),
                  b.data.begin() + static_cast<std::ptrdiff_t>((i * static_cast<std::size_t>(length) + s) * stride));
      }
    }
  });
  return b;
}

namespace {

double orbit_distance(const OrbitBundle& b, std::size_t i, std::size_t j, int n, double stop_above) {
  double d = 0.0;
  for (int s = 0; s < n; ++s) {
    d = std::max(d, fs_distance_normalized(b.at(i, s), b.at(j, s)));
    if (d > stop_above) break;
  }
  return d;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

SpanningReport topological_entropy_estimate(const OrbitBundle& orbits, const std::vector<int>& n_values,
                                            const std::vector<double>& eps_values, double saturation) {
  const std::size_t N = orbits.count();
  if (N == 0) throw Error(ErrorCode::InsufficientData, "no orbit segments");
  for (int n : n_values)
    if (n < 1 || n > orbits.length) throw Error(ErrorCode::InsufficientData, "orbit segments shorter than n");
  SpanningReport r;
  r.n_values = n_values;
  r.eps_values = eps_values;
  r.orbits = N;
  for (double eps : eps_values) {
    std::vector<std::size_t> counts;
    for (int n : n_values) {
      GridHash grid(2.0 * eps);
      std::size_t centers = 0;
      for (std::size_t i = 0; i < N; ++i) {
        bool covered = false;
        grid.for_neighbours(orbits.at(i, 0), [&](std::uint32_t c) {
          if (!covered && orbit_distance(orbits, i, c, n, eps) <= eps) covered = true;
        });
        if (!covered) {
          grid.insert(static_cast<std::uint32_t>(i), orbits.at(i, 0));
          ++centers;
        }
      }
      counts.push_back(centers);
    }
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < n_values.size(); ++j) {
      if (static_cast<double>(counts[j]) <= saturation * static_cast<double>(N)) {
        xs.push_back(n_values[j]);
        ys.push_back(std::log(static_cast<double>(counts[j])));
      }
    }
    r.counts.push_back(counts);
    r.fitted_points.push_back(static_cast<int>(xs.size()));
    r.slopes.push_back(xs.size() >= 3 ? ls_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

namespace {

BrinKatokReport summarize_bk(const std::vector<double>& plain, const std::vector<double>& diff, int empty) {
  BrinKatokReport r;
  r.empty_balls = empty;
  r.centers_used = static_cast<int>(diff.size());
  if (diff.empty()) throw Error(ErrorCode::EmptyBall, "every Bowen ball was empty");
  r.plain = std::accumulate(plain.begin(), plain.end(), 0.0) / static_cast<double>(plain.size());
  r.differenced = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(diff.size());
  double v = 0.0;
  for (double d : diff) v += (d - r.differenced) * (d - r.differenced);
  r.std_error = diff.size() > 1 ? std::sqrt(v / static_cast<double>(diff.size() - 1) / static_cast<double>(diff.size())) : 0.0;
  return r;
}

}  // namespace

BrinKatokReport brin_katok_entropy(const OrbitBundle& orbits, int n, double eps, int centers, std::uint64_t seed,
                                   int n0) {
  const std::size_t N = orbits.count();
  if (N < 2) throw Error(ErrorCode::InsufficientData, "need at least two orbits");
  if (n < 1 || n > orbits.length || n0 < 1 || n0 >= n)
    throw Error(ErrorCode::InvalidParams, "need 1 <= n0 < n <= orbit length");
  GridHash grid(2.0 * eps);
  for (std::size_t i = 0; i < N; ++i) grid.insert(static_cast<std::uint32_t>(i), orbits.at(i, 0));
  Rng rng = make_stream(seed, 0);
  std::vector<double> plain, diff;
  int empty = 0;
  for (int c = 0; c < centers; ++c) {
    const std::size_t x = static_cast<std::size_t>(rng() % N);
    std::size_t in0 = 0, inn = 0;
    grid.for_neighbours(orbits.at(x, 0), [&](std::uint32_t y) {
      if (y == x) return;
      double d = 0.0;
      for (int s = 0; s < n && d <= eps; ++s) {
        d = std::max(d, fs_distance_normalized(orbits.at(x, s), orbits.at(y, s)));
        if (s + 1 == n0 && d <= eps) ++in0;
      }
      if (d <= eps) ++inn;
    });
    if (inn == 0) {
      ++empty;
      continue;
    }
    const double m = static_cast<double>(N - 1);
    plain.push_back(-std::log(static_cast<double>(inn) / m) / n);
    diff.push_back(-std::log(static_cast<double>(inn) / static_cast<double>(in0)) / (n - n0));
  }
  return summarize_bk(plain, diff, empty);
}

BrinKatokReport brin_katok_entropy(const Cloud& cloud, const HomogeneousMap& map, int n, double eps, int centers,
                                   std::uint64_t seed, int n0, int workers) {
  return brin_katok_entropy(make_orbits(map, cloud.points, n, workers), n, eps, centers, seed, n0);
}

BrinKatokReport brin_katok_entropy_hat(int k, const std::vector<Prehistory>& cloud, int n, double eps, int centers,
                                       std::uint64_t seed, int n0) {
  const std::size_t N = cloud.size();
  if (N < 2) throw Error(ErrorCode::InsufficientData, "need at least two prehistories");
  if (n0 < 1 || n0 >= n) throw Error(ErrorCode::InvalidParams, "need 1 <= n0 < n");
  const int D = cloud.front().depth();
  std::vector<ProjPoint> heads;
  heads.reserve(N);
  for (const auto& h : cloud) {
    if (h.depth() < D) throw Error(ErrorCode::IndexBeyondDepth, "prehistories must share a depth");
    heads.push_back(normalize(h.head()));
  }
  const OrbitBundle fwd = make_orbits(BaseMap(k), heads, n);
  GridHash grid(2.0 * eps);
  for (std::size_t i = 0; i < N; ++i) grid.insert(static_cast<std::uint32_t>(i), fwd.at(i, 0));
  Rng rng = make_stream(seed, 0);
  std::vector<double> plain, diff;
  int empty = 0;
  for (int c = 0; c < centers; ++c) {
    const std::size_t x = static_cast<std::size_t>(rng() % N);
    std::size_t in0 = 0, inn = 0;
    grid.for_neighbours(fwd.at(x, 0), [&](std::uint32_t y) {
      if (y == x) return;
      // H_i = hat distance of f-hat^i: H_i = s_i + H_{i-1} / 2.
      double h = 0.0, w = 0.5;
      for (int j = 1; j <= D; ++j, w *= 0.5) h += w * fs_distance(cloud[x].at(j), cloud[y].at(j));
      double d = 0.0;
      for (int s = 0; s < n && d <= eps; ++s) {
        h = fs_distance_normalized(fwd.at(x, s), fwd.at(y, s)) + (s == 0 ? h : 0.5 * h);
        d = std::max(d, h);
        if (s + 1 == n0 && d <= eps) ++in0;
      }
      if (d <= eps) ++inn;
    });
    if (inn == 0) {
      ++empty;
      continue;
    }
    plain.push_back(-std::log(static_cast<double>(inn) / static_cast<double>(N - 1)) / n);
    diff.push_back(-std::log(static_cast<double>(inn) / static_cast<double>(in0)) / (n - n0));
  }
  return summarize_bk(plain, diff, empty);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> cocycle(const HomogeneousMap& map, const ProjPoint& start, int length,
                            const PointProjector& projector, int burn_in) {
  const int m = map.dim();
  CMat Q = CMat::Identity(m, m);
  std::vector<double> sums(static_cast<std::size_t>(m), 0.0);
  ProjPoint x = normalize(projector ? projector(start) : start);
  int a = x.max_index();
  for (int s = 0; s < burn_in + length; ++s) {
    ChartJacobian J = jacobian_chart(map, x, a);
    Eigen::HouseholderQR<CMat> qr(J.matrix * Q);
    CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
    Q = qr.householderQ() * CMat::Identity(m, m);
    if (s >= burn_in)
      for (int i = 0; i < m; ++i) sums[static_cast<std::size_t>(i)] += std::log(std::abs(R(i, i)));
    x = map.apply(x);
    if (projector) x = normalize(projector(x));
    a = J.image_chart;
  }
  for (double& v : sums) v /= length;
  std::sort(sums.begin(), sums.end(), std::greater<>());
  return sums;
}

LyapunovReport summarize_lyapunov(const std::vector<std::vector<double>>& per_orbit, int length) {
  LyapunovReport r;
  r.orbit_count = static_cast<int>(per_orbit.size());
  r.orbit_length = length;
  if (per_orbit.empty()) return r;
  const std::size_t m = per_orbit.front().size();
  const double n = static_cast<double>(per_orbit.size());
  for (std::size_t i = 0; i < m; ++i) {
    double mean = 0.0;
    for (const auto& o : per_orbit) mean += o[i];
    mean /= n;
    double v = 0.0;
    for (const auto& o : per_orbit) v += (o[i] - mean) * (o[i] - mean);
    r.exponents.push_back(mean);
    r.standard_errors.push_back(per_orbit.size() > 1 ? std::sqrt(v / (n - 1) / n) : 0.0);
  }
  return r;
}

}  // namespace

LyapunovReport lyapunov_exponents(const HomogeneousMap& map, const PointSampler& sampler, int orbit_length,
                                  int n_orbits, std::uint64_t seed, int workers, const PointProjector& projector,
                                  int burn_in) {
  if (orbit_length < 100) throw Error(ErrorCode::InvalidParams, "orbit_length must be >= 100");
  std::vector<std::vector<double>> per(static_cast<std::size_t>(n_orbits));
  parallel_chunks(per.size(), workers, seed, [&](std::size_t b, std::size_t e, Rng& rng) {
    for (std::size_t i = b; i < e; ++i) per[i] = cocycle(map, sampler(rng), orbit_length, projector, burn_in);
  });
  return summarize_lyapunov(per, orbit_length);
}

LyapunovReport lyapunov_from_starts(const HomogeneousMap& map, const std::vector<ProjPoint>& starts, int orbit_length,
                                    int workers, const PointProjector& projector) {
  if (orbit_length < 100) throw Error(ErrorCode::InvalidParams, "orbit_length must be >= 100");
  std::vector<std::vector<double>> per(starts.size());
  parallel_chunks(per.size(), workers, 0, [&](std::size_t b, std::size_t e, Rng&) {
    for (std::size_t i = b; i < e; ++i) per[i] = cocycle(map, starts[i], orbit_length, projector, 0);
  });
  return summarize_lyapunov(per, orbit_length);
}

LyapunovReport lyapunov_lifted(int k, const std::vector<Prehistory>& starts, int orbit_length, int workers) {
  std::vector<ProjPoint> heads;
  heads.reserve(starts.size());
  for (const auto& s : starts) heads.push_back(s.head());
  return lyapunov_from_starts(BaseMap(k), heads, orbit_length, workers);
}

// ---------------------------------------------------------------------------

Observable chart_bump(int chart, CVec center, double radius) {
  return [chart, center = std::move(center), r2 = radius * radius](const ProjPoint& p) {
    const double piv = std::abs(p[static_cast<std::size_t>(chart)]);
    if (piv <= 1e-12 * p.max_modulus()) return 0.0;
    const cplx inv = 1.0 / p[static_cast<std::size_t>(chart)];
    double d2 = 0.0;
    for (int j = 0, q = 0; j <= p.dim(); ++j) {
      if (j == chart) continue;
      d2 += std::norm(p[static_cast<std::size_t>(j)] * inv - center[static_cast<std::size_t>(q++)]);
    }
    if (d2 >= r2) return 0.0;
    double s = 1.0 - d2 / r2;
    return s * s;
  };
}

Observable coordinate_modulus(int j) {
  return [j](const ProjPoint& p) { return std::abs(p[static_cast<std::size_t>(j)]) / p.max_modulus(); };
}

CorrelationEstimate correlation(const Cloud& cloud, const HomogeneousMap& map, const Observable& phi,
                                const Observable& psi, int n, int workers) {
  const std::size_t N = cloud.size();
  if (N == 0) throw Error(ErrorCode::InsufficientSamples, "empty cloud");
  std::vector<double> a(N), b(N);
  parallel_chunks(N, workers, 0, [&](std::size_t lo, std::size_t hi, Rng&) {
    for (std::size_t i = lo; i < hi; ++i) {
      ProjPoint x = cloud.points[i];
      for (int s = 0; s < n; ++s) x = map.apply(x);
      a[i] = phi(x);
      b[i] = psi(cloud.points[i]);
    }
  });
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    ma += cloud.weights[i] * a[i];
    mb += cloud.weights[i] * b[i];
  }
  double c = 0.0;
  for (std::size_t i = 0; i < N; ++i) c += cloud.weights[i] * (a[i] - ma) * (b[i] - mb);
  double v = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double z = (a[i] - ma) * (b[i] - mb) - c;
    v += cloud.weights[i] * cloud.weights[i] * z * z;
  }
  return {c, std::sqrt(v)};
}

SensitivityReport sensitivity_probe(const HomogeneousMap& map, const PointSampler& sampler, double delta, int horizon,
                                    int trials, std::uint64_t seed, double delta0) {
  SensitivityReport r;
  r.trials = trials;
  r.separation_time_histogram.assign(static_cast<std::size_t>(horizon) + 1, 0);
  Rng rng = make_stream(seed, 0);
  int separated = 0;
  for (int t = 0; t < trials; ++t) {
    ProjPoint x = normalize(sampler(rng));
    const int a = x.max_index();
    ProjPoint y = x;
    for (int j = 0; j <= x.dim(); ++j)
      if (j != a) y[static_cast<std::size_t>(j)] += uniform_circle(rng, delta / 200.0);
    y = normalize(y);
    if (!(fs_distance(x, y) < delta / 100.0)) {
      --t;
      continue;
    }
    for (int s = 1; s <= horizon; ++s) {
      x = map.apply(x);
      y = map.apply(y);
      if (fs_distance(x, y) >= delta0) {
        ++separated;
        ++r.separation_time_histogram[static_cast<std::size_t>(s)];
        break;
      }
    }
  }
  r.separated_fraction = trials ? static_cast<double>(separated) / trials : 0.0;
  return r;
}

PeriodicDistribution periodic_distribution_compare(const PeriodicSet& pset, const Cloud& cloud) {
  if (pset.points.empty()) throw Error(ErrorCode::InsufficientData, "empty periodic set");
  Cloud e;
  e.dim = pset.points.front().dim();
  e.points = pset.points;
  e.weights.assign(pset.multiplicities.begin(), pset.multiplicities.end());
  e.normalize_weights();
  return {bin_discrepancy(bin_masses(e), bin_masses(cloud)), pset.incomplete};
}

PeriodicSet lift_periodic_set(const Params& params, const PeriodicSet& base) {
  PeriodicSet out;
  out.n = base.n;
  out.expected_count = base.expected_count;
  out.incomplete = base.incomplete;
  for (std::size_t i = 0; i < base.points.size(); ++i) {
    AttractorPeriodic a = periodic_in_attractor(params, base.points[i], base.n);
    out.points.push_back(a.point);
    out.multiplicities.push_back(base.multiplicities[i]);
    out.residuals.push_back(a.residual);
  }
  return out;
}

}  // namespace pkattract
