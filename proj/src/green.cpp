#include "pkattract/green.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pkattract/error.hpp"
#include "pkattract/trapping.hpp"

namespace pkattract {

double green_function(const HomogeneousMap& map, std::span<const cplx> lift, int n_iter) {
  double s = max_norm(lift);
  if (!(s > kUnderflow)) throw Error(ErrorCode::ZeroVector, "green_function needs a nonzero lift");
  CVec x(lift.begin(), lift.end());
  for (auto& c : x) c /= s;
  double g = std::log(s);
  const double d = map.degree();
  double w = 1.0;
  for (int m = 0; m < n_iter; ++m) {
    w /= d;
    x = map.lift(x);
    double r = max_norm(x);
    if (!(r > kUnderflow)) throw Error(ErrorCode::IndeterminacyHit, "lift vanished during Green iteration");
    g += w * std::log(r);
    for (auto& c : x) c /= r;
  }
  return g;
}

double green_function(MapId id, int k, cplx lambda, std::span<const cplx> lift, int n_iter) {
  return green_function(*make_map(id, k, lambda), lift, n_iter);
}

ProjPoint default_mu0_start(int k) {
  CVec c(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) c[static_cast<std::size_t>(j)] = static_cast<double>(j + 2);
  return normalize(ProjPoint(std::move(c)));
}

Cloud sample_mu0(int k, int depth, int n_samples, std::uint64_t seed, int workers, std::optional<ProjPoint> start) {
  if (depth < 0) throw Error(ErrorCode::InvalidParams, "depth must be >= 0");
  const ProjPoint a0 = start ? normalize(*start) : default_mu0_start(k);
  if (a0.dim() != k - 1) throw Error(ErrorCode::DimensionMismatch, "mu0 start not in P^{k-1}");
  std::vector<ProjPoint> pts(static_cast<std::size_t>(n_samples));
  parallel_chunks(pts.size(), workers, seed, [&](std::size_t b, std::size_t e, Rng& rng) {
    for (std::size_t i = b; i < e; ++i) {
      ProjPoint x = a0;
      for (int d = 0; d < depth; ++d) x = random_preimage_f_base(k, x, rng);
      pts[i] = std::move(x);
    }
  });
  return Cloud::uniform(k - 1, std::move(pts));
}

std::vector<Prehistory> sample_history_mu0(int k, int depth, int n_samples, std::uint64_t seed, int workers,
                                           int mu0_depth) {
  if (depth < 0 || mu0_depth < 0) throw Error(ErrorCode::InvalidParams, "depths must be >= 0");
  const ProjPoint start = default_mu0_start(k);
  std::vector<Prehistory> out(static_cast<std::size_t>(n_samples));
  parallel_chunks(out.size(), workers, seed, [&](std::size_t b, std::size_t e, Rng& rng) {
    for (std::size_t i = b; i < e; ++i) {
      ProjPoint x = start;
      for (int d = 0; d < mu0_depth; ++d) x = random_preimage_f_base(k, x, rng);
      out[i] = sample_prehistory(k, x, depth, rng);
    }
  });
  return out;
}

Cloud sample_mu_lambda(const Params& params, int depth, int n_samples, std::uint64_t seed, int workers,
                       int mu0_depth) {
  if (depth < 0 || mu0_depth < 0) throw Error(ErrorCode::InvalidParams, "depths must be >= 0");
  const int k = params.k;
  const ProjPoint start = default_mu0_start(k);
  std::vector<ProjPoint> pts(static_cast<std::size_t>(n_samples));
  parallel_chunks(pts.size(), workers, seed, [&](std::size_t b, std::size_t e, Rng& rng) {
    for (std::size_t i = b; i < e; ++i) {
      ProjPoint x = start;
      for (int d = 0; d < mu0_depth; ++d) x = random_preimage_f_base(k, x, rng);
      pts[i] = phi_lambda(params, sample_prehistory(k, x, depth, rng)).point;
    }
  });
  return Cloud::uniform(k, std::move(pts));
}

Cloud push_forward(const Cloud& c, const HomogeneousMap& map) {
  Cloud out;
  out.dim = map.dim();
  out.weights = c.weights;
  out.points.reserve(c.size());
  for (const auto& p : c.points) out.points.push_back(map.apply(p));
  return out;
}

Cloud project_cloud(const Cloud& c) {
  Cloud out;
  out.dim = c.dim - 1;
  out.weights = c.weights;
  out.points.reserve(c.size());
  for (const auto& p : c.points) out.points.push_back(project_pi(p));
  return out;
}

int coarse_cell_count(int dim) {
  int n = dim + 1;
  for (int i = 0; i < dim; ++i) n *= 8;
  return n;
}

int coarse_cell(const ProjPoint& p) {
  ProjPoint q = normalize(p);
  const int a = q.max_index();
  int cell = a;
  for (int j = 0; j <= q.dim(); ++j) {
    if (j == a) continue;
    const cplx u = q[static_cast<std::size_t>(j)];
    double arg = std::arg(u);
    if (arg < 0) arg += 2.0 * std::numbers::pi;
    int quadrant = std::min(3, static_cast<int>(arg / (0.5 * std::numbers::pi)));
    cell = cell * 8 + quadrant * 2 + (std::abs(u) >= 0.5 ? 1 : 0);
  }
  return cell;
}

BinMasses bin_masses(const Cloud& c) {
  BinMasses b;
  b.n = c.size();
  b.mass.assign(static_cast<std::size_t>(coarse_cell_count(c.dim)), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) b.mass[static_cast<std::size_t>(coarse_cell(c.points[i]))] += c.weights[i];
  b.std_error.resize(b.mass.size());
  for (std::size_t i = 0; i < b.mass.size(); ++i) {
    double p = b.mass[i];
    b.std_error[i] = b.n ? std::sqrt(p * (1.0 - p) / static_cast<double>(b.n)) : 0.0;
  }
  return b;
}

double bin_discrepancy(const BinMasses& a, const BinMasses& b) {
  if (a.mass.size() != b.mass.size()) throw Error(ErrorCode::DimensionMismatch, "bin partitions differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) s += std::abs(a.mass[i] - b.mass[i]);
  return s / static_cast<double>(a.mass.size());
}

double max_invariance_score(const BinMasses& before, const BinMasses& after) {
  if (before.mass.size() != after.mass.size()) throw Error(ErrorCode::DimensionMismatch, "bin partitions differ");
  const double n = static_cast<double>(std::max<std::size_t>(before.n, 1));
  double worst = 0.0;
  for (std::size_t i = 0; i < before.mass.size(); ++i) {
    const double pooled = before.mass[i] + after.mass[i];
    if (pooled <= 0.0) continue;
    worst = std::max(worst, std::abs(before.mass[i] - after.mass[i]) / std::sqrt(pooled / n));
  }
  return worst;
}

Cloud preimage_tree(int k, const ProjPoint& z, int depth, std::size_t max_points) {
  const double total = std::ldexp(1.0, (k - 1) * depth);
  if (total > static_cast<double>(max_points)) {
    throw Error(ErrorCode::TreeTooLarge, "preimage tree has " + std::to_string(total) + " leaves");
  }
  std::vector<ProjPoint> level{normalize(z)};
  std::vector<double> mult{1.0};
  for (int d = 0; d < depth; ++d) {
    std::vector<ProjPoint> next;
    std::vector<double> nm;
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (auto& q : preimages_f_base(k, level[i])) {
        next.push_back(std::move(q.point));
        nm.push_back(mult[i] * q.multiplicity);
      }
    }
    level = std::move(next);
    mult = std::move(nm);
  }
  Cloud c;
  c.dim = k - 1;
  c.points = std::move(level);
  c.weights = std::move(mult);
  c.normalize_weights();
  return c;
}

EquidistributionReport preimage_distribution_test(int k, const ProjPoint& z, const std::vector<int>& depths,
                                                  std::uint64_t seed, std::size_t max_points) {
  EquidistributionReport r;
  r.depths = depths;
  std::vector<BinMasses> bins;
  for (int d : depths) {
    Cloud c;
    try {
      c = preimage_tree(k, z, d, max_points);
      r.exact.push_back(true);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TreeTooLarge) throw;
      c = sample_mu0(k, d, static_cast<int>(max_points), seed + static_cast<std::uint64_t>(d), 1, z);
      r.exact.push_back(false);
    }
    bins.push_back(bin_masses(c));
  }
  for (std::size_t i = 0; i + 1 < bins.size(); ++i) r.discrepancy.push_back(bin_discrepancy(bins[i], bins[i + 1]));
  r.decreasing = true;
  for (std::size_t i = 0; i + 1 < r.discrepancy.size(); ++i)
    if (!(r.discrepancy[i + 1] < r.discrepancy[i])) r.decreasing = false;
  return r;
}

}  // namespace pkattract
