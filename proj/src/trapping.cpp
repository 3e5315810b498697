#include "pkattract/trapping.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "pkattract/error.hpp"

namespace pkattract {

double default_rho(cplx lambda) {
  const double a = std::abs(lambda);
  if (!(a > 0.0) || !(a < 0.25)) {
    throw Error(ErrorCode::LambdaOutOfRange, "need 0 < |lambda| < 1/4, got " + std::to_string(a));
  }
  return std::sqrt(2.0) * std::pow(a, 0.75);
}

namespace {

double base_max(const ProjPoint& p) {
  const int k = p.dim();
  double m = 0.0;
  for (int j = 0; j < k; ++j) m = std::max(m, std::abs(p[j]));
  return m;
}

}  // namespace

TrapMembership in_trap(const Params& params, const ProjPoint& p) {
  if (p.dim() != params.k) throw Error(ErrorCode::DimensionMismatch, "trap test expects a point of P^k");
  ProjPoint q = normalize(p);
  double margin = params.rho * base_max(q) - std::abs(q[params.k]);
  return {margin > 0.0, margin};
}

ProjPoint sample_trap_point(const Params& params, Rng& rng) {
  const int k = params.k;
  CVec x(k + 1);
  const int chart = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
  for (int j = 0; j < k; ++j) x[j] = j == chart ? cplx(1.0) : uniform_disc(rng, 1.0);
  x[k] = uniform_disc(rng, params.rho);
  return ProjPoint(std::move(x));
}

TrapReport trap_forward_check(const Params& params, int n_samples, std::uint64_t seed, int workers,
                              bool throw_on_violation) {
  const double bound = 2.0 * std::abs(params.lambda);
  const FLambdaMap f(params.k, params.lambda);
  TrapReport report;
  report.samples = n_samples;
  std::mutex m;
  parallel_chunks(static_cast<std::size_t>(n_samples), workers, seed,
                  [&](std::size_t b, std::size_t e, Rng& rng) {
                    double worst = -1.0;
                    int viol = 0;
                    ProjPoint witness;
                    for (std::size_t i = b; i < e; ++i) {
                      ProjPoint x = sample_trap_point(params, rng);
                      ProjPoint y = f.apply(x);
                      double r = std::abs(y[params.k]) / base_max(y);
                      if (!(r < bound)) ++viol;
                      if (r > worst) {
                        worst = r;
                        witness = x;
                      }
                    }
                    std::lock_guard lock(m);
                    report.violations += viol;
                    if (worst > report.max_image_ratio || report.witness.size() == 0) {
                      report.max_image_ratio = worst;
                      report.witness = witness;
                    }
                  });
  report.margin = params.rho - report.max_image_ratio;
  if (throw_on_violation && report.violations > 0) {
    std::string w;
    for (const auto& c : report.witness.coords()) w += " (" + std::to_string(c.real()) + "," + std::to_string(c.imag()) + ")";
    throw Error(ErrorCode::TrapViolation,
                std::to_string(report.violations) + " samples escaped the trap bound; worst at" + w);
  }
  return report;
}

namespace {

double max_pairwise(const std::vector<ProjPoint>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, fs_distance(pts[i], pts[j]));
  return d;
}

std::vector<cplx> boundary_circle(double radius, int n) {
  std::vector<cplx> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = std::polar(radius, 2.0 * std::numbers::pi * i / n);
  return t;
}

// Fiber points over a common base point b: [b : t_i].
std::vector<ProjPoint> over(const ProjPoint& b, const std::vector<cplx>& ts) {
  std::vector<ProjPoint> out(ts.size(), embed_pi(b));
  for (std::size_t i = 0; i < ts.size(); ++i) out[i][static_cast<std::size_t>(b.dim() + 1)] = ts[i];
  return out;
}

}  // namespace

std::vector<double> fiber_contraction(const Params& params, const ProjPoint& a, int n, int n_fiber) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "n must be >= 1");
  if (a.dim() != params.k - 1) throw Error(ErrorCode::DimensionMismatch, "base point not in P^{k-1}");
  const FLambdaMap f(params.k, params.lambda);
  ProjPoint b = normalize(a);
  // Slightly inside the boundary so every start is in the open fiber disc.
  std::vector<ProjPoint> pts = over(b, boundary_circle(params.rho * (1.0 - 1e-9), std::max(n_fiber, 2)));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    for (auto& p : pts) p = f.apply(p);
    out.push_back(max_pairwise(pts));
  }
  return out;
}

PhiResult phi_lambda(const Params& params, const Prehistory& a, const PhiOptions& opts) {
  const int k = params.k;
  validate_prehistory(k, a);
  const BaseMap f(k);
  const int n = a.depth();
  const double lam = std::abs(params.lambda);

  std::vector<ProjPoint> base(a.points.size());
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = normalize(a.points[i]);

  // Normalizer c_i of the step a_{-i} -> a_{-(i-1)}: F(a_{-i}) = c_i a_{-(i-1)}.
  auto scale = [&](int i) {
    CVec y = f.lift(base[static_cast<std::size_t>(i)].coords());
    return y[static_cast<std::size_t>(base[static_cast<std::size_t>(i - 1)].max_index())];
  };

  int m = n;
  std::vector<cplx> c(static_cast<std::size_t>(n) + 1);
  if (opts.early_stop) {
    // Lipschitz bound of the fiber maps: 2 rho / |c| on the first step,
    // 4 |lambda| / |c| afterwards.
    double bound = 2.0 * params.rho;
    m = 0;
    for (int i = 1; i <= n; ++i) {
      c[static_cast<std::size_t>(i)] = scale(i);
      m = i;
      double step = (i == 1 ? 2.0 * params.rho : 4.0 * lam) / std::abs(c[static_cast<std::size_t>(i)]);
      bound *= step;
      if (bound < opts.tol) break;
    }
  } else {
    for (int i = 1; i <= n; ++i) c[static_cast<std::size_t>(i)] = scale(i);
  }

  // t_{i-1} = (t_i^2 + lambda z_i^2) / c_i where z_i is the z coordinate of a_{-i}.
  cplx t = 0.0;
  std::vector<cplx> ring = boundary_circle(params.rho * (1.0 - 1e-9), std::max(opts.n_boundary, 2));
  for (int i = m; i >= 1; --i) {
    const cplx z = base[static_cast<std::size_t>(i)][0];
    const cplx ci = c[static_cast<std::size_t>(i)];
    const cplx lz2 = params.lambda * z * z;
    t = (t * t + lz2) / ci;
    for (auto& r : ring) r = (r * r + lz2) / ci;
  }
  PhiResult out;
  out.point = embed_pi(base[0]);
  out.point[static_cast<std::size_t>(k)] = t;
  out.depth_used = m;
  out.error_bound = m == 0 ? 0.0 : max_pairwise(over(base[0], ring));
  return out;
}

std::vector<ProjPoint> iterate_orbit(const Params& params, const ProjPoint& start, int n) {
  if (start.dim() != params.k) throw Error(ErrorCode::DimensionMismatch, "orbit start not in P^k");
  const FLambdaMap f(params.k, params.lambda);
  std::vector<ProjPoint> out{normalize(start)};
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) out.push_back(f.apply(out.back()));
  return out;
}

Cloud sample_attractor_forward(const Params& params, int burn_in, int n_samples, std::uint64_t seed,
                               int workers, int per_orbit) {
  if (burn_in < 20) throw Error(ErrorCode::InvalidParams, "burn_in must be >= 20");
  if (per_orbit < 1) throw Error(ErrorCode::InvalidParams, "per_orbit must be >= 1");
  const FLambdaMap f(params.k, params.lambda);
  std::vector<ProjPoint> pts(static_cast<std::size_t>(n_samples));
  parallel_chunks(pts.size(), workers, seed, [&](std::size_t b, std::size_t e, Rng& rng) {
    ProjPoint x;
    int left = 0;
    for (std::size_t i = b; i < e; ++i) {
      if (left == 0) {
        x = sample_trap_point(params, rng);
        for (int s = 0; s < burn_in; ++s) x = f.apply(x);
        left = per_orbit;
      } else {
        x = f.apply(x);
      }
      pts[i] = x;
      --left;
    }
  });
  return Cloud::uniform(params.k, std::move(pts));
}

}  // namespace pkattract
