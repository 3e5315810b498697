#include "pkattract/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "pkattract/error.hpp"
#include "pkattract/trapping.hpp"

namespace pkattract {

Params Params::make(int k, cplx lambda, double rho) {
  if (k < 2) throw Error(ErrorCode::InvalidParams, "k must be >= 2, got " + std::to_string(k));
  const double a = std::abs(lambda);
  if (!(a > 0.0) || !(2.0 * a < rho) || !(rho < std::sqrt(a))) {
    std::ostringstream os;
    os << "need 0 < 2|lambda| < rho < sqrt|lambda|, got |lambda|=" << a << " rho=" << rho;
    throw Error(ErrorCode::InvalidParams, os.str());
  }
  return Params{k, lambda, rho};
}

Params Params::with_default_rho(int k, cplx lambda) {
  return make(k, lambda, default_rho(lambda));
}

cplx t_fixed(cplx lambda) {
  return 2.0 * lambda / (1.0 + std::sqrt(1.0 - 4.0 * lambda));
}

ProjPoint apply_f_lambda(const Params& params, const ProjPoint& p) {
  return FLambdaMap(params.k, params.lambda).apply(p);
}

ProjPoint apply_f_base(int k, const ProjPoint& q) { return BaseMap(k).apply(q); }

cplx apply_h(cplx lambda, cplx z) { return z * z + lambda; }

cplx apply_h_iter(cplx lambda, cplx z, int n) {
  for (int i = 0; i < n; ++i) z = z * z + lambda;
  return z;
}

bool in_w(const ProjPoint& p, double tol) {
  ProjPoint q = normalize(p);
  const int k = q.dim();
  for (int j = 2; j < k; ++j) {
    if (std::abs(q[j] - q[1]) > tol) return false;
  }
  return true;
}

ProjPoint apply_g_lambda(const Params& params, const ProjPoint& p) {
  if (p.dim() != params.k) throw Error(ErrorCode::DimensionMismatch, "g_lambda expects a point of P^k");
  if (!in_w(p)) throw Error(ErrorCode::NotInW, "point violates w_1 = ... = w_{k-1}");
  return FLambdaMap(params.k, params.lambda).iterate(p, params.k);
}

ProjPoint p_lambda(int k, cplx lambda) {
  CVec c(k + 1, 1.0);
  c[k] = t_fixed(lambda);
  return ProjPoint(std::move(c));
}

ProjPoint q_lambda(int k, cplx lambda) {
  CVec c(k + 1, 1.0);
  c[k] = -t_fixed(lambda);
  return ProjPoint(std::move(c));
}

std::vector<Preimage> dedupe_points(const std::vector<ProjPoint>& pts, double radius) {
  std::vector<Preimage> out;
  for (const auto& p : pts) {
    bool merged = false;
    for (auto& q : out) {
      if (fs_distance(p, q.point) < radius) {
        ++q.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({p, 1});
  }
  return out;
}

namespace {

// Base-slot inversion shared by f and f_lambda: given z and the squared slots
// (z - 2 x_j)^2 = slot[j-1], returns x_j = (z - s_j sqrt(slot[j-1])) / 2.
void fill_base(const CVec& y, cplx z, unsigned signs, int k, CVec& out) {
  out[0] = z;
  for (int j = 1; j < k; ++j) {
    cplx r = std::sqrt(y[j - 1]);
    if (signs & (1u << (j - 1))) r = -r;
    out[j] = 0.5 * (z - r);
  }
}

}  // namespace

std::vector<Preimage> preimages_f_base(int k, const ProjPoint& target) {
  if (target.dim() != k - 1) throw Error(ErrorCode::DimensionMismatch, "base target must lie in P^{k-1}");
  ProjPoint c = normalize(target);
  const CVec& y = c.coords();
  const cplx z0 = std::sqrt(y[k - 1]);
  std::vector<ProjPoint> pts;
  const unsigned n = 1u << (k - 1);
  pts.reserve(n);
  for (unsigned s = 0; s < n; ++s) {
    CVec x(k);
    fill_base(y, z0, s, k, x);
    pts.push_back(normalize(ProjPoint(std::move(x))));
  }
  return dedupe_points(pts, kPreimageDedupe);
}

std::vector<Preimage> preimages_f_lambda(const Params& params, const ProjPoint& target) {
  const int k = params.k;
  if (target.dim() != k) throw Error(ErrorCode::DimensionMismatch, "target must lie in P^k");
  ProjPoint c = normalize(target);
  const CVec& y = c.coords();
  const cplx z = std::sqrt(y[k - 1]);
  const cplx tt = std::sqrt(y[k] - params.lambda * z * z);
  std::vector<ProjPoint> pts;
  const unsigned n = 1u << k;
  pts.reserve(n);
  for (unsigned s = 0; s < n; ++s) {
    CVec x(k + 1);
    fill_base(y, z, s, k, x);
    x[k] = (s & (1u << (k - 1))) ? -tt : tt;
    pts.push_back(normalize(ProjPoint(std::move(x))));
  }
  return dedupe_points(pts, kPreimageDedupe);
}

std::vector<cplx> preimages_h(cplx lambda, cplx w, int depth) {
  std::vector<cplx> level{w};
  for (int d = 0; d < depth; ++d) {
    std::vector<cplx> next;
    next.reserve(level.size() * 2);
    for (cplx v : level) {
      cplx r = std::sqrt(v - lambda);
      next.push_back(r);
      next.push_back(-r);
    }
    level = std::move(next);
  }
  return level;
}

ProjPoint random_preimage_f_base(int k, const ProjPoint& target, Rng& rng) {
  ProjPoint c = normalize(target);
  const CVec& y = c.coords();
  CVec x(k);
  fill_base(y, std::sqrt(y[k - 1]), static_cast<unsigned>(rng()), k, x);
  return normalize(ProjPoint(std::move(x)));
}

std::vector<std::string> critical_set_membership(int k, const ProjPoint& q, double tol) {
  if (q.dim() != k - 1) throw Error(ErrorCode::DimensionMismatch, "critical set lives in P^{k-1}");
  ProjPoint p = normalize(q);
  std::vector<std::string> out;
  if (std::abs(p[0]) < tol) out.emplace_back("z0=0");
  for (int j = 1; j < k; ++j) {
    if (std::abs(p[0] - 2.0 * p[j]) < tol) out.push_back("z0=2z" + std::to_string(j));
  }
  return out;
}

}  // namespace pkattract
