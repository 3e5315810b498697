#include "pkattract/verification.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <sstream>

#include "pkattract/error.hpp"
#include "pkattract/maps.hpp"
#include "pkattract/rng.hpp"
#include "pkattract/trapping.hpp"

namespace pkattract {

namespace mp = boost::multiprecision;
using QuadC = mp::cpp_complex_quad;

Precision precision_from_env() {
  const char* v = std::getenv("PKATTRACT_PRECISION");
  if (!v || std::string(v).empty() || std::string(v) == "double") return Precision::Double;
  if (std::string(v) == "extended") return Precision::Extended;
  throw Error(ErrorCode::Usage, "PKATTRACT_PRECISION must be 'double' or 'extended'");
}

int precision_bits(Precision p) { return p == Precision::Double ? 53 : 113; }

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::string fmt(cplx z) {
  std::ostringstream os;
  os << std::setprecision(10) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

template <class C>
C make_c(cplx z) {
  return C(z.real(), z.imag());
}

template <class C>
cplx to_cplx(const C& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

template <class C>
double absd(const C& z) {
  using std::abs;
  return static_cast<double>(abs(z));
}

template <class C>
C c_sqrt(const C& z) {
  using std::sqrt;
  return sqrt(z);
}

template <class C>
C t_fixed_c(const C& lam) {
  return C(2) * lam / (C(1) + c_sqrt(C(1) - C(4) * lam));
}

// One step of the f_lambda lift on generic scalars.
template <class C>
std::vector<C> lift_step(const std::vector<C>& x, const C& lam) {
  const int k = static_cast<int>(x.size()) - 1;
  std::vector<C> y(x.size());
  for (int j = 1; j < k; ++j) {
    C d = x[0] - C(2) * x[j];
    y[j - 1] = d * d;
  }
  y[k - 1] = x[0] * x[0];
  y[k] = x[k] * x[k] + lam * x[0] * x[0];
  return y;
}

template <class C>
std::array<C, 3> line_eqs(const C& lam, int k, const C& a, const C& b) {
  const std::array<std::pair<int, int>, 3> zw{{{1, 0}, {1, 1}, {0, 1}}};
  std::array<C, 3> out;
  for (int e = 0; e < 3; ++e) {
    const C z(zw[e].first), w(zw[e].second);
    std::vector<C> x(static_cast<std::size_t>(k) + 1, w);
    x[0] = z;
    x[k] = a * z + b * w;
    for (int i = 0; i < k; ++i) x = lift_step(x, lam);
    out[e] = (x[k] - a * x[0] - b * x[1]) / x[1];
  }
  return out;
}

template <class C>
double max_abs3(const std::array<C, 3>& e) {
  return std::max({absd(e[0]), absd(e[1]), absd(e[2])});
}

// Newton on h^k(a) - sign * a.
template <class C>
C polish_h_cycle(C a, const C& lam, int k, int sign) {
  for (int it = 0; it < 50; ++it) {
    C v = a, dv(1);
    for (int i = 0; i < k; ++i) {
      dv = C(2) * v * dv;
      v = v * v + lam;
    }
    C F = v - C(sign) * a;
    C dF = dv - C(sign);
    C step = F / dF;
    a -= step;
    if (absd(step) <= std::ldexp(1.0, -120)) break;
  }
  return a;
}

template <class C>
C poly_eval_c(const Poly& p, const C& z) {
  C v(0);
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) v = v * z + make_c<C>(*it);
  return v;
}

template <class C>
C polish_poly_root(const Poly& p, const Poly& dp, C z) {
  for (int it = 0; it < 50; ++it) {
    C d = poly_eval_c(dp, z);
    if (absd(d) == 0.0) break;
    C step = poly_eval_c(p, z) / d;
    z -= step;
    if (absd(step) <= std::ldexp(1.0, -120) * std::max(1.0, absd(z))) break;
  }
  return z;
}

double noise_floor(int bits, int k) { return std::ldexp(1.0, -bits) * std::ldexp(16.0, k); }

struct TrackResult {
  double min_residual = std::numeric_limits<double>::infinity();
  std::vector<std::string> witnesses;
};

template <class C>
TrackResult fixed_line_run(cplx lambda, double rho, int k) {
  TrackResult r;
  const C lam = make_c<C>(lambda);
  // (a) case analysis.
  const Poly hk = h_iterate_poly(lambda, k);
  const Poly x1{0.0, 1.0};
  for (int sign : {1, -1}) {
    const Poly eq = sign > 0 ? hk - x1 : hk + x1;
    int found = 0;
    for (cplx a0 : poly_roots(eq)) {
      if (std::abs(a0) >= rho * 1.01) continue;
      C a = polish_h_cycle(make_c<C>(a0), lam, k, sign);
      if (absd(a) >= rho) continue;
      ++found;
      C b = sign > 0 ? C(0) : C(-2) * a;
      auto e = line_eqs(lam, k, a, b);
      double res = max_abs3(e);
      r.min_residual = std::min(r.min_residual, res);
      r.witnesses.push_back(std::string(sign > 0 ? "beta=0" : "beta=-2alpha") + ": alpha=" + fmt(to_cplx(a)) +
                            " eq3 residual=" + fmt(absd(e[2])));
    }
    if (found == 0) r.witnesses.push_back(std::string(sign > 0 ? "beta=0" : "beta=-2alpha") + ": no candidate");
  }

  // (b) grid over |alpha| < rho, |beta| < 3 rho, then compass refinement.
  auto objective = [&](const std::array<double, 4>& v) {
    const cplx a(v[0], v[1]), b(v[2], v[3]);
    if (std::abs(a) >= rho || std::abs(b) >= 3.0 * rho) return std::numeric_limits<double>::infinity();
    return max_abs3(line_eqs(lam, k, make_c<C>(a), make_c<C>(b)));
  };
  const int g = 9;
  std::vector<std::pair<double, std::array<double, 4>>> starts;
  for (int i0 = 0; i0 < g; ++i0)
    for (int i1 = 0; i1 < g; ++i1)
      for (int i2 = 0; i2 < g; ++i2)
        for (int i3 = 0; i3 < g; ++i3) {
          auto at = [&](int i, double R) { return R * (2.0 * (i + 0.5) / g - 1.0); };
          std::array<double, 4> v{at(i0, rho), at(i1, rho), at(i2, 3 * rho), at(i3, 3 * rho)};
          double f = objective(v);
          if (std::isfinite(f)) starts.emplace_back(f, v);
        }
  std::sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  starts.resize(std::min<std::size_t>(starts.size(), 6));
  double best = std::numeric_limits<double>::infinity();
  std::array<double, 4> best_v{};
  for (auto [f, v] : starts) {
    double step = rho / 8.0;
    int evals = 0;
    while (step > rho * 1e-10 && evals < 4000) {
      bool moved = false;
      for (int d = 0; d < 4 && !moved; ++d)
        for (double sgn : {1.0, -1.0}) {
          auto w = v;
          w[d] += sgn * step;
          double fw = objective(w);
          ++evals;
          if (fw < f) {
            f = fw;
            v = w;
            moved = true;
            break;
          }
        }
      if (!moved) step *= 0.5;
    }
    if (f < best) {
      best = f;
      best_v = v;
    }
  }
  r.witnesses.push_back("sweep: min max|eq| = " + fmt(best) + " at alpha=" + fmt(cplx(best_v[0], best_v[1])) +
                        " beta=" + fmt(cplx(best_v[2], best_v[3])));
  r.min_residual = std::min(r.min_residual, best);
  return r;
}

template <class C>
std::vector<C> h_backward(const C& lam, const C& w, int depth) {
  std::vector<C> level{w};
  for (int d = 0; d < depth; ++d) {
    std::vector<C> next;
    next.reserve(level.size() * 2);
    for (const C& v : level) {
      C r = c_sqrt(v - lam);
      next.push_back(r);
      next.push_back(-r);
    }
    level = std::move(next);
  }
  return level;
}

template <class C>
TrackResult escape_run(cplx lambda, double rho, int k) {
  TrackResult r;
  const C lam = make_c<C>(lambda);
  const C t = t_fixed_c(lam);
  const double td = absd(t);
  auto margin = [&](const C& s, double base_norm) { return absd(s) / (rho * base_norm) - 1.0; };

  // (a) h^k(s) = t on L, excluding +-t.
  int excluded = 0;
  double ma = std::numeric_limits<double>::infinity();
  for (const C& s : h_backward(lam, t, k)) {
    if (absd(s - t) < 1e-6 * td || absd(s + t) < 1e-6 * td) {
      ++excluded;
      continue;
    }
    ma = std::min(ma, margin(s, 1.0));
  }
  r.witnesses.push_back("p-preimages on L: excluded " + std::to_string(excluded) + " (+-t), min margin " + fmt(ma));
  if (excluded != 2) {
    r.witnesses.push_back("expected exactly +-t among the preimages of t");
    ma = -1.0;
  }
  r.min_residual = std::min(r.min_residual, ma);

  // (b) h^k(s) = -t: points [1:0:...:0:s].
  double mb = std::numeric_limits<double>::infinity();
  for (const C& s : h_backward(lam, C(-t), k)) mb = std::min(mb, margin(s, 1.0));
  r.witnesses.push_back("q-preimages [1:0:...:0:s]: min margin " + fmt(mb));
  r.min_residual = std::min(r.min_residual, mb);

  // (c) z from the expanded z-equation, then s from the t-equation.
  const Poly pz = escape_z_polynomial(k);
  const Poly dpz = pz.derivative();
  const std::vector<C> us = h_backward(lam, C(-t), k - 1);
  double mc = std::numeric_limits<double>::infinity();
  int npts = 0;
  for (cplx z0 : poly_roots(pz)) {
    C z = polish_poly_root(pz, dpz, make_c<C>(z0));
    if (absd(z - C(2)) < 1e-8) continue;
    const C zm2 = (z - C(2)) * (z - C(2));
    for (const C& u : us) {
      C s = c_sqrt(u * zm2 - lam * z * z);
      for (const C& ss : {s, C(-s)}) {
        mc = std::min(mc, margin(ss, std::max(1.0, absd(z))));
        ++npts;
      }
    }
  }
  r.witnesses.push_back("q-preimages [z:1:...:1:s]: " + std::to_string(npts) + " points, min margin " + fmt(mc));
  r.min_residual = std::min(r.min_residual, mc);
  return r;
}

}  // namespace

Poly h_iterate_poly(cplx lambda, int n) {
  Poly p{0.0, 1.0};
  for (int i = 0; i < n; ++i) p = p * p + Poly{lambda};
  return p;
}

std::array<cplx, 3> fixed_line_equations(cplx lambda, int k, cplx alpha, cplx beta) {
  return line_eqs<cplx>(lambda, k, alpha, beta);
}

double fixed_line_threshold(cplx lambda, int k) {
  const double a = std::abs(lambda);
  return std::max(std::pow(a, 3), std::pow(a, k)) / 10.0;
}

LemmaReport check_fixed_line(cplx lambda, double rho, int k, Precision precision) {
  Params::make(k, lambda, rho);
  LemmaReport rep;
  rep.lemma_id = "fixed_line";
  rep.threshold = fixed_line_threshold(lambda, k);
  rep.advisory = std::abs(lambda) > kSmallLambda;
  if (std::abs(lambda) < 1e-3) precision = Precision::Extended;
  for (;;) {
    const int bits = precision_bits(precision);
    TrackResult tr = precision == Precision::Double ? fixed_line_run<cplx>(lambda, rho, k)
                                                    : fixed_line_run<QuadC>(lambda, rho, k);
    if (tr.min_residual < 10.0 * noise_floor(bits, k)) {
      if (precision == Precision::Double) {
        precision = Precision::Extended;
        continue;
      }
      throw Error(ErrorCode::PrecisionInsufficient,
                  "fixed-line residual " + fmt(tr.min_residual) + " is at the arithmetic noise floor");
    }
    rep.precision_used = bits;
    rep.min_residual = tr.min_residual;
    rep.witnesses = std::move(tr.witnesses);
    break;
  }
  rep.passed = rep.min_residual > rep.threshold;
  return rep;
}

std::vector<std::pair<double, double>> preimage_magnitude_ratios(cplx lambda, int k) {
  std::vector<std::pair<double, double>> out;
  const cplx t = t_fixed(lambda);
  for (int j = 1; j <= k; ++j) {
    std::vector<cplx> all = h_backward<cplx>(lambda, -t, j);
    const double scale = std::pow(std::abs(lambda), 1.0 / std::ldexp(1.0, j));
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (cplx s : all) {
      lo = std::min(lo, std::abs(s) / scale);
      hi = std::max(hi, std::abs(s) / scale);
    }
    out.emplace_back(lo, hi);
  }
  return out;
}

Poly escape_z_polynomial(int k) {
  // Base map on [z : 1 : ... : 1] with each slot a polynomial in z.
  std::vector<Poly> x(static_cast<std::size_t>(k), Poly{1.0});
  x[0] = Poly{0.0, 1.0};
  for (int i = 0; i < k; ++i) {
    std::vector<Poly> y(x.size());
    for (int j = 1; j < k; ++j) {
      Poly d = x[0] - cplx(2.0) * x[j];
      y[j - 1] = d * d;
    }
    y[k - 1] = x[0] * x[0];
    x = std::move(y);
  }
  return x[0] - x[1];
}

LemmaReport check_preimage_escape(cplx lambda, double rho, int k, Precision precision) {
  Params::make(k, lambda, rho);
  LemmaReport rep;
  rep.lemma_id = "preimage_escape";
  rep.threshold = 0.0;
  rep.advisory = std::abs(lambda) > kSmallLambda;
  if (std::abs(lambda) < 1e-3) precision = Precision::Extended;
  for (;;) {
    const int bits = precision_bits(precision);
    TrackResult tr = precision == Precision::Double ? escape_run<cplx>(lambda, rho, k)
                                                    : escape_run<QuadC>(lambda, rho, k);
    if (std::abs(tr.min_residual) < 10.0 * noise_floor(bits, k)) {
      if (precision == Precision::Double) {
        precision = Precision::Extended;
        continue;
      }
      throw Error(ErrorCode::PrecisionInsufficient, "escape margin is at the arithmetic noise floor");
    }
    rep.precision_used = bits;
    rep.min_residual = tr.min_residual;
    rep.witnesses = std::move(tr.witnesses);
    break;
  }
  // Magnitude side report, folded in as log-distance to the ends of [0.5, 2].
  const auto ratios = preimage_magnitude_ratios(lambda, k);
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    const auto [lo, hi] = ratios[j];
    rep.witnesses.push_back("|h^-" + std::to_string(j + 1) + "(-t)| / |lambda|^(1/2^" + std::to_string(j + 1) +
                            ") in [" + fmt(lo) + ", " + fmt(hi) + "]");
    rep.min_residual = std::min({rep.min_residual, std::log(lo / 0.5), std::log(2.0 / hi)});
  }
  rep.passed = rep.min_residual > rep.threshold;
  return rep;
}

std::vector<cplx> fixed_point_spectrum(cplx lambda, int k) {
  FLambdaMap f(k, lambda);
  ChartJacobian J = jacobian_chart(f, p_lambda(k, lambda), 0, 0);
  Eigen::ComplexEigenSolver<CMat> es(J.matrix, false);
  std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

LemmaReport check_hyperbolic_eigenvalues(cplx lambda, int k) {
  if (!(std::abs(lambda) < kSmallLambda))
    throw Error(ErrorCode::LambdaOutOfRange, "eigenvalue check needs |lambda| < 0.05");
  LemmaReport rep;
  rep.lemma_id = "hyperbolic_eigenvalues";
  std::vector<cplx> ev = fixed_point_spectrum(lambda, k);
  const cplx stable = 2.0 * t_fixed(lambda);
  std::size_t is = 0;
  for (std::size_t i = 1; i < ev.size(); ++i)
    if (std::abs(ev[i] - stable) < std::abs(ev[is] - stable)) is = i;
  double worst4 = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    rep.witnesses.push_back("eigenvalue " + fmt(ev[i]));
    if (i != is) worst4 = std::max(worst4, std::abs(std::abs(ev[i]) - 4.0));
  }
  const double e_stable = std::abs(ev[is] - stable);
  rep.witnesses.push_back("|mu - 2t| = " + fmt(e_stable) + ", max ||mu|-4| = " + fmt(worst4) +
                          ", |2t| = " + fmt(std::abs(stable)));
  // Normalized margins; all positive iff every condition holds.
  rep.min_residual = std::min({1.0 - e_stable / 1e-8, 1.0 - worst4 / (10.0 * std::abs(lambda)),
                               1.0 - std::abs(stable)});
  rep.threshold = 0.0;
  rep.passed = rep.min_residual > rep.threshold;
  return rep;
}

InvariantSet parse_invariant_set(const std::string& s) {
  if (s == "Pi" || s == "pi") return InvariantSet::Pi;
  if (s == "L" || s == "l") return InvariantSet::L;
  if (s == "W" || s == "w") return InvariantSet::W;
  if (s == "Pk" || s == "pk") return InvariantSet::Pk;
  throw Error(ErrorCode::Usage, "unknown invariant set '" + s + "' (Pi, L, W, Pk)");
}

std::string to_string(InvariantSet s) {
  switch (s) {
    case InvariantSet::Pi: return "Pi";
    case InvariantSet::L: return "L";
    case InvariantSet::W: return "W";
    case InvariantSet::Pk: return "Pk";
  }
  return "?";
}

namespace {

bool on_set(InvariantSet set, const ProjPoint& p, double tol) {
  ProjPoint q = normalize(p);
  const int k = q.dim();
  switch (set) {
    case InvariantSet::L:
      for (int j = 1; j < k; ++j)
        if (std::abs(q[j] - q[0]) > tol) return false;
      return true;
    case InvariantSet::W: return in_w(q, tol);
    default: return true;
  }
}

ProjPoint random_target(InvariantSet set, int k, Rng& rng) {
  if (set == InvariantSet::Pi) {
    CVec c(static_cast<std::size_t>(k));
    for (auto& z : c) z = uniform_disc(rng, 1.0);
    return ProjPoint(std::move(c));
  }
  CVec c(static_cast<std::size_t>(k) + 1);
  for (auto& z : c) z = uniform_disc(rng, 1.0);
  if (set == InvariantSet::L)
    for (int j = 1; j < k; ++j) c[j] = c[0];
  if (set == InvariantSet::W)
    for (int j = 2; j < k; ++j) c[j] = c[1];
  return ProjPoint(std::move(c));
}

}  // namespace

LemmaReport topological_degree_check(MapId map, InvariantSet set, int k, cplx lambda, int trials,
                                     std::uint64_t seed) {
  const bool ok = (set == InvariantSet::Pi && map == MapId::Base) ||
                  ((set == InvariantSet::L || set == InvariantSet::Pk) && map == MapId::FLambda) ||
                  (set == InvariantSet::W && map == MapId::GLambda);
  if (!ok) throw Error(ErrorCode::InvalidParams, "invariant set " + to_string(set) + " does not match the map");
  if (trials < 1) throw Error(ErrorCode::InvalidParams, "trials must be >= 1");
  const Params params{k, lambda, 0.0};
  long long expected = 0;
  switch (set) {
    case InvariantSet::Pi: expected = 1LL << (k - 1); break;
    case InvariantSet::L: expected = 2; break;
    case InvariantSet::Pk: expected = 1LL << k; break;
    case InvariantSet::W: expected = 1LL << (2 * k); break;
  }
  const MapPtr fwd = make_map(map, k, lambda);

  LemmaReport rep;
  rep.lemma_id = "degree_" + to_string(set);
  rep.threshold = 1e-7;
  rep.min_residual = 1.0;
  Rng rng = make_stream(seed, 0);
  int redraws = 0, wrong = 0;
  double worst_forward = 0.0;
  for (int trial = 0; trial < trials;) {
    ProjPoint target = random_target(set, k, rng);
    std::vector<Preimage> pre;
    if (set == InvariantSet::Pi) {
      pre = preimages_f_base(k, target);
    } else if (set == InvariantSet::W) {
      std::vector<ProjPoint> level{target};
      for (int d = 0; d < k; ++d) {
        std::vector<ProjPoint> next;
        for (const auto& p : level)
          for (const auto& q : preimages_f_lambda(params, p)) next.push_back(q.point);
        level = std::move(next);
      }
      pre = dedupe_points(level, kPreimageDedupe);
    } else {
      pre = preimages_f_lambda(params, target);
    }
    bool degenerate = false;
    std::vector<ProjPoint> kept;
    for (const auto& p : pre) {
      if (p.multiplicity > 1) degenerate = true;
      if (on_set(set, p.point, 1e-8)) kept.push_back(p.point);
    }
    if (degenerate) {
      ++redraws;
      if (redraws > 10 * trials) throw Error(ErrorCode::DegenerateTarget, "too many degenerate targets");
      continue;
    }
    for (const auto& p : kept) worst_forward = std::max(worst_forward, fs_distance(fwd->apply(p), target));
    double gap = 1.0;
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = i + 1; j < kept.size(); ++j) gap = std::min(gap, fs_distance(kept[i], kept[j]));
    if (static_cast<long long>(kept.size()) != expected) {
      ++wrong;
      gap = -1.0;
      if (rep.witnesses.size() < 5)
        rep.witnesses.push_back("trial " + std::to_string(trial) + ": " + std::to_string(kept.size()) +
                                " preimages, expected " + std::to_string(expected));
    }
    rep.min_residual = std::min(rep.min_residual, gap);
    ++trial;
  }
  if (worst_forward > 1e-10) rep.min_residual = std::min(rep.min_residual, -worst_forward);
  rep.witnesses.push_back("expected " + std::to_string(expected) + " preimages; " + std::to_string(wrong) +
                          " wrong counts in " + std::to_string(trials) + " trials, " + std::to_string(redraws) +
                          " redraws, max forward residual " + fmt(worst_forward));
  rep.passed = rep.min_residual > rep.threshold;
  return rep;
}

namespace {

double diagonal_distance(const ProjPoint& p) {
  ProjPoint q = normalize(p);
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= q.dim(); ++i)
    for (int j = i + 1; j <= q.dim(); ++j) d = std::min(d, std::abs(q[i] - q[j]));
  return d;
}

std::string relation_label(const ProjPoint& p, double tol) {
  ProjPoint q = normalize(p);
  for (int i = 0; i <= q.dim(); ++i)
    if (std::abs(q[i]) < tol) return "z" + std::to_string(i) + "=0";
  for (int i = 0; i <= q.dim(); ++i)
    for (int j = i + 1; j <= q.dim(); ++j)
      if (std::abs(q[i] - q[j]) < tol) return "z" + std::to_string(i) + "=z" + std::to_string(j);
  return "generic";
}

int distinct_values(const ProjPoint& p, double tol) {
  ProjPoint q = normalize(p);
  std::vector<cplx> reps;
  for (int i = 0; i <= q.dim(); ++i) {
    bool found = false;
    for (cplx r : reps)
      if (std::abs(r - q[i]) < tol) found = true;
    if (!found) reps.push_back(q[i]);
  }
  return static_cast<int>(reps.size());
}

}  // namespace

CriticalOrbitReport critical_orbit_trace(int k, int samples, int iters, std::uint64_t seed) {
  if (k < 2 || samples < 1 || iters < 3) throw Error(ErrorCode::InvalidParams, "need k >= 2, samples >= 1, iters >= 3");
  BaseMap f(k);
  CriticalOrbitReport rep;
  rep.k = k;
  Rng rng = make_stream(seed, 0);
  auto random_point = [&] {
    CVec c(static_cast<std::size_t>(k));
    for (auto& z : c) z = uniform_disc(rng, 1.0);
    return c;
  };
  constexpr double tol = 1e-10;
  bool ok = true;
  for (int comp = 0; comp < k; ++comp) {
    ComponentTrace tr;
    tr.component = comp == 0 ? "z0=0" : "z0=2z" + std::to_string(comp);
    for (int s = 0; s < samples; ++s) {
      CVec c = random_point();
      if (comp == 0) c[0] = 0.0;
      else c[0] = 2.0 * c[comp];
      ProjPoint x = normalize(ProjPoint(std::move(c)));
      int hit = -1;
      for (int i = 0; i <= iters; ++i) {
        if (s == 0 && i <= 6) tr.itinerary.push_back(relation_label(x, tol));
        double d = diagonal_distance(x);
        if (hit < 0 && d < tol) hit = i;
        if (hit >= 0) tr.residual_after_hit = std::max(tr.residual_after_hit, d);
        x = f.apply(x);
      }
      tr.first_hit = std::max(tr.first_hit, hit < 0 ? iters + 1 : hit);
    }
    if (tr.first_hit > 3 || tr.residual_after_hit > tol) ok = false;
    rep.components.push_back(std::move(tr));
  }

  // Strata E_m: coordinates merged into k - m classes stay merged, and E_{k-1}
  // is the fixed point [1:...:1].
  const ProjPoint ones(CVec(static_cast<std::size_t>(k), 1.0));
  for (int m = 1; m <= k - 1; ++m) {
    for (int s = 0; s < samples; ++s) {
      CVec base = random_point();
      CVec c(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) c[i] = base[static_cast<std::size_t>(rng() % static_cast<unsigned>(k - m))];
      // Make sure every class is used so the point lies on exactly m merges.
      for (int i = 0; i < k - m; ++i) c[i] = base[i];
      ProjPoint x = normalize(ProjPoint(std::move(c)));
      for (int i = 0; i < iters; ++i) {
        x = f.apply(x);
        if (distinct_values(x, tol) > k - m) ok = false;
      }
      if (m == k - 1) rep.intersection_residual = std::max(rep.intersection_residual, fs_distance(x, ones));
    }
  }
  if (rep.intersection_residual > tol) ok = false;

  rep.control_min_distance = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    ProjPoint x = normalize(ProjPoint(random_point()));
    for (int i = 1; i <= 3; ++i) {
      x = f.apply(x);
      rep.control_min_distance = std::min(rep.control_min_distance, diagonal_distance(x));
    }
  }
  if (!(rep.control_min_distance > 1e-6)) ok = false;
  rep.passed = ok;
  return rep;
}

LemmaReport to_lemma_report(const CriticalOrbitReport& r) {
  LemmaReport rep;
  rep.lemma_id = "critical_orbit";
  rep.threshold = 1e-6;
  // Structural failures force the residual negative; otherwise the control
  // distance is what must stay clear of the diagonals.
  rep.min_residual = r.passed ? r.control_min_distance : -1.0;
  for (const auto& c : r.components) {
    std::string it;
    for (const auto& s : c.itinerary) it += (it.empty() ? "" : " -> ") + s;
    rep.witnesses.push_back(c.component + ": hits diagonals by step " + std::to_string(c.first_hit) +
                            ", residual after " + fmt(c.residual_after_hit) + "; " + it);
  }
  rep.witnesses.push_back("E_{k-1} iterates to [1:...:1] within " + fmt(r.intersection_residual));
  rep.witnesses.push_back("generic control min diagonal distance " + fmt(r.control_min_distance));
  rep.passed = rep.min_residual > rep.threshold;
  return rep;
}

std::vector<ChartPair> w_chart(const Cloud& cloud, double max_abs_u) {
  std::vector<ChartPair> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    const int k = p.dim();
    const cplx w = p[1];
    if (w == cplx(0.0)) continue;
    const cplx u = p[0] / w;
    if (std::abs(u) > max_abs_u) continue;
    out.push_back({u, p[k] / w});
  }
  return out;
}

Cloud sample_m_lambda(const Params& params, std::size_t n, std::uint64_t seed, int burn_in, int per_orbit) {
  const int k = params.k;
  FLambdaMap f(k, params.lambda);
  const std::size_t orbits = (n + static_cast<std::size_t>(per_orbit) - 1) / static_cast<std::size_t>(per_orbit);
  std::vector<ProjPoint> pts(orbits * static_cast<std::size_t>(per_orbit));
  parallel_chunks(orbits, 1, seed, [&](std::size_t b, std::size_t e, Rng& rng) {
    for (std::size_t o = b; o < e; ++o) {
      CVec c(static_cast<std::size_t>(k) + 1);
      c[0] = uniform_disc(rng, 1.0);
      const cplx w = uniform_disc(rng, 1.0);
      for (int j = 1; j < k; ++j) c[j] = w;
      c[k] = uniform_disc(rng, 0.5 * params.rho * std::max(std::abs(c[0]), std::abs(w)));
      ProjPoint x = f.iterate(ProjPoint(std::move(c)), k * burn_in);
      for (int s = 0; s < per_orbit; ++s) {
        x = f.iterate(x, k);
        pts[o * static_cast<std::size_t>(per_orbit) + static_cast<std::size_t>(s)] = x;
      }
    }
  });
  pts.resize(n);
  return Cloud::uniform(k, std::move(pts));
}

std::vector<std::pair<int, double>> algebraicity_residual(const std::vector<ChartPair>& pts, int max_degree) {
  if (max_degree < 1) throw Error(ErrorCode::InvalidParams, "max_degree must be >= 1");
  const std::size_t need = 10u * static_cast<std::size_t>((max_degree + 1) * (max_degree + 2) / 2);
  if (pts.size() < need)
    throw Error(ErrorCode::InsufficientSamples,
                "need " + std::to_string(need) + " points, got " + std::to_string(pts.size()));
  const Eigen::Index N = static_cast<Eigen::Index>(pts.size());
  std::vector<std::pair<int, double>> out;
  for (int D = 1; D <= max_degree; ++D) {
    const Eigen::Index m = (D + 1) * (D + 2) / 2;
    CMat A(N, m);
    Eigen::Index col = 0;
    for (int tot = 0; tot <= D; ++tot)
      for (int j = 0; j <= tot; ++j, ++col)
        for (Eigen::Index r = 0; r < N; ++r)
          A(r, col) = std::pow(pts[static_cast<std::size_t>(r)][0], tot - j) *
                      std::pow(pts[static_cast<std::size_t>(r)][1], j);
    for (Eigen::Index c = 0; c < m; ++c) {
      double nrm = A.col(c).norm();
      if (nrm > 0.0) A.col(c) /= nrm;
    }
    Eigen::BDCSVD<CMat> svd(A);
    const auto& sv = svd.singularValues();
    out.emplace_back(D, sv(sv.size() - 1) / sv(0));
  }
  return out;
}

NonalgebraicityReport nonalgebraicity_witness(const Params& params, std::size_t n, int max_degree,
                                              std::uint64_t seed) {
  NonalgebraicityReport rep;
  Rng rng = make_stream(seed, 1);
  std::vector<ChartPair> line(n), conic(n);
  for (std::size_t i = 0; i < n; ++i) {
    line[i] = {1.0, uniform_disc(rng, 0.05)};
    cplx u = uniform_disc(rng, 1.0);
    conic[i] = {u, u * u};
  }
  rep.line_control = algebraicity_residual(line, max_degree);
  rep.conic_control = algebraicity_residual(conic, max_degree);
  rep.controls_ok = rep.line_control[0].second < 1e-10 && rep.conic_control[0].second > 1e-6 &&
                    (max_degree < 2 || rep.conic_control[1].second < 1e-10);

  std::vector<ChartPair> m = w_chart(sample_m_lambda(params, 2 * n, seed));
  if (m.size() > n) m.resize(n);
  rep.attractor = algebraicity_residual(m, max_degree);
  rep.min_sigma = std::numeric_limits<double>::infinity();
  for (const auto& [D, s] : rep.attractor) rep.min_sigma = std::min(rep.min_sigma, s);
  rep.passed = rep.controls_ok && rep.min_sigma > 1e-3;
  return rep;
}

LemmaReport to_lemma_report(const NonalgebraicityReport& r) {
  LemmaReport rep;
  rep.lemma_id = "nonalgebraicity";
  rep.threshold = 1e-3;
  rep.min_residual = r.controls_ok ? r.min_sigma : -1.0;
  auto row = [](const std::string& name, const std::vector<std::pair<int, double>>& v) {
    std::string s = name + ":";
    for (const auto& [D, x] : v) s += " D" + std::to_string(D) + "=" + fmt(x);
    return s;
  };
  rep.witnesses.push_back(row("line control", r.line_control));
  rep.witnesses.push_back(row("conic control", r.conic_control));
  rep.witnesses.push_back(row("M cloud", r.attractor));
  rep.passed = rep.min_residual > rep.threshold;
  return rep;
}

}  // namespace pkattract
