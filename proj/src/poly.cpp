#include "pkattract/poly.hpp"

#include <cmath>
#include <numbers>

#include "pkattract/error.hpp"

namespace pkattract {

void Poly::trim() {
  while (!coeffs.empty() && coeffs.back() == cplx(0.0)) coeffs.pop_back();
}

cplx Poly::eval(cplx z) const {
  cplx v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * z + *it;
  return v;
}

Poly Poly::derivative() const {
  if (coeffs.size() <= 1) return {};
  std::vector<cplx> d(coeffs.size() - 1);
  for (std::size_t i = 1; i < coeffs.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs[i];
  return Poly(std::move(d));
}

double Poly::norm() const {
  double m = 0.0;
  for (cplx c : coeffs) m = std::max(m, std::abs(c));
  return m;
}

Poly Poly::monomial(int n, cplx c) {
  std::vector<cplx> v(static_cast<std::size_t>(n) + 1, 0.0);
  v.back() = c;
  return Poly(std::move(v));
}

Poly Poly::from_roots(const std::vector<cplx>& roots) {
  Poly p{1.0};
  for (cplx r : roots) p = p * Poly{-r, 1.0};
  return p;
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<cplx> c(std::max(a.coeffs.size(), b.coeffs.size()), 0.0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] += a.coeffs[i];
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] += b.coeffs[i];
  return Poly(std::move(c));
}

Poly operator-(const Poly& a, const Poly& b) { return a + cplx(-1.0) * b; }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.coeffs.empty() || b.coeffs.empty()) return {};
  std::vector<cplx> c(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] += a.coeffs[i] * b.coeffs[j];
  return Poly(std::move(c));
}

Poly operator*(cplx s, const Poly& a) {
  std::vector<cplx> c = a.coeffs;
  for (auto& x : c) x *= s;
  return Poly(std::move(c));
}

namespace {

// |q(y)| against sum |q_i| |y|^i.
double relative_value(const std::vector<cplx>& q, cplx y) {
  cplx v = 0.0;
  double s = 0.0;
  const double ay = std::abs(y);
  for (auto i = q.size(); i-- > 0;) {
    v = v * y + q[i];
    s = s * ay + std::abs(q[i]);
  }
  return s > 0.0 ? std::abs(v) / s : 0.0;
}

}  // namespace

std::vector<cplx> poly_roots(const Poly& p, int max_iters) {
  Poly P = p;
  P.trim();
  if (P.degree() < 1) throw Error(ErrorCode::InvalidParams, "poly_roots needs degree >= 1");

  std::vector<cplx> roots;
  std::size_t lo = 0;
  while (P.coeffs[lo] == cplx(0.0)) {
    roots.emplace_back(0.0);
    ++lo;
  }
  std::vector<cplx> c(P.coeffs.begin() + static_cast<std::ptrdiff_t>(lo), P.coeffs.end());
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return roots;

  // x = R y with R the geometric mean of the root moduli, then make monic.
  const double R = std::pow(std::abs(c[0]) / std::abs(c[n]), 1.0 / n);
  std::vector<cplx> q(c.size());
  double Rk = 1.0;
  for (int i = 0; i <= n; ++i, Rk *= R) q[i] = c[i] * Rk;
  const cplx lead = q[n];
  for (auto& x : q) x /= lead;
  std::vector<cplx> dq(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) dq[i - 1] = static_cast<double>(i) * q[i];

  auto horner = [](const std::vector<cplx>& v, cplx y) {
    cplx s = 0.0;
    for (auto i = v.size(); i-- > 0;) s = s * y + v[i];
    return s;
  };

  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[i] = std::polar(1.0, 2.0 * std::numbers::pi * (i + 0.25) / n + 0.4);

  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (int it = 0; it < max_iters; ++it) {
    bool all = true;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      const cplx pv = horner(q, z[i]);
      const cplx dv = horner(dq, z[i]);
      if (pv == cplx(0.0)) {
        done[i] = true;
        continue;
      }
      const cplx w = pv / dv;
      cplx s = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      const cplx step = w / (1.0 - w * s);
      z[i] -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z[i]))) done[i] = true;
      else all = false;
    }
    if (all) break;
  }

  for (int i = 0; i < n; ++i) {
    if (relative_value(q, z[i]) > 1e-8)
      throw Error(ErrorCode::NoConvergence, "Aberth iteration left a root with large residual");
    roots.push_back(z[i] * R);
  }
  return roots;
}

}  // namespace pkattract
