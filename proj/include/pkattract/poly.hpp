#pragma once

#include <vector>

#include "pkattract/projective.hpp"

namespace pkattract {

/// Dense univariate polynomial, lowest degree first.
struct Poly {
  std::vector<cplx> coeffs;

  Poly() = default;
  explicit Poly(std::vector<cplx> c) : coeffs(std::move(c)) { trim(); }
  Poly(std::initializer_list<cplx> c) : coeffs(c) { trim(); }

  /// Degree after trimming; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  /// Drops exactly-zero leading coefficients.
  void trim();
  cplx eval(cplx z) const;
  Poly derivative() const;
  /// Largest coefficient modulus.
  double norm() const;

  static Poly monomial(int n, cplx c = 1.0);
  /// prod (x - r_i).
  static Poly from_roots(const std::vector<cplx>& roots);
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(cplx s, const Poly& a);

/// All roots with multiplicity, by Aberth-Ehrlich simultaneous iteration on
/// the polynomial rescaled to unit root radius. Throws InvalidParams for
/// degree < 1 and NoConvergence if some |p(root)| stays above 1e-8 ||p||.
std::vector<cplx> poly_roots(const Poly& p, int max_iters = 500);

}  // namespace pkattract
