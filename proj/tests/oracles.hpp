#pragma once

// Independent reference computations for the tests. Everything here is
// written from scratch in long double, sharing no code with the library.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using lcplx = std::complex<long double>;
using LVec = std::vector<lcplx>;

// Smaller root of t^2 - t + lambda via the textbook quadratic formula.
inline lcplx t_fixed(lcplx lambda) { return (1.0L - std::sqrt(1.0L - 4.0L * lambda)) / 2.0L; }

// Chordal distance from the Hermitian inner product directly.
inline long double fs_distance(const LVec& p, const LVec& q) {
  lcplx ip = 0;
  long double np = 0, nq = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ip += p[i] * std::conj(q[i]);
    np += std::norm(p[i]);
    nq += std::norm(q[i]);
  }
  long double c = std::norm(ip) / (np * nq);
  return std::sqrt(std::max(0.0L, 1.0L - c));
}

// k=2 base map in the chart x = z1/z0: x -> z0^2/(z0-2 z1)^2.
inline lcplx base_chart_k2(lcplx x) {
  lcplx d = 1.0L - 2.0L * x;
  return 1.0L / (d * d);
}

// f_lambda written slot by slot.
inline LVec f_lambda(const LVec& x, lcplx lambda) {
  const std::size_t k = x.size() - 1;
  LVec y(k + 1);
  for (std::size_t j = 1; j < k; ++j) y[j - 1] = (x[0] - 2.0L * x[j]) * (x[0] - 2.0L * x[j]);
  y[k - 1] = x[0] * x[0];
  y[k] = x[k] * x[k] + lambda * x[0] * x[0];
  return y;
}

inline LVec base_map(const LVec& x) {
  const std::size_t k = x.size();
  LVec y(k);
  for (std::size_t j = 1; j < k; ++j) y[j - 1] = (x[0] - 2.0L * x[j]) * (x[0] - 2.0L * x[j]);
  y[k - 1] = x[0] * x[0];
  return y;
}

}  // namespace oracle
