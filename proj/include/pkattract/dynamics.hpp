#pragma once

#include <string>
#include <vector>

#include "pkattract/maps.hpp"
#include "pkattract/rng.hpp"

namespace pkattract {

/// Configuration of f_lambda and its trapping region U_rho.
/// Invariants (checked by make): k >= 2 and 0 < 2|lambda| < rho < sqrt|lambda|.
struct Params {
  int k = 2;
  cplx lambda{0.01, 0.0};
  double rho = 0.0;

  static Params make(int k, cplx lambda, double rho);
  /// Same as make() with rho = default_rho(lambda).
  static Params with_default_rho(int k, cplx lambda);
};

/// A preimage with its multiplicity (> 1 only at critical values).
struct Preimage {
  ProjPoint point;
  int multiplicity = 1;
};

/// Dedupe radius (fs_distance) used by the closed-form preimage solvers.
inline constexpr double kPreimageDedupe = 1e-9;

/// Attracting fixed point of h_lambda: the root of t^2 - t + lambda = 0 that
/// vanishes at lambda = 0, evaluated as 2 lambda / (1 + sqrt(1 - 4 lambda)).
cplx t_fixed(cplx lambda);

ProjPoint apply_f_lambda(const Params& params, const ProjPoint& p);
ProjPoint apply_f_base(int k, const ProjPoint& q);
cplx apply_h(cplx lambda, cplx z);
/// h_lambda iterated n times.
cplx apply_h_iter(cplx lambda, cplx z, int n);

/// True when w_1 = ... = w_{k-1} to `tol` on the normalized representative.
bool in_w(const ProjPoint& p, double tol = 1e-9);
/// g_lambda = f_lambda^k restricted to W. Throws NotInW.
ProjPoint apply_g_lambda(const Params& params, const ProjPoint& p);

/// p_lambda = [1:...:1:t_lambda] and q_lambda = [1:...:1:-t_lambda].
ProjPoint p_lambda(int k, cplx lambda);
ProjPoint q_lambda(int k, cplx lambda);

/// All 2^{k-1} preimages under the base map (multiplicities sum to 2^{k-1}).
std::vector<Preimage> preimages_f_base(int k, const ProjPoint& target);
/// All 2^k preimages under f_lambda (multiplicities sum to 2^k).
std::vector<Preimage> preimages_f_lambda(const Params& params, const ProjPoint& target);
/// All 2^depth solutions of h_lambda^depth(s) = w, with repetition.
std::vector<cplx> preimages_h(cplx lambda, cplx w, int depth);

/// One base-map preimage with uniformly random sign pattern. Equivalent to a
/// multiplicity-weighted uniform draw from preimages_f_base.
ProjPoint random_preimage_f_base(int k, const ProjPoint& target, Rng& rng);

/// Groups points closer than `radius` and counts multiplicities.
std::vector<Preimage> dedupe_points(const std::vector<ProjPoint>& pts, double radius);

/// Components of the base critical set {z_0 = 0} U {z_0 = 2 z_j} containing q
/// within tol. Labels are "z0=0" and "z0=2z<j>".
std::vector<std::string> critical_set_membership(int k, const ProjPoint& q, double tol);

}  // namespace pkattract
