#pragma once

#include <cstdint>
#include <vector>

#include "pkattract/cloud.hpp"
#include "pkattract/dynamics.hpp"
#include "pkattract/history.hpp"

namespace pkattract {

/// sqrt(2) |lambda|^{3/4}, the geometric mean of 2|lambda| and sqrt|lambda|.
/// Throws LambdaOutOfRange unless 0 < |lambda| < 1/4.
double default_rho(cplx lambda);

struct TrapMembership {
  bool inside = false;
  double margin = 0.0;  // rho * max(|z|,|w_j|) - |t| on the normalized point
};

TrapMembership in_trap(const Params& params, const ProjPoint& p);

/// Uniform base chart coordinates in the unit polydisc of a random chart and
/// t uniform in the disc of radius rho. Always lands in U_rho.
ProjPoint sample_trap_point(const Params& params, Rng& rng);

struct TrapReport {
  int samples = 0;
  double max_image_ratio = 0.0;
  double margin = 0.0;
  int violations = 0;
  ProjPoint witness;  // worst sample
};

/// Maps uniform U_rho samples once and records |t'| / max(|z'|,|w'_j|).
/// A sample with ratio >= 2|lambda| counts as a violation; with
/// throw_on_violation the first report containing one raises TrapViolation.
TrapReport trap_forward_check(const Params& params, int n_samples, std::uint64_t seed, int workers = 1,
                              bool throw_on_violation = true);

/// diam f_lambda^m(V_a) for m = 1..n, from n_fiber points on the boundary
/// circle of the fiber disc V_a.
std::vector<double> fiber_contraction(const Params& params, const ProjPoint& a, int n, int n_fiber = 32);

struct PhiOptions {
  /// Stop refining once the fiber-disc diameter bound falls below tol.
  bool early_stop = false;
  double tol = 1e-12;
  int n_boundary = 16;
};

struct PhiResult {
  ProjPoint point;
  double error_bound = 0.0;  // diam f_lambda^n(V_{a_{-n}}) along the used prehistory
  int depth_used = 0;
};

/// f_lambda^n(embed_pi(a_{-n})) for the prehistory a. Base coordinates are
/// taken from the prehistory itself; only the fiber coordinate is iterated.
/// Throws InvalidPrehistory.
PhiResult phi_lambda(const Params& params, const Prehistory& a, const PhiOptions& opts = {});

/// n+1 points start, f(start), ..., f^n(start).
std::vector<ProjPoint> iterate_orbit(const Params& params, const ProjPoint& start, int n);

/// Forward orbits from random U_rho starts: burn_in steps discarded, then
/// per_orbit consecutive points kept. Requires burn_in >= 20.
Cloud sample_attractor_forward(const Params& params, int burn_in, int n_samples, std::uint64_t seed,
                               int workers = 1, int per_orbit = 64);

}  // namespace pkattract
