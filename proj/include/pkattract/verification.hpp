#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pkattract/cloud.hpp"
#include "pkattract/dynamics.hpp"
#include "pkattract/poly.hpp"

namespace pkattract {

struct LemmaReport {
  std::string lemma_id;
  bool passed = false;
  double min_residual = 0.0;
  double threshold = 0.0;  // passed iff min_residual > threshold
  std::vector<std::string> witnesses;
  int precision_used = 53;  // mantissa bits
  bool advisory = false;    // |lambda| outside the calibrated domain
};

enum class Precision { Double, Extended };

/// PKATTRACT_PRECISION=double|extended; unset means double. Extended is
/// 113-bit binary floating point.
Precision precision_from_env();
int precision_bits(Precision p);

/// |lambda| above this is outside the domain the checkers were calibrated on.
inline constexpr double kSmallLambda = 0.05;

/// h_lambda^n expanded in powers of its argument (degree 2^n).
Poly h_iterate_poly(cplx lambda, int n);

/// Residuals of the three line conditions for {t = alpha z + beta w} in W,
/// obtained from g_lambda at (z, w) = (1, 0), (1, 1), (0, 1): each entry is
/// t' / w' - alpha z' / w' - beta for the image [z' : w' : ... : t'].
std::array<cplx, 3> fixed_line_equations(cplx lambda, int k, cplx alpha, cplx beta);

/// max(|lambda|^3, |lambda|^k) / 10: the cases left by the first two line
/// conditions miss the third by about |lambda|^k (k >= 3) or |lambda|^2 (k = 2).
double fixed_line_threshold(cplx lambda, int k);

/// No g_lambda-invariant line {t = alpha z + beta w} inside U: the case
/// analysis (beta = 0 and beta = -2 alpha) plus a global sweep over
/// |alpha| < rho, |beta| < 3 rho. Retries in extended precision when the
/// residual is within 10x of the arithmetic noise; throws
/// PrecisionInsufficient if that is still not enough.
LemmaReport check_fixed_line(cplx lambda, double rho, int k, Precision precision = precision_from_env());

/// |h^{-j}(-t_lambda)| / |lambda|^{1/2^j} for j = 1..k, as (min, max) over
/// the 2^j branches.
std::vector<std::pair<double, double>> preimage_magnitude_ratios(cplx lambda, int k);

/// z-equation of the second case: the z-slot of f^k on [z : 1 : ... : 1]
/// minus its w-slot, a polynomial of degree 2^k.
Poly escape_z_polynomial(int k);

/// Preimages of p_lambda on L (other than +-t_lambda) and all preimages of
/// q_lambda under g_lambda lie outside U. min_residual is the smallest escape
/// margin |t| / (rho max(|z|, |w|)) - 1.
LemmaReport check_preimage_escape(cplx lambda, double rho, int k, Precision precision = precision_from_env());

/// Eigenvalues of the chart Jacobian of f_lambda at p_lambda (chart z = 1).
std::vector<cplx> fixed_point_spectrum(cplx lambda, int k);

/// One eigenvalue equals 2 t_lambda, the rest have modulus 4 within
/// 10 |lambda|, and |2 t_lambda| < 1. Throws LambdaOutOfRange for
/// |lambda| >= 0.05.
LemmaReport check_hyperbolic_eigenvalues(cplx lambda, int k);

enum class InvariantSet { Pi, L, W, Pk };
InvariantSet parse_invariant_set(const std::string& s);
std::string to_string(InvariantSet s);

/// Generic preimage counts on an invariant set: Pi under the base map
/// (2^{k-1}), L under f_lambda (2), P^k under f_lambda (2^k) and W under
/// g_lambda (4^k). Targets with colliding preimages are redrawn.
/// min_residual is the smallest gap between counted preimages, or -1 if a
/// count was wrong.
LemmaReport topological_degree_check(MapId map, InvariantSet set, int k, cplx lambda, int trials,
                                     std::uint64_t seed);

struct ComponentTrace {
  std::string component;        // "z0=0" or "z0=2z<j>"
  int first_hit = 0;            // worst case over samples
  double residual_after_hit = 0.0;  // largest distance to the diagonals afterwards
  std::vector<std::string> itinerary;  // hyperplanes visited by the first sample
};

struct CriticalOrbitReport {
  int k = 0;
  std::vector<ComponentTrace> components;
  double intersection_residual = 0.0;  // distance of deep iterates of E_{k-1} points to [1:...:1]
  double control_min_distance = 0.0;   // generic points: smallest diagonal distance at steps 1..3
  bool passed = false;
};

/// Iterates random points of each critical component of the base map and
/// follows them onto the diagonal hyperplanes {z_i = z_j}.
CriticalOrbitReport critical_orbit_trace(int k, int samples, int iters, std::uint64_t seed);
LemmaReport to_lemma_report(const CriticalOrbitReport& r);

using ChartPair = std::array<cplx, 2>;  // (u, s) = (z / w, t / w)

/// Points of W in the chart w = 1, keeping |u| <= max_abs_u.
std::vector<ChartPair> w_chart(const Cloud& cloud, double max_abs_u = 2.0);

/// Forward g_lambda orbits in W after a burn-in: samples of M = K_lambda ∩ W.
Cloud sample_m_lambda(const Params& params, std::size_t n, std::uint64_t seed, int burn_in = 30,
                      int per_orbit = 16);

/// For D = 1..max_degree, sigma_min / sigma_max of the column-normalized
/// monomial matrix {u^i s^j}_{i+j <= D}. Throws InsufficientSamples when the
/// cloud has fewer than 10 rows per monomial.
std::vector<std::pair<int, double>> algebraicity_residual(const std::vector<ChartPair>& pts, int max_degree);

struct NonalgebraicityReport {
  std::vector<std::pair<int, double>> line_control;   // cloud on u = 1
  std::vector<std::pair<int, double>> conic_control;  // cloud on s = u^2
  std::vector<std::pair<int, double>> attractor;      // M = K_lambda ∩ W
  bool controls_ok = false;
  double min_sigma = 0.0;
  bool passed = false;
};

/// Planted line and conic calibrate the detector; the M cloud must stay
/// above 1e-3 for every degree.
NonalgebraicityReport nonalgebraicity_witness(const Params& params, std::size_t n, int max_degree,
                                              std::uint64_t seed);
LemmaReport to_lemma_report(const NonalgebraicityReport& r);

}  // namespace pkattract
