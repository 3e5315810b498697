#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pkattract/cloud.hpp"
#include "pkattract/dynamics.hpp"
#include "pkattract/history.hpp"

namespace pkattract {

/// Escape-rate potential lim d^{-n} log|F^n(x)| of a homogeneous lift,
/// accumulated with unit max-norm rescaling at every step. Throws ZeroVector.
double green_function(const HomogeneousMap& map, std::span<const cplx> lift, int n_iter = 60);
double green_function(MapId id, int k, cplx lambda, std::span<const cplx> lift, int n_iter = 60);

/// [2:3:...:k+1].
ProjPoint default_mu0_start(int k);

/// Endpoints of independent uniform-branch backward walks of the given depth.
Cloud sample_mu0(int k, int depth, int n_samples, std::uint64_t seed, int workers = 1,
                 std::optional<ProjPoint> start = std::nullopt);

/// phi_lambda pushforward: a_0 from a mu0 walk of mu0_depth steps, extended by
/// a further `depth` uniform-branch steps, evaluated by phi_lambda.
Cloud sample_mu_lambda(const Params& params, int depth, int n_samples, std::uint64_t seed, int workers = 1,
                       int mu0_depth = 30);

/// Same construction, returning the prehistories that were evaluated.
std::vector<Prehistory> sample_history_mu0(int k, int depth, int n_samples, std::uint64_t seed, int workers = 1,
                                           int mu0_depth = 30);

Cloud push_forward(const Cloud& c, const HomogeneousMap& map);
Cloud project_cloud(const Cloud& c);

// Coarse partition: chart of the max-modulus coordinate times, for every
// affine coordinate u, an argument quadrant and |u| >= 1/2. P^1 has 16 cells.
int coarse_cell_count(int dim);
int coarse_cell(const ProjPoint& p);

struct BinMasses {
  std::vector<double> mass;
  std::vector<double> std_error;  // sqrt(p(1-p)/N)
  std::size_t n = 0;
};

BinMasses bin_masses(const Cloud& c);
/// Mean absolute bin-mass difference.
double bin_discrepancy(const BinMasses& a, const BinMasses& b);
/// Largest |a_i - b_i| / sqrt((a_i + b_i) / N) over nonempty bins, for a
/// cloud binned before (a) and after (b) a pushforward of the same points.
double max_invariance_score(const BinMasses& before, const BinMasses& after);

/// All 2^{(k-1) depth} backward images of z (with multiplicity) as a uniform
/// cloud. Throws TreeTooLarge above max_points.
Cloud preimage_tree(int k, const ProjPoint& z, int depth, std::size_t max_points = 100000);

struct EquidistributionReport {
  std::vector<int> depths;
  std::vector<bool> exact;           // per depth: enumerated (true) or sampled
  std::vector<double> discrepancy;   // between depths[i] and depths[i+1]
  bool decreasing = false;
};

/// Consecutive-depth discrepancies of the preimage measures of z. Trees
/// beyond max_points are replaced by max_points sampled walks.
EquidistributionReport preimage_distribution_test(int k, const ProjPoint& z, const std::vector<int>& depths,
                                                  std::uint64_t seed = 1, std::size_t max_points = 100000);

}  // namespace pkattract
