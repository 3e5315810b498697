#pragma once

#include <cstdint>
#include <vector>

#include "pkattract/dynamics.hpp"

namespace pkattract {

/// Truncated backward orbit (x_0, x_{-1}, ..., x_{-n}) of the base map f.
/// points[i] holds x_{-i}.
struct Prehistory {
  std::vector<ProjPoint> points;

  int depth() const { return static_cast<int>(points.size()) - 1; }
  const ProjPoint& at(int i) const { return points[static_cast<std::size_t>(i)]; }
  const ProjPoint& head() const { return points.front(); }
};

/// Cylinder pi_j^{-1}(B(center, radius)).
struct CylinderSet {
  int j = 0;
  ProjPoint center;
  double radius = 0.0;

  bool region_contains(const ProjPoint& x) const { return fs_distance(x, center) < radius; }
};

inline constexpr double kPrehistoryTol = 1e-9;

/// Throws InvalidPrehistory unless f(x_{-(i+1)}) = x_{-i} to tol for every i.
void validate_prehistory(int k, const Prehistory& x, double tol = kPrehistoryTol);
bool is_valid_prehistory(int k, const Prehistory& x, double tol = kPrehistoryTol);

/// sum_{i<=n} 2^{-i} d(x_{-i}, y_{-i}) over the common depth.
double hat_distance(const Prehistory& x, const Prehistory& y);

/// (f(x_0), x_0, ..., x_{-(n-1)}). Throws InvalidPrehistory.
Prehistory lift_map(int k, const Prehistory& x);
/// (x_{-1}, ..., x_{-n}). Throws DepthExhausted at depth 0.
Prehistory unlift(const Prehistory& x);
/// Keeps x_0..x_{-depth}.
Prehistory truncate(const Prehistory& x, int depth);

/// Backward walk with a uniformly random base preimage at every step.
Prehistory sample_prehistory(int k, const ProjPoint& a0, int depth, Rng& rng);
Prehistory sample_prehistory(int k, const ProjPoint& a0, int depth, std::uint64_t seed);

/// Periodic prehistory x_{-j} = f^{(n-j) mod n}(x). Throws NotPeriodic unless
/// f^n(x) = x to 1e-9.
Prehistory lift_periodic(int k, const ProjPoint& x, int n, int depth);

/// Fraction of prehistories whose x_{-j} lies in the cylinder region.
/// Throws IndexBeyondDepth.
double cylinder_mass(const std::vector<Prehistory>& samples, const CylinderSet& c);

}  // namespace pkattract
