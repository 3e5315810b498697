#include "pkattract/history.hpp"

#include <algorithm>
#include <cmath>

#include "pkattract/error.hpp"

namespace pkattract {

namespace {

double backward_defect(const BaseMap& f, const Prehistory& x, int i) {
  return fs_distance(f.apply(x.at(i + 1)), x.at(i));
}

}  // namespace

bool is_valid_prehistory(int k, const Prehistory& x, double tol) {
  if (x.points.empty()) return false;
  BaseMap f(k);
  for (const auto& p : x.points) {
    if (p.dim() != k - 1) return false;
  }
  for (int i = 0; i < x.depth(); ++i) {
    if (!(backward_defect(f, x, i) <= tol)) return false;
  }
  return true;
}

void validate_prehistory(int k, const Prehistory& x, double tol) {
  if (x.points.empty()) throw Error(ErrorCode::InvalidPrehistory, "empty prehistory");
  BaseMap f(k);
  for (const auto& p : x.points) {
    if (p.dim() != k - 1) throw Error(ErrorCode::DimensionMismatch, "prehistory point not in P^{k-1}");
  }
  for (int i = 0; i < x.depth(); ++i) {
    double d = backward_defect(f, x, i);
    if (!(d <= tol)) {
      throw Error(ErrorCode::InvalidPrehistory,
                  "f(x_-" + std::to_string(i + 1) + ") misses x_-" + std::to_string(i) +
                      " by " + std::to_string(d));
    }
  }
}

double hat_distance(const Prehistory& x, const Prehistory& y) {
  const int n = std::min(x.depth(), y.depth());
  double s = 0.0;
  double w = 1.0;
  for (int i = 0; i <= n; ++i, w *= 0.5) s += w * fs_distance(x.at(i), y.at(i));
  return s;
}

Prehistory lift_map(int k, const Prehistory& x) {
  validate_prehistory(k, x);
  Prehistory out;
  out.points.reserve(x.points.size());
  out.points.push_back(BaseMap(k).apply(x.head()));
  out.points.insert(out.points.end(), x.points.begin(), x.points.end() - 1);
  return out;
}

Prehistory unlift(const Prehistory& x) {
  if (x.depth() < 1) throw Error(ErrorCode::DepthExhausted, "cannot unlift a depth-0 prehistory");
  Prehistory out;
  out.points.assign(x.points.begin() + 1, x.points.end());
  return out;
}

Prehistory truncate(const Prehistory& x, int depth) {
  if (depth < 0 || depth > x.depth()) throw Error(ErrorCode::IndexBeyondDepth, "truncation depth out of range");
  Prehistory out;
  out.points.assign(x.points.begin(), x.points.begin() + depth + 1);
  return out;
}

Prehistory sample_prehistory(int k, const ProjPoint& a0, int depth, Rng& rng) {
  if (depth < 0) throw Error(ErrorCode::InvalidParams, "depth must be >= 0");
  if (a0.dim() != k - 1) throw Error(ErrorCode::DimensionMismatch, "start point not in P^{k-1}");
  Prehistory out;
  out.points.reserve(static_cast<std::size_t>(depth) + 1);
  out.points.push_back(normalize(a0));
  for (int i = 0; i < depth; ++i) out.points.push_back(random_preimage_f_base(k, out.points.back(), rng));
  return out;
}

Prehistory sample_prehistory(int k, const ProjPoint& a0, int depth, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  return sample_prehistory(k, a0, depth, rng);
}

Prehistory lift_periodic(int k, const ProjPoint& x, int n, int depth) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "period must be >= 1");
  if (depth < 0) throw Error(ErrorCode::InvalidParams, "depth must be >= 0");
  BaseMap f(k);
  std::vector<ProjPoint> orbit{normalize(x)};
  for (int m = 1; m < n; ++m) orbit.push_back(f.apply(orbit.back()));
  if (fs_distance(f.apply(orbit.back()), orbit.front()) > 1e-9) {
    throw Error(ErrorCode::NotPeriodic, "f^" + std::to_string(n) + "(x) != x");
  }
  Prehistory out;
  out.points.reserve(static_cast<std::size_t>(depth) + 1);
  for (int j = 0; j <= depth; ++j) out.points.push_back(orbit[static_cast<std::size_t>((n - j % n) % n)]);
  return out;
}

double cylinder_mass(const std::vector<Prehistory>& samples, const CylinderSet& c) {
  if (samples.empty()) throw Error(ErrorCode::InsufficientSamples, "no prehistories");
  std::size_t hit = 0;
  for (const auto& s : samples) {
    if (c.j > s.depth()) throw Error(ErrorCode::IndexBeyondDepth, "cylinder index exceeds prehistory depth");
    if (c.region_contains(s.at(c.j))) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(samples.size());
}

}  // namespace pkattract
