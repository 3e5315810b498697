#pragma once

#include <cmath>
#include <vector>

#include "pkattract/projective.hpp"

namespace pkattract {

/// Weighted point set standing in for a probability measure on P^dim.
struct Cloud {
  int dim = 0;
  std::vector<ProjPoint> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  /// Equal weights 1/N.
  static Cloud uniform(int dim, std::vector<ProjPoint> pts) {
    Cloud c;
    c.dim = dim;
    c.points = std::move(pts);
    c.weights.assign(c.points.size(), c.points.empty() ? 0.0 : 1.0 / static_cast<double>(c.points.size()));
    return c;
  }

  /// Neumaier-compensated sum of the weights.
  double total_weight() const {
    double s = 0.0, comp = 0.0;
    for (double w : weights) {
      double t = s + w;
      comp += std::abs(s) >= std::abs(w) ? (s - t) + w : (w - t) + s;
      s = t;
    }
    return s + comp;
  }

  void normalize_weights() {
    double s = total_weight();
    if (s > 0.0) for (double& w : weights) w /= s;
  }
};

}  // namespace pkattract
