#include "pkattract/maps.hpp"

#include <cmath>

#include "pkattract/error.hpp"

namespace pkattract {

namespace {

void require_size(std::span<const cplx> x, int m) {
  if (static_cast<int>(x.size()) != m + 1) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(m + 1) + " coordinates, got " +
                    std::to_string(x.size()));
  }
}

}  // namespace

ProjPoint HomogeneousMap::apply(const ProjPoint& p) const {
  CVec y = lift(p.coords());
  if (!(max_norm(y) > kUnderflow * std::pow(std::max(1.0, p.max_modulus()), degree()))) {
    throw Error(ErrorCode::IndeterminacyHit, name() + " lift vanished");
  }
  return normalize(ProjPoint(std::move(y)));
}

ProjPoint HomogeneousMap::iterate(const ProjPoint& p, int n) const {
  ProjPoint x = normalize(p);
  for (int i = 0; i < n; ++i) x = apply(x);
  return x;
}

// ---------------------------------------------------------------------------

BaseMap::BaseMap(int k) : k_(k) {
  if (k < 2) throw Error(ErrorCode::InvalidParams, "k must be >= 2");
}

CVec BaseMap::lift(std::span<const cplx> x) const {
  require_size(x, k_ - 1);
  CVec y(k_);
  for (int j = 1; j < k_; ++j) {
    cplx d = x[0] - 2.0 * x[j];
    y[j - 1] = d * d;
  }
  y[k_ - 1] = x[0] * x[0];
  return y;
}

CMat BaseMap::lift_jacobian(std::span<const cplx> x) const {
  require_size(x, k_ - 1);
  CMat J = CMat::Zero(k_, k_);
  for (int j = 1; j < k_; ++j) {
    cplx d = x[0] - 2.0 * x[j];
    J(j - 1, 0) = 2.0 * d;
    J(j - 1, j) = -4.0 * d;
  }
  J(k_ - 1, 0) = 2.0 * x[0];
  return J;
}

FLambdaMap::FLambdaMap(int k, cplx lambda) : k_(k), lambda_(lambda) {
  if (k < 2) throw Error(ErrorCode::InvalidParams, "k must be >= 2");
}

CVec FLambdaMap::lift(std::span<const cplx> x) const {
  require_size(x, k_);
  CVec y(k_ + 1);
  const cplx z = x[0];
  for (int j = 1; j < k_; ++j) {
    cplx d = z - 2.0 * x[j];
    y[j - 1] = d * d;
  }
  y[k_ - 1] = z * z;
  y[k_] = x[k_] * x[k_] + lambda_ * z * z;
  return y;
}

CMat FLambdaMap::lift_jacobian(std::span<const cplx> x) const {
  require_size(x, k_);
  CMat J = CMat::Zero(k_ + 1, k_ + 1);
  const cplx z = x[0];
  for (int j = 1; j < k_; ++j) {
    cplx d = z - 2.0 * x[j];
    J(j - 1, 0) = 2.0 * d;
    J(j - 1, j) = -4.0 * d;
  }
  J(k_ - 1, 0) = 2.0 * z;
  J(k_, 0) = 2.0 * lambda_ * z;
  J(k_, k_) = 2.0 * x[k_];
  return J;
}

CVec QuadraticMap::lift(std::span<const cplx> x) const {
  require_size(x, 1);
  return {x[0] * x[0] + c_ * x[1] * x[1], x[1] * x[1]};
}

CMat QuadraticMap::lift_jacobian(std::span<const cplx> x) const {
  require_size(x, 1);
  CMat J(2, 2);
  J << 2.0 * x[0], 2.0 * c_ * x[1], 0.0, 2.0 * x[1];
  return J;
}

CMat IdentityMap::lift_jacobian(std::span<const cplx> x) const {
  require_size(x, m_);
  return CMat::Identity(m_ + 1, m_ + 1);
}

IteratedMap::IteratedMap(MapPtr inner, int n) : inner_(std::move(inner)), n_(n) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "iteration count must be >= 1");
}

int IteratedMap::degree() const {
  int d = 1;
  for (int i = 0; i < n_; ++i) d *= inner_->degree();
  return d;
}

std::string IteratedMap::name() const { return inner_->name() + "^" + std::to_string(n_); }

CVec IteratedMap::lift(std::span<const cplx> x) const {
  CVec y(x.begin(), x.end());
  for (int i = 0; i < n_; ++i) {
    if (i > 0) {
      double s = max_norm(y);
      if (s > 0.0) for (auto& c : y) c /= s;
    }
    y = inner_->lift(y);
  }
  return y;
}

CMat IteratedMap::lift_jacobian(std::span<const cplx> x) const {
  CVec y(x.begin(), x.end());
  CMat J = CMat::Identity(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(y.size()));
  for (int i = 0; i < n_; ++i) {
    if (i > 0) {
      double s = max_norm(y);
      if (s > 0.0) {
        for (auto& c : y) c /= s;
        J /= s;
      }
    }
    J = inner_->lift_jacobian(y) * J;
    y = inner_->lift(y);
  }
  return J;
}

MapId parse_map_id(const std::string& s) {
  if (s == "base" || s == "f") return MapId::Base;
  if (s == "f_lambda" || s == "flambda") return MapId::FLambda;
  if (s == "g_lambda" || s == "glambda") return MapId::GLambda;
  if (s == "h") return MapId::H;
  if (s == "identity") return MapId::Identity;
  throw Error(ErrorCode::Usage, "unknown map id '" + s + "'");
}

MapPtr make_map(MapId id, int k, cplx lambda) {
  switch (id) {
    case MapId::Base: return std::make_shared<BaseMap>(k);
    case MapId::FLambda: return std::make_shared<FLambdaMap>(k, lambda);
    case MapId::GLambda:
      return std::make_shared<IteratedMap>(std::make_shared<FLambdaMap>(k, lambda), k);
    case MapId::H: return std::make_shared<QuadraticMap>(lambda);
    case MapId::Identity: return std::make_shared<IdentityMap>(k);
  }
  throw Error(ErrorCode::Usage, "unknown map id");
}

ChartJacobian jacobian_chart(const HomogeneousMap& map, const ProjPoint& point,
                             std::optional<int> base_chart, std::optional<int> image_chart) {
  ProjPoint p = normalize(point);
  const int a = base_chart.value_or(p.max_index());
  const int m = map.dim();
  if (a < 0 || a > m) throw Error(ErrorCode::DimensionMismatch, "chart index out of range");
  if (std::abs(p[a]) < 1e-14) throw Error(ErrorCode::ChartSingular, "input chart coordinate vanishes");
  // Representative with x_a = 1.
  CVec x = p.coords();
  cplx pivot = x[a];
  for (auto& c : x) c /= pivot;

  CVec y = map.lift(x);
  CMat dF = map.lift_jacobian(x);
  ProjPoint image(y);
  const int b = image_chart.value_or(image.max_index());
  if (b < 0 || b > m) throw Error(ErrorCode::DimensionMismatch, "chart index out of range");
  if (std::abs(y[b]) <= 1e-14 * max_norm(y)) {
    throw Error(ErrorCode::ChartSingular, "image chart coordinate vanishes");
  }
  // v_i = F_i / F_b (i != b) as a function of x_j (j != a).
  CMat out(m, m);
  const cplx Fb = y[b];
  for (int i = 0, r = 0; i <= m; ++i) {
    if (i == b) continue;
    for (int j = 0, c = 0; j <= m; ++j) {
      if (j == a) continue;
      out(r, c) = (dF(i, j) * Fb - y[i] * dF(b, j)) / (Fb * Fb);
      ++c;
    }
    ++r;
  }
  return {a, b, std::move(out)};
}

}  // namespace pkattract
