#include "pkattract/projective.hpp"

#include <cmath>
#include <string>

#include "pkattract/error.hpp"

namespace pkattract {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ProjectionUndefined: return "ProjectionUndefined";
    case ErrorCode::ChartSingular: return "ChartSingular";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::IndeterminacyHit: return "IndeterminacyHit";
    case ErrorCode::NotInW: return "NotInW";
    case ErrorCode::TrapViolation: return "TrapViolation";
    case ErrorCode::InvalidPrehistory: return "InvalidPrehistory";
    case ErrorCode::DepthExhausted: return "DepthExhausted";
    case ErrorCode::NotPeriodic: return "NotPeriodic";
    case ErrorCode::IndexBeyondDepth: return "IndexBeyondDepth";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::IncompleteEnumeration: return "IncompleteEnumeration";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::EmptyBall: return "EmptyBall";
    case ErrorCode::TreeTooLarge: return "TreeTooLarge";
    case ErrorCode::PrecisionInsufficient: return "PrecisionInsufficient";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

double l2_norm(std::span<const cplx> v) {
  double scale = max_norm(v);
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c / scale);
  return scale * std::sqrt(s);
}

double max_norm(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

int ProjPoint::max_index() const {
  double m = max_modulus();
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (std::abs(coords_[i]) >= m * (1.0 - 1e-12)) return static_cast<int>(i);
  }
  return 0;
}

double ProjPoint::max_modulus() const { return max_norm(coords_); }

ProjPoint normalize(const ProjPoint& p) {
  if (p.size() == 0) throw Error(ErrorCode::ZeroVector, "empty coordinate vector");
  double m = p.max_modulus();
  if (!(m > kUnderflow) || !std::isfinite(m)) {
    throw Error(ErrorCode::ZeroVector, "cannot normalize a zero or non-finite vector");
  }
  int idx = p.max_index();
  cplx pivot = p[idx];
  CVec out(p.size());
  // Slots equal to the pivot become exactly 1 so coordinate equalities survive.
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] == pivot ? cplx(1.0) : p[i] / pivot;
  return ProjPoint(std::move(out));
}

double fs_distance(const ProjPoint& p, const ProjPoint& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "fs_distance between P^" + std::to_string(p.dim()) + " and P^" +
                    std::to_string(q.dim()));
  }
  double sp = p.max_modulus(), sq = q.max_modulus();
  if (!(sp > kUnderflow) || !(sq > kUnderflow)) {
    throw Error(ErrorCode::ZeroVector, "fs_distance of a zero vector");
  }
  const std::size_t n = p.size();
  double wedge = 0.0, np = 0.0, nq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cplx a = p[i] / sp, b = q[i] / sq;
    np += std::norm(a);
    nq += std::norm(b);
    for (std::size_t j = i + 1; j < n; ++j) {
      wedge += std::norm(a * (q[j] / sq) - (p[j] / sp) * b);
    }
  }
  double d = std::sqrt(wedge / (np * nq));
  return std::min(d, 1.0);
}

double fs_distance_normalized(std::span<const cplx> p, std::span<const cplx> q) {
  const std::size_t n = p.size();
  double wedge = 0.0, np = 0.0, nq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    np += std::norm(p[i]);
    nq += std::norm(q[i]);
    for (std::size_t j = i + 1; j < n; ++j) wedge += std::norm(p[i] * q[j] - p[j] * q[i]);
  }
  return std::min(std::sqrt(wedge / (np * nq)), 1.0);
}

bool proj_equal(const ProjPoint& p, const ProjPoint& q, double tol) {
  return fs_distance(p, q) < tol;
}

ChartCoords to_chart(const ProjPoint& p, int chart_index) {
  if (chart_index < 0 || chart_index > p.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "chart index out of range");
  }
  cplx pivot = p[chart_index];
  if (std::abs(pivot) <= kUnderflow * std::max(1.0, p.max_modulus())) {
    throw Error(ErrorCode::ChartSingular,
                "coordinate " + std::to_string(chart_index) + " vanishes");
  }
  ChartCoords c{chart_index, {}};
  c.values.reserve(p.size() - 1);
  for (int i = 0; i <= p.dim(); ++i) {
    if (i != chart_index) c.values.push_back(p[i] / pivot);
  }
  return c;
}

ChartCoords to_chart(const ProjPoint& p) { return to_chart(p, p.max_index()); }

ProjPoint from_chart(const ChartCoords& c) {
  CVec out;
  out.reserve(c.values.size() + 1);
  for (std::size_t i = 0, v = 0; i <= c.values.size(); ++i) {
    if (static_cast<int>(i) == c.chart_index) {
      out.push_back(1.0);
    } else {
      out.push_back(c.values[v++]);
    }
  }
  return ProjPoint(std::move(out));
}

ProjPoint embed_pi(const ProjPoint& q) {
  CVec out = q.coords();
  out.push_back(0.0);
  return ProjPoint(std::move(out));
}

ProjPoint project_pi(const ProjPoint& p) {
  if (p.dim() < 1) throw Error(ErrorCode::DimensionMismatch, "project_pi needs dim >= 1");
  CVec base(p.coords().begin(), p.coords().end() - 1);
  double m = max_norm(base);
  if (!(m > 1e-300) || m <= 1e-15 * p.max_modulus()) {
    throw Error(ErrorCode::ProjectionUndefined, "projection undefined at [0:...:0:1]");
  }
  return normalize(ProjPoint(std::move(base)));
}

}  // namespace pkattract
