#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>

#include "pkattract/projective.hpp"

namespace pkattract {

using CMat = Eigen::MatrixXcd;

/// A holomorphic self-map of P^m given by a homogeneous polynomial lift
/// F: C^{m+1} -> C^{m+1}.
class HomogeneousMap {
 public:
  virtual ~HomogeneousMap() = default;

  virtual int dim() const = 0;
  virtual int degree() const = 0;
  virtual std::string name() const = 0;

  virtual CVec lift(std::span<const cplx> x) const = 0;
  /// (m+1)x(m+1) matrix dF_i/dx_j at x.
  virtual CMat lift_jacobian(std::span<const cplx> x) const = 0;

  /// Normalized image. Throws IndeterminacyHit if the lift vanishes.
  ProjPoint apply(const ProjPoint& p) const;
  ProjPoint iterate(const ProjPoint& p, int n) const;
};

using MapPtr = std::shared_ptr<const HomogeneousMap>;

/// f[z_0:...:z_{k-1}] = [(z_0-2z_1)^2 : ... : (z_0-2z_{k-1})^2 : z_0^2] on P^{k-1}.
class BaseMap final : public HomogeneousMap {
 public:
  explicit BaseMap(int k);
  int dim() const override { return k_ - 1; }
  int degree() const override { return 2; }
  std::string name() const override { return "base"; }
  CVec lift(std::span<const cplx> x) const override;
  CMat lift_jacobian(std::span<const cplx> x) const override;
  int k() const { return k_; }

 private:
  int k_;
};

/// f_lambda[z:w_1:...:w_{k-1}:t] =
///   [(z-2w_1)^2 : ... : (z-2w_{k-1})^2 : z^2 : t^2 + lambda z^2] on P^k.
class FLambdaMap final : public HomogeneousMap {
 public:
  FLambdaMap(int k, cplx lambda);
  int dim() const override { return k_; }
  int degree() const override { return 2; }
  std::string name() const override { return "f_lambda"; }
  CVec lift(std::span<const cplx> x) const override;
  CMat lift_jacobian(std::span<const cplx> x) const override;
  int k() const { return k_; }
  cplx lambda() const { return lambda_; }

 private:
  int k_;
  cplx lambda_;
};

/// h_c[z:w] = [z^2 + c w^2 : w^2] on P^1; h_0 is z -> z^2.
class QuadraticMap final : public HomogeneousMap {
 public:
  explicit QuadraticMap(cplx c) : c_(c) {}
  int dim() const override { return 1; }
  int degree() const override { return 2; }
  std::string name() const override { return "h"; }
  CVec lift(std::span<const cplx> x) const override;
  CMat lift_jacobian(std::span<const cplx> x) const override;

 private:
  cplx c_;
};

class IdentityMap final : public HomogeneousMap {
 public:
  explicit IdentityMap(int m) : m_(m) {}
  int dim() const override { return m_; }
  int degree() const override { return 1; }
  std::string name() const override { return "identity"; }
  CVec lift(std::span<const cplx> x) const override { return CVec(x.begin(), x.end()); }
  CMat lift_jacobian(std::span<const cplx> x) const override;

 private:
  int m_;
};

/// n-fold composition. Intermediate lifts are rescaled to unit max-modulus,
/// which changes the lift by a scalar and leaves chart quantities unchanged.
class IteratedMap final : public HomogeneousMap {
 public:
  IteratedMap(MapPtr inner, int n);
  int dim() const override { return inner_->dim(); }
  int degree() const override;
  std::string name() const override;
  CVec lift(std::span<const cplx> x) const override;
  CMat lift_jacobian(std::span<const cplx> x) const override;

 private:
  MapPtr inner_;
  int n_;
};

enum class MapId { Base, FLambda, GLambda, H, Identity };

MapId parse_map_id(const std::string& s);
MapPtr make_map(MapId id, int k, cplx lambda);

/// Jacobian of a map between affine charts.
struct ChartJacobian {
  int base_chart = 0;
  int image_chart = 0;
  CMat matrix;
};

/// Chart derivative of `map` at `point`. The input chart defaults to the
/// max-modulus coordinate of the point, the output chart to that of the image.
ChartJacobian jacobian_chart(const HomogeneousMap& map, const ProjPoint& point,
                             std::optional<int> base_chart = std::nullopt,
                             std::optional<int> image_chart = std::nullopt);

}  // namespace pkattract
