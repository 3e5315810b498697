#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace pkattract {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// A point of P^m stored as m+1 homogeneous coordinates.
///
/// Construction does not normalize; call normalize() for the canonical
/// representative (max-modulus coordinate equal to 1, lowest index on ties).
class ProjPoint {
 public:
  ProjPoint() = default;
  explicit ProjPoint(CVec coords) : coords_(std::move(coords)) {}
  ProjPoint(std::initializer_list<cplx> coords) : coords_(coords) {}

  int dim() const { return static_cast<int>(coords_.size()) - 1; }
  std::size_t size() const { return coords_.size(); }
  const CVec& coords() const { return coords_; }
  CVec& coords() { return coords_; }
  cplx operator[](std::size_t i) const { return coords_[i]; }
  cplx& operator[](std::size_t i) { return coords_[i]; }

  /// Index of the max-modulus coordinate (lowest index within a relative
  /// tie window of 1e-12).
  int max_index() const;
  double max_modulus() const;

 private:
  CVec coords_;
};

struct ChartCoords {
  int chart_index = 0;
  CVec values;
};

/// Coordinates below this modulus are treated as an all-zero vector.
inline constexpr double kUnderflow = 1e-300;

ProjPoint normalize(const ProjPoint& p);

/// Chordal Fubini-Study distance sqrt(1 - |<p,q>|^2 / (|p|^2 |q|^2)).
///
/// Evaluated through the Lagrange identity as |p ^ q| / (|p| |q|) so that
/// nearby points keep full relative precision.
double fs_distance(const ProjPoint& p, const ProjPoint& q);

/// fs_distance for coordinate vectors that are already normalized (max
/// modulus 1). No validation.
double fs_distance_normalized(std::span<const cplx> p, std::span<const cplx> q);

/// Projective equality up to fs_distance tolerance.
bool proj_equal(const ProjPoint& p, const ProjPoint& q, double tol = 1e-12);

ChartCoords to_chart(const ProjPoint& p, int chart_index);
ChartCoords to_chart(const ProjPoint& p);  // chart of the max-modulus coordinate
ProjPoint from_chart(const ChartCoords& c);

/// Inclusion Pi = {t = 0} -> P^k, appending t = 0.
ProjPoint embed_pi(const ProjPoint& q);
/// [z:w_1:...:w_{k-1}:t] -> [z:w_1:...:w_{k-1}], normalized.
ProjPoint project_pi(const ProjPoint& p);

/// Euclidean and max norms of a coordinate vector.
double l2_norm(std::span<const cplx> v);
double max_norm(std::span<const cplx> v);

}  // namespace pkattract
