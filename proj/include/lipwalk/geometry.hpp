#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lipwalk/kernel.hpp"
#include "lipwalk/lattice.hpp"
#include "lipwalk/rational.hpp"

namespace lipwalk {

/// Graph profile φ : Z^{d-1} -> Q with φ(0) = 0. Three representations keep
/// membership exact:
///  - flat: φ ≡ 0;
///  - piecewise linear: φ(x') = Σ_k f_k(x'_k), each f_k a 1-D piecewise
///    linear function through the origin with rational breakpoints and slopes;
///  - table: rational values on the cube [-w, w]^{d-1}, extended outside by
///    clamping x' to the cube (clamping keeps the Lipschitz constant).
class LipschitzProfile {
 public:
  enum class Kind { kFlat, kPiecewiseLinear, kTable };

  struct Axis {
    std::vector<Rational> breakpoints;  // strictly increasing
    std::vector<Rational> slopes;       // breakpoints.size() + 1 entries
  };

  static LipschitzProfile flat(int dim);
  /// One Axis per coordinate of x' (d - 1 of them).
  static LipschitzProfile piecewise_linear(int dim, std::vector<Axis> axes, double lipschitz_constant);
  /// φ(x') = s_+ x'_k for x'_k >= 0 and s_- x'_k otherwise, summed over k.
  static LipschitzProfile cone(int dim, Rational slope);
  static LipschitzProfile table(int dim, std::int64_t half_width, std::vector<Rational> values,
                                double lipschitz_constant);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Declared Lipschitz constant A.
  double lipschitz_constant() const { return lipschitz_; }
  /// Constant the representation itself guarantees (sqrt Σ max|slope_k|^2 for
  /// piecewise-linear, max neighbour difference bound for tables).
  double intrinsic_lipschitz_bound() const { return intrinsic_; }
  const std::vector<Axis>& axes() const { return axes_; }
  std::int64_t table_half_width() const { return half_width_; }
  const std::vector<Rational>& table_values() const { return values_; }

  /// φ at the transverse coordinates of x (x_2..x_d); x_1 is ignored.
  Rational value_at(const LatticePoint& x) const;

  /// Spot-checks |φ(a') - φ(b')| <= A |a' - b'| on a deterministic sample
  /// of pairs within `radius` of the origin. Returns the worst ratio seen.
  double spot_check_lipschitz(std::int64_t radius) const;

 private:
  Kind kind_ = Kind::kFlat;
  int dim_ = 1;
  double lipschitz_ = 0.0;
  double intrinsic_ = 0.0;
  std::vector<Axis> axes_;
  std::int64_t half_width_ = 0;
  std::vector<Rational> values_;
};

/// C = {x ∈ Z^d : x_1 > φ(x')} together with the step set whose Γ-boundary
/// defines ∂C. The infinite boundary is never stored; it is generated per
/// query window.
class LipschitzDomain {
 public:
  LipschitzDomain(LipschitzProfile profile, StepSet steps);

  int dim() const { return profile_.dim(); }
  const LipschitzProfile& profile() const { return profile_; }
  const StepSet& steps() const { return steps_; }

  bool contains(const LatticePoint& x) const { return Rational(x[0]) > profile_.value_at(x); }
  /// x_1 - φ(x').
  Rational height(const LatticePoint& x) const { return Rational(x[0]) - profile_.value_at(x); }
  /// x ∉ C and x = z + e for some z ∈ C, e ∈ Γ.
  bool on_boundary(const LatticePoint& x) const;

  /// Exact squared Euclidean distance from x ∈ C to ∂C.
  std::int64_t boundary_distance_sq(const LatticePoint& x) const;

 private:
  LipschitzProfile profile_;
  StepSet steps_;
  double band_ = 0.0;  // ∂C points lie within this depth below the graph
};

/// ∂A = {x ∉ A : x = z + e, z ∈ A, e ∈ Γ}.
PointSet boundary(const PointSet& a, const StepSet& steps);

/// A ∪ ∂A.
PointSet closure(const PointSet& a, const StepSet& steps);

/// δ(x) for x ∈ C; outside-domain error otherwise.
double distance_to_boundary(const LatticePoint& x, const LipschitzDomain& domain);

/// Balls, cubes and the collar / interior-slab split of a ball around a
/// boundary point. Radii are stored squared (balls) or plain (cubes) as
/// rationals so that R = 3√d·r style radii stay exact.
class Region {
 public:
  enum class Kind { kBall, kCube, kCollar, kSlab };

  static Region ball(LatticePoint center, Rational radius);
  static Region ball_sq(LatticePoint center, Rational radius_sq);
  static Region cube(LatticePoint center, Rational radius);
  /// C_{R,r}(y) = (B_R(y) ∩ C) \ D_{R,r}(y).
  static Region collar(LatticePoint center, Rational outer, Rational inner);
  /// D_{R,r}(y) = B_R(y) ∩ {x ∈ C : δ(x) > r}.
  static Region slab(LatticePoint center, Rational outer, Rational inner);

  Kind kind() const { return kind_; }
  const LatticePoint& center() const { return center_; }
  const Rational& radius_sq() const { return radius_sq_; }
  const Rational& inner_sq() const { return inner_sq_; }
  std::optional<Rational> radius() const { return radius_; }
  /// r for collar and slab regions.
  std::optional<Rational> inner_radius() const { return inner_; }
  std::string describe() const;

  /// Membership ignoring any domain clip (collar / slab use the ball).
  bool in_outer(const LatticePoint& x) const;

 private:
  Kind kind_ = Kind::kBall;
  LatticePoint center_;
  Rational radius_sq_;
  Rational inner_sq_;
  std::optional<Rational> radius_;
  std::optional<Rational> inner_;
};

/// Parses "ball:y=0,R=32", "cube:y=1,2,R=4", "collar:y=0,R=32,r=4",
/// "slab:y=0,R=32,r=4". A scalar y is broadcast to all coordinates.
Region parse_region(const std::string& text, int dim);

/// Points of a plain ball or cube, in lexicographic order.
PointSet enumerate_region(const Region& region);
/// Points of the region intersected with C.
PointSet enumerate_region(const Region& region, const LipschitzDomain& domain);

/// |closure(Q_R(y)) ∩ C^c| / |closure(Q_R(y))|, closure taken for Γ.
double exterior_cone_fraction(const LatticePoint& y, Rational radius, const LipschitzDomain& domain);

}  // namespace lipwalk
