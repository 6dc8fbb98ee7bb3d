#pragma once

// Geometry of H^d in the Poincare half-space model R^{d-1} x (0, inf).
// Points are stored in model coordinates; the last coordinate is the height.

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace hyperperc::hypgeom {

inline constexpr double kTolerance = 1e-9;
inline constexpr double kMinHeight = 1e-300;

class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

  std::size_t dim() const { return coords_.size(); }
  double height() const { return coords_.back(); }
  std::span<const double> coords() const { return coords_; }
  std::span<const double> horizontal() const { return {coords_.data(), coords_.size() - 1}; }
  double operator[](std::size_t i) const { return coords_[i]; }

  bool operator==(const Point&) const = default;

 private:
  std::vector<double> coords_;
};

// A point of the boundary R^{d-1} or the point at infinity.
class IdealPoint {
 public:
  static IdealPoint infinity() { return IdealPoint(); }
  explicit IdealPoint(std::vector<double> boundary);

  bool is_infinity() const { return !boundary_.has_value(); }
  std::span<const double> boundary() const;

 private:
  IdealPoint() = default;
  std::optional<std::vector<double>> boundary_;
};

using AnyPoint = std::variant<Point, IdealPoint>;

// Boundary-orthogonal hemisphere {|x - (c,0)| = r}; the half-space is the
// closed region inside or outside it.
struct Hemisphere {
  std::vector<double> center;  // in R^{d-1}
  double radius = 1.0;
  bool inside = true;
};

// Vertical hyperplane {n . x' = offset}; the half-space is
// {side * (n . x' - offset) >= 0}.
struct Vertical {
  std::vector<double> normal;  // unit vector in R^{d-1}
  double offset = 0.0;
  int side = 1;
};

class HalfSpace {
 public:
  HalfSpace(Hemisphere h, std::optional<std::pair<Point, Point>> pair = std::nullopt);
  HalfSpace(Vertical v, std::optional<std::pair<Point, Point>> pair = std::nullopt);

  std::size_t dim() const { return dim_; }
  const std::variant<Hemisphere, Vertical>& shape() const { return shape_; }
  bool is_hemisphere() const { return std::holds_alternative<Hemisphere>(shape_); }
  const std::optional<std::pair<Point, Point>>& defining_pair() const { return pair_; }

  // Hyperbolic distance from x to the bounding hyperplane, negative inside.
  double signed_distance(const Point& x) const;
  bool contains(const Point& x, double tol = 0.0) const { return signed_distance(x) <= tol; }
  // Reflection of x through the bounding hyperplane.
  Point reflect(const Point& x) const;
  // A pair (a, b) with this == H(a, b); the cached pair when present.
  std::pair<Point, Point> any_pair() const;
  HalfSpace complement() const;

 private:
  std::size_t dim_ = 0;
  std::variant<Hemisphere, Vertical> shape_;
  std::optional<std::pair<Point, Point>> pair_;
};

double distance(const Point& p, const Point& q);
// arcosh(1 + |p-q|^2 / (2 p_d q_d)); an independent route to the same value.
double distance_arcosh(const Point& p, const Point& q);

// Point at hyperbolic distance t from p along the geodesic ray from p through
// target (t may exceed the distance to a finite target).
Point geodesic_point(const Point& p, const AnyPoint& target, double t);

HalfSpace halfspace(const Point& a, const Point& b);
double distance_to_halfspace(const Point& x, const HalfSpace& h);
// Closest point of the bounding hyperplane to x.
Point foot_on_boundary(const Point& x, const HalfSpace& h);

// Smallest half-space containing the complement of the Euclidean ball B(x, r x_d).
HalfSpace ball_exterior_halfspace(const Point& x, double r);
// Smallest half-space containing B(y, rho) intersected with H^d; y_d may be <= 0.
HalfSpace ball_covering_halfspace(std::span<const double> y, double rho);
// H(y, x) for the point y on the ray from x through z with d(x,y) = 2 d(x,z).
HalfSpace doubling_halfspace(const Point& x, const Point& z);
// Half-space H' with H subset of H', d(x, H') = d(x, H) - amount and the
// closed amount-neighbourhood of H inside H'. Requires d(x, H) >= amount + 1.
HalfSpace enlarge_toward(const HalfSpace& h, const Point& x, double amount);

struct Translation {
  std::vector<double> shift;
};
struct Dilation {
  std::vector<double> center;
  double factor = 1.0;
};
// Orthogonal map of R^{d-1}, row-major, fixing the vertical axis.
struct Orthogonal {
  std::vector<double> matrix;
};
struct Inversion {
  std::vector<double> center;
  double radius = 1.0;
};
using Primitive = std::variant<Translation, Dilation, Orthogonal, Inversion>;

class Isometry {
 public:
  Isometry() = default;
  explicit Isometry(std::vector<Primitive> steps) : steps_(std::move(steps)) {}

  const std::vector<Primitive>& steps() const { return steps_; }
  Isometry then(const Isometry& next) const;
  Isometry inverse() const;

  Point operator()(const Point& x) const;
  IdealPoint operator()(const IdealPoint& x) const;
  HalfSpace operator()(const HalfSpace& h) const;

 private:
  std::vector<Primitive> steps_;
};

// gamma with gamma(x) = (0,...,0,1), gamma(y) = (0,...,0,exp d(x,y)).
Isometry normalize_pair(const Point& x, const Point& y);

}  // namespace hyperperc::hypgeom
