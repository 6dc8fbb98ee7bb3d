#include "hyperperc/hypgeom.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <numeric>

#include "hyperperc/errors.hpp"

namespace hyperperc::hypgeom {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void require_same_dim(const Point& p, const Point& q) {
  require(p.dim() == q.dim(), "dimension mismatch between points");
}

Point with_height(std::span<const double> horizontal, double h) {
  std::vector<double> c(horizontal.begin(), horizontal.end());
  c.push_back(h);
  return Point(std::move(c));
}

// |x - (c, 0)|^2 for x in H^d and c in R^{d-1}.
double sq_dist_to_base(const Point& x, std::span<const double> c) {
  return sq_dist(x.horizontal(), c) + x.height() * x.height();
}

std::vector<double> invert_coords(std::span<const double> x, std::span<const double> center,
                                  double radius) {
  // center lives in R^{d-1}; x may be a full point (d coords) or boundary (d-1).
  std::vector<double> out(x.begin(), x.end());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double ci = i < center.size() ? center[i] : 0.0;
    s += (x[i] - ci) * (x[i] - ci);
  }
  double k = radius * radius / s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double ci = i < center.size() ? center[i] : 0.0;
    out[i] = ci + k * (x[i] - ci);
  }
  return out;
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  require(!coords_.empty(), "point must have at least one coordinate");
  require(all_finite(coords_), "point coordinates must be finite");
  require(coords_.back() > 0.0, "point height must be positive");
  require(coords_.back() >= kMinHeight, "point height underflows");
}

IdealPoint::IdealPoint(std::vector<double> boundary) : boundary_(std::move(boundary)) {
  require(all_finite(*boundary_), "ideal point coordinates must be finite");
}

std::span<const double> IdealPoint::boundary() const {
  require(boundary_.has_value(), "infinity has no boundary coordinates");
  return *boundary_;
}

HalfSpace::HalfSpace(Hemisphere h, std::optional<std::pair<Point, Point>> pair)
    : dim_(h.center.size() + 1), shape_(std::move(h)), pair_(std::move(pair)) {
  const auto& s = std::get<Hemisphere>(shape_);
  require(s.radius > 0.0 && std::isfinite(s.radius), "hemisphere radius must be positive");
  require(all_finite(s.center), "hemisphere center must be finite");
}

HalfSpace::HalfSpace(Vertical v, std::optional<std::pair<Point, Point>> pair)
    : dim_(v.normal.size() + 1), shape_(std::move(v)), pair_(std::move(pair)) {
  auto& s = std::get<Vertical>(shape_);
  require(!s.normal.empty(), "vertical hyperplanes need d >= 2");
  double n = std::sqrt(dot(s.normal, s.normal));
  require(n > 0.0 && std::isfinite(n) && std::isfinite(s.offset), "invalid vertical hyperplane");
  for (double& c : s.normal) c /= n;
  s.offset /= n;
  s.side = s.side >= 0 ? 1 : -1;
}

double HalfSpace::signed_distance(const Point& x) const {
  require(x.dim() == dim_, "dimension mismatch between point and half-space");
  if (const auto* h = std::get_if<Hemisphere>(&shape_)) {
    double r = std::sqrt(sq_dist_to_base(x, h->center));
    // (r^2 - R^2) / (2 R x_d), factored to keep precision for huge radii
    double s = (r - h->radius) * (r + h->radius) / (2.0 * h->radius * x.height());
    double d = std::asinh(s);
    return h->inside ? d : -d;
  }
  const auto& v = std::get<Vertical>(shape_);
  double s = (dot(v.normal, x.horizontal()) - v.offset) / x.height();
  return -v.side * std::asinh(s);
}

Point HalfSpace::reflect(const Point& x) const {
  require(x.dim() == dim_, "dimension mismatch between point and half-space");
  if (const auto* h = std::get_if<Hemisphere>(&shape_)) {
    return Point(invert_coords(x.coords(), h->center, h->radius));
  }
  const auto& v = std::get<Vertical>(shape_);
  std::vector<double> c(x.coords().begin(), x.coords().end());
  double s = dot(v.normal, x.horizontal()) - v.offset;
  for (std::size_t i = 0; i < v.normal.size(); ++i) c[i] -= 2.0 * s * v.normal[i];
  return Point(std::move(c));
}

std::pair<Point, Point> HalfSpace::any_pair() const {
  if (pair_) return *pair_;
  if (const auto* h = std::get_if<Hemisphere>(&shape_)) {
    Point low = with_height(h->center, h->radius / std::exp(1.0));
    Point high = with_height(h->center, h->radius * std::exp(1.0));
    return h->inside ? std::pair{low, high} : std::pair{high, low};
  }
  const auto& v = std::get<Vertical>(shape_);
  std::vector<double> a(v.normal.size()), b(v.normal.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = (v.offset + v.side) * v.normal[i];
    b[i] = (v.offset - v.side) * v.normal[i];
  }
  return {with_height(a, 1.0), with_height(b, 1.0)};
}

HalfSpace HalfSpace::complement() const {
  std::optional<std::pair<Point, Point>> swapped;
  if (pair_) swapped = std::pair{pair_->second, pair_->first};
  if (const auto* h = std::get_if<Hemisphere>(&shape_)) {
    Hemisphere c = *h;
    c.inside = !c.inside;
    return HalfSpace(std::move(c), std::move(swapped));
  }
  Vertical v = std::get<Vertical>(shape_);
  v.side = -v.side;
  return HalfSpace(std::move(v), std::move(swapped));
}

double distance(const Point& p, const Point& q) {
  require_same_dim(p, q);
  // sinh(d/2) = |p - q| / (2 sqrt(p_d q_d)), in logs once the ratio is huge.
  const double e = std::sqrt(sq_dist(p.coords(), q.coords()));
  const double ratio = e / (std::sqrt(p.height()) * std::sqrt(q.height()));
  if (ratio < 1e300) return 2.0 * std::asinh(0.5 * ratio);
  return 2.0 * (std::log(e) - 0.5 * (std::log(p.height()) + std::log(q.height())));
}

double distance_arcosh(const Point& p, const Point& q) {
  require_same_dim(p, q);
  double s = sq_dist(p.coords(), q.coords()) / (2.0 * p.height() * q.height());
  // arcosh(1 + s) = log(1 + s + sqrt(s (s + 2)))
  return std::log1p(s + std::sqrt(s * (s + 2.0)));
}

Point geodesic_point(const Point& p, const AnyPoint& target, double t) {
  require(t >= 0.0 && std::isfinite(t), "geodesic parameter must be finite and non-negative");
  const std::size_t m = p.dim() - 1;
  auto vertical = [&](double sign) {
    return with_height(p.horizontal(), p.height() * std::exp(sign * t));
  };

  if (const auto* ideal = std::get_if<IdealPoint>(&target)) {
    if (ideal->is_infinity()) return vertical(+1.0);
    require(ideal->boundary().size() == m, "dimension mismatch with ideal point");
    double len = std::sqrt(sq_dist(ideal->boundary(), p.horizontal()));
    if (len <= 1e-15 * p.height()) return vertical(-1.0);
    double u0 = (len * len - p.height() * p.height()) / (2.0 * len);
    double rho = std::hypot(u0, p.height());
    double s = std::asinh(u0 / p.height()) - t;
    double u = u0 - rho * std::tanh(s);
    double h = rho / std::cosh(s);
    std::vector<double> c(m + 1);
    for (std::size_t i = 0; i < m; ++i)
      c[i] = p[i] + u * (ideal->boundary()[i] - p[i]) / len;
    c[m] = std::max(h, kMinHeight);
    return Point(std::move(c));
  }

  const auto& q = std::get<Point>(target);
  require_same_dim(p, q);
  require(distance(p, q) > 0.0, "geodesic target coincides with the start point");
  double len = std::sqrt(sq_dist(q.horizontal(), p.horizontal()));
  if (len <= 1e-13 * std::max(p.height(), q.height()))
    return vertical(q.height() > p.height() ? 1.0 : -1.0);
  double u0 = (len * len + q.height() * q.height() - p.height() * p.height()) / (2.0 * len);
  double rho = std::hypot(u0, p.height());
  double sp = std::asinh(u0 / p.height());
  double sq = std::asinh((u0 - len) / q.height());
  double s = sp + (sq > sp ? t : -t);
  double u = u0 - rho * std::tanh(s);
  double h = rho / std::cosh(s);
  std::vector<double> c(m + 1);
  for (std::size_t i = 0; i < m; ++i) c[i] = p[i] + u * (q[i] - p[i]) / len;
  c[m] = std::max(h, kMinHeight);
  return Point(std::move(c));
}

HalfSpace halfspace(const Point& a, const Point& b) {
  require_same_dim(a, b);
  require(distance(a, b) > 0.0, "half-space needs two distinct points");
  const std::size_t m = a.dim() - 1;
  double ad = a.height(), bd = b.height();
  auto pair = std::pair{a, b};
  if (std::abs(ad - bd) <= 1e-14 * std::max(ad, bd) && m > 0) {
    Vertical v;
    v.normal.resize(m);
    double mid = 0.0;
    for (std::size_t i = 0; i < m; ++i) v.normal[i] = a[i] - b[i];
    double n = std::sqrt(dot(v.normal, v.normal));
    for (std::size_t i = 0; i < m; ++i) {
      v.normal[i] /= n;
      mid += v.normal[i] * 0.5 * (a[i] + b[i]);
    }
    v.offset = mid;
    v.side = 1;
    return HalfSpace(std::move(v), std::move(pair));
  }
  // Bisector: |x-a|^2 / a_d = |x-b|^2 / b_d, a sphere centred on the boundary.
  Hemisphere h;
  h.center.resize(m);
  for (std::size_t i = 0; i < m; ++i) h.center[i] = (bd * a[i] - ad * b[i]) / (bd - ad);
  h.radius = std::sqrt(ad * bd * sq_dist(a.coords(), b.coords())) / std::abs(bd - ad);
  h.inside = ad < bd;
  return HalfSpace(std::move(h), std::move(pair));
}

double distance_to_halfspace(const Point& x, const HalfSpace& h) {
  return std::max(0.0, h.signed_distance(x));
}

Point foot_on_boundary(const Point& x, const HalfSpace& h) {
  double d = std::abs(h.signed_distance(x));
  if (d == 0.0) return x;
  Point mirror = h.reflect(x);
  return geodesic_point(x, mirror, d);
}

HalfSpace ball_exterior_halfspace(const Point& x, double r) {
  require(r > 1.0 && std::isfinite(r), "ball_exterior_halfspace needs r > 1");
  Hemisphere h;
  h.center.assign(x.horizontal().begin(), x.horizontal().end());
  h.radius = std::sqrt((r - 1.0) * (r + 1.0)) * x.height();
  h.inside = false;
  return HalfSpace(std::move(h));
}

HalfSpace ball_covering_halfspace(std::span<const double> y, double rho) {
  require(rho > 0.0 && std::isfinite(rho), "ball_covering_halfspace needs rho > 0");
  require(!y.empty() && all_finite(y), "invalid ball center");
  Hemisphere h;
  h.center.assign(y.begin(), y.end() - 1);
  // A centre below the boundary is covered by its projection onto it.
  h.radius = std::max(y.back(), 0.0) + rho;
  h.inside = true;
  return HalfSpace(std::move(h));
}

HalfSpace doubling_halfspace(const Point& x, const Point& z) {
  double d = distance(x, z);
  require(d > 0.0, "doubling_halfspace needs x != z");
  Point y = geodesic_point(x, z, 2.0 * d);
  return halfspace(y, x);
}

namespace {

using Complex = std::complex<double>;

// Hyperbolic translation of the upper half-plane along the unit semicircle.
Complex slide(Complex w, double t) {
  return (w * std::cosh(t) + std::sinh(t)) / (w * std::sinh(t) + std::cosh(t));
}

}  // namespace

// Everything relevant lies in the vertical 2-plane through x that is
// orthogonal to the bounding hyperplane. In complex coordinates on that plane
// the boundary becomes the unit circle, x is slid onto the imaginary axis, the
// circle is rescaled there, and the result is mapped back. Working this way
// avoids constructing points near the ideal endpoint of the perpendicular,
// which loses all precision once the distance is a few hundred.
HalfSpace enlarge_toward(const HalfSpace& h, const Point& x, double amount) {
  double d = h.signed_distance(x);
  require(amount >= 0.0, "enlargement must be non-negative");
  require(d >= amount + 1.0, "point too close to the half-space to enlarge");
  const std::size_t m = x.dim() - 1;

  std::vector<double> base(m, 0.0), e(m, 0.0);
  double scale = 1.0;
  bool cayley = false;
  bool inside = false;
  Complex w;
  if (const auto* hs = std::get_if<Hemisphere>(&h.shape())) {
    base = hs->center;
    scale = hs->radius;
    inside = hs->inside;
    double a = std::sqrt(sq_dist(x.horizontal(), base));
    if (a > 0.0)
      for (std::size_t i = 0; i < m; ++i) e[i] = (x[i] - base[i]) / a;
    else if (m > 0)
      e[0] = 1.0;
    w = Complex(a / scale, x.height() / scale);
  } else {
    const auto& v = std::get<Vertical>(h.shape());
    const double a = dot(v.normal, x.horizontal()) - v.offset;
    for (std::size_t i = 0; i < m; ++i) {
      base[i] = x[i] - a * v.normal[i];
      e[i] = v.normal[i];
    }
    // (w - 1) / (w + 1) sends the imaginary axis to the unit circle and the
    // right half-plane inside it.
    cayley = true;
    inside = v.side > 0;
    w = Complex(a, x.height());
    w = (w - 1.0) / (w + 1.0);
  }

  // Choose t with Re slide(w, t) = 0: tanh 2t = -2 Re w / (|w|^2 + 1).
  const double r = std::abs(w);
  const double q = r > 1.0 ? 2.0 * (w.real() / r) / (r + 1.0 / r) : 2.0 * w.real() / (r * r + 1.0);
  const double t = -0.5 * std::atanh(q);
  // x now sits on the imaginary axis; the new boundary is the circle of radius rho.
  const double rho = inside ? std::exp(amount) : std::exp(-amount);

  auto back = [&](Complex z) {
    z = slide(z, -t);
    if (cayley) z = (1.0 + z) / (1.0 - z);
    return z;
  };
  auto lift = [&](Complex z) {
    std::vector<double> c(m + 1);
    for (std::size_t i = 0; i < m; ++i) c[i] = base[i] + scale * z.real() * e[i];
    c[m] = scale * z.imag();
    return c;
  };

  Complex u1 = back(Complex(rho, 0.0)), u2 = back(Complex(-rho, 0.0));
  Complex probe = back(Complex(0.0, inside ? 0.5 * rho : 2.0 * rho));
  Point test(lift(probe));

  auto finite = [](Complex z) { return std::isfinite(z.real()) && std::abs(z.real()) < 1e250; };
  std::optional<HalfSpace> out;
  if (finite(u1) && finite(u2)) {
    Hemisphere nh;
    std::vector<double> c = lift(Complex(0.5 * (u1.real() + u2.real()), 0.0));
    c.pop_back();
    nh.center = std::move(c);
    nh.radius = 0.5 * scale * std::abs(u1.real() - u2.real());
    nh.inside = true;
    out.emplace(std::move(nh));
  } else {
    require(m > 0, "degenerate enlargement");
    Complex u = finite(u1) ? u1 : u2;
    std::vector<double> c = lift(u);
    Vertical nv;
    nv.normal = e;
    nv.offset = dot(e, std::span<const double>(c.data(), m));
    nv.side = 1;
    out.emplace(std::move(nv));
  }
  if (!out->contains(test)) *out = out->complement();
  return *out;
}

// ---- isometries ---------------------------------------------------------

namespace {

struct ApplyPoint {
  std::vector<double>& c;  // full coordinates
  void operator()(const Translation& t) const {
    for (std::size_t i = 0; i + 1 < c.size(); ++i) c[i] += t.shift[i];
  }
  void operator()(const Dilation& s) const {
    for (std::size_t i = 0; i + 1 < c.size(); ++i) c[i] = s.center[i] + s.factor * (c[i] - s.center[i]);
    c.back() *= s.factor;
  }
  void operator()(const Orthogonal& o) const {
    const std::size_t m = c.size() - 1;
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out[i] += o.matrix[i * m + j] * c[j];
    std::copy(out.begin(), out.end(), c.begin());
  }
  void operator()(const Inversion& inv) const { c = invert_coords(c, inv.center, inv.radius); }
};

struct ApplyIdeal {
  std::optional<std::vector<double>>& b;  // nullopt = infinity
  void operator()(const Translation& t) const {
    if (!b) return;
    for (std::size_t i = 0; i < b->size(); ++i) (*b)[i] += t.shift[i];
  }
  void operator()(const Dilation& s) const {
    if (!b) return;
    for (std::size_t i = 0; i < b->size(); ++i)
      (*b)[i] = s.center[i] + s.factor * ((*b)[i] - s.center[i]);
  }
  void operator()(const Orthogonal& o) const {
    if (!b) return;
    const std::size_t m = b->size();
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out[i] += o.matrix[i * m + j] * (*b)[j];
    *b = std::move(out);
  }
  void operator()(const Inversion& inv) const {
    if (!b) {
      b = inv.center;
      return;
    }
    if (sq_dist(*b, inv.center) == 0.0) {
      b.reset();
      return;
    }
    *b = invert_coords(*b, inv.center, inv.radius);
  }
};

}  // namespace

Isometry Isometry::then(const Isometry& next) const {
  std::vector<Primitive> s = steps_;
  s.insert(s.end(), next.steps_.begin(), next.steps_.end());
  return Isometry(std::move(s));
}

Isometry Isometry::inverse() const {
  std::vector<Primitive> inv;
  inv.reserve(steps_.size());
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Translation>) {
            Translation t = s;
            for (double& v : t.shift) v = -v;
            inv.emplace_back(std::move(t));
          } else if constexpr (std::is_same_v<T, Dilation>) {
            inv.emplace_back(Dilation{s.center, 1.0 / s.factor});
          } else if constexpr (std::is_same_v<T, Orthogonal>) {
            const auto m = static_cast<std::size_t>(std::llround(std::sqrt(s.matrix.size())));
            Orthogonal o{std::vector<double>(s.matrix.size())};
            for (std::size_t i = 0; i < m; ++i)
              for (std::size_t j = 0; j < m; ++j) o.matrix[j * m + i] = s.matrix[i * m + j];
            inv.emplace_back(std::move(o));
          } else {
            inv.emplace_back(s);
          }
        },
        *it);
  }
  return Isometry(std::move(inv));
}

Point Isometry::operator()(const Point& x) const {
  std::vector<double> c(x.coords().begin(), x.coords().end());
  for (const auto& s : steps_) std::visit(ApplyPoint{c}, s);
  return Point(std::move(c));
}

IdealPoint Isometry::operator()(const IdealPoint& x) const {
  std::optional<std::vector<double>> b;
  if (!x.is_infinity()) b.emplace(x.boundary().begin(), x.boundary().end());
  for (const auto& s : steps_) std::visit(ApplyIdeal{b}, s);
  return b ? IdealPoint(std::move(*b)) : IdealPoint::infinity();
}

HalfSpace Isometry::operator()(const HalfSpace& h) const {
  auto [a, b] = h.any_pair();
  return halfspace((*this)(a), (*this)(b));
}

Isometry normalize_pair(const Point& x, const Point& y) {
  require_same_dim(x, y);
  const std::size_t m = x.dim() - 1;
  std::vector<Primitive> steps;
  Point px = x, py = y;
  auto push = [&](Primitive s) {
    Isometry one({s});
    px = one(px);
    py = one(py);
    steps.push_back(std::move(s));
  };

  double len = std::sqrt(sq_dist(x.horizontal(), y.horizontal()));
  if (len > 1e-13 * std::max(x.height(), y.height())) {
    // Send the far endpoint of the geodesic through x, y to infinity.
    double u0 = (len * len + y.height() * y.height() - x.height() * x.height()) / (2.0 * len);
    double rho = std::hypot(u0, x.height());
    std::vector<double> xi(m);
    for (std::size_t i = 0; i < m; ++i) xi[i] = x[i] + (u0 + rho) * (y[i] - x[i]) / len;
    double r = std::sqrt(sq_dist_to_base(x, xi));
    push(Inversion{xi, r});
  }
  std::vector<double> shift(px.horizontal().begin(), px.horizontal().end());
  for (double& v : shift) v = -v;
  push(Translation{shift});
  push(Dilation{std::vector<double>(m, 0.0), 1.0 / px.height()});
  // Both points now sit on the vertical axis.
  if (py.height() < 1.0) push(Inversion{std::vector<double>(m, 0.0), 1.0});
  return Isometry(std::move(steps));
}

}  // namespace hyperperc::hypgeom
