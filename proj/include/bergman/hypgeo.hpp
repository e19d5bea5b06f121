#pragma once

#include <complex>
#include <iosfwd>

namespace bergman {

using Complex = std::complex<double>;

/// A point z = x + iy of the upper half-plane. Construction rejects y <= 0.
class HalfPlanePoint {
 public:
  HalfPlanePoint(double x, double y);
  explicit HalfPlanePoint(Complex z) : HalfPlanePoint(z.real(), z.imag()) {}

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  Complex value() const noexcept { return {x_, y_}; }

  friend bool operator==(const HalfPlanePoint&, const HalfPlanePoint&) = default;

 private:
  double x_;
  double y_;
};

std::ostream& operator<<(std::ostream& os, const HalfPlanePoint& z);

/// An element of PSL(2,R), stored as the sign-normalized representative
/// (c > 0, or c == 0 and a > 0) with determinant within 1e-13 of one.
class MoebiusElement {
 public:
  /// Identity.
  constexpr MoebiusElement() = default;

  /// Normalizes sign and repairs the determinant; throws PreconditionError
  /// when a*d - b*c is not positive.
  static MoebiusElement from_entries(double a, double b, double c, double d);

  static constexpr MoebiusElement identity() { return {}; }

  /// Rebuilds an element from entries that are already normalized (e.g. read
  /// back from a ball cache file) without touching them.
  static MoebiusElement from_stored(double a, double b, double c, double d);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }
  double determinant() const noexcept;
  double max_abs_entry() const noexcept;

  MoebiusElement inverse() const noexcept;

  /// Exact field comparison of the normalized representatives.
  friend bool operator==(const MoebiusElement&, const MoebiusElement&) = default;

 private:
  constexpr MoebiusElement(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {}

  double a_ = 1.0;
  double b_ = 0.0;
  double c_ = 0.0;
  double d_ = 1.0;
};

std::ostream& operator<<(std::ostream& os, const MoebiusElement& g);

/// Product g*h (apply h first).
MoebiusElement mobius_compose(const MoebiusElement& g, const MoebiusElement& h);

/// gz = (az + b)/(cz + d). Im(gz) is computed as y/|cz + d|^2.
HalfPlanePoint mobius_apply(const MoebiusElement& g, const HalfPlanePoint& z);

/// Automorphy factor j(g, z) = cz + d of the normalized representative.
Complex cocycle_j(const MoebiusElement& g, const HalfPlanePoint& z);

/// cosh^2(d(z,w)/2) = ((x-u)^2 + (y+v)^2) / (4yv).
double cosh2_half_distance(const HalfPlanePoint& z, const HalfPlanePoint& w);

/// Hyperbolic distance for curvature -1.
double hyp_distance(const HalfPlanePoint& z, const HalfPlanePoint& w);

/// Point at hyperbolic distance `dist` from z, leaving z at angle `angle`
/// (radians, measured from the upward vertical direction).
HalfPlanePoint point_at_distance(const HalfPlanePoint& z, double dist, double angle);

/// log(cosh(x)) without overflow for large |x|.
double log_cosh(double x);

/// log sinh(x) for x > 0, stable for small and large x; +inf at +inf.
double log_sinh(double x);

}  // namespace bergman
