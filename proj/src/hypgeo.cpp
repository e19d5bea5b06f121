#include "bergman/hypgeo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "bergman/errors.hpp"

namespace bergman {

HalfPlanePoint::HalfPlanePoint(double x, double y) : x_(x), y_(y) {
  if (!(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
    throw PreconditionError("half-plane point needs finite x and y > 0, got (" + std::to_string(x) +
                            ", " + std::to_string(y) + ")");
  }
}

std::ostream& operator<<(std::ostream& os, const HalfPlanePoint& z) {
  return os << z.x() << (z.y() < 0 ? "" : "+") << z.y() << "i";
}

namespace {

// a*d - b*c accurate to a few ulps of the result, even when the products are large
double det2(double a, double b, double c, double d) {
  const double bc = b * c;
  const double err = std::fma(-b, c, bc);
  return std::fma(a, d, -bc) + err;
}

}  // namespace

double MoebiusElement::determinant() const noexcept { return det2(a_, b_, c_, d_); }

MoebiusElement MoebiusElement::from_stored(double a, double b, double c, double d) {
  if (c < 0.0 || (c == 0.0 && a <= 0.0) || !(det2(a, b, c, d) > 0.0)) {
    throw PreconditionError("stored Moebius entries are not sign-normalized");
  }
  return MoebiusElement(a, b, c, d);
}

MoebiusElement MoebiusElement::from_entries(double a, double b, double c, double d) {
  double det = det2(a, b, c, d);
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw PreconditionError("Moebius entries must have positive determinant");
  }
  if (std::abs(det - 1.0) > 1e-13) {
    const double s = 1.0 / std::sqrt(det);
    a *= s;
    b *= s;
    c *= s;
    d *= s;
  }
  if (c < 0.0 || (c == 0.0 && a < 0.0)) {
    a = -a;
    b = -b;
    c = -c;
    d = -d;
  }
  // -0.0 would break field equality with +0.0 copies
  if (c == 0.0) c = 0.0;
  if (b == 0.0) b = 0.0;
  return MoebiusElement(a, b, c, d);
}

double MoebiusElement::max_abs_entry() const noexcept {
  return std::max({std::abs(a_), std::abs(b_), std::abs(c_), std::abs(d_)});
}

MoebiusElement MoebiusElement::inverse() const noexcept {
  // (d, -b, -c, a) up to sign; re-normalize the sign by hand to stay noexcept
  double a = d_, b = -b_, c = -c_, d = a_;
  if (c < 0.0 || (c == 0.0 && a < 0.0)) {
    a = -a;
    b = -b;
    c = -c;
    d = -d;
  }
  if (c == 0.0) c = 0.0;
  if (b == 0.0) b = 0.0;
  return MoebiusElement(a, b, c, d);
}

std::ostream& operator<<(std::ostream& os, const MoebiusElement& g) {
  return os << "(" << g.a() << ", " << g.b() << ", " << g.c() << ", " << g.d() << ")";
}

MoebiusElement mobius_compose(const MoebiusElement& g, const MoebiusElement& h) {
  return MoebiusElement::from_entries(g.a() * h.a() + g.b() * h.c(), g.a() * h.b() + g.b() * h.d(),
                                      g.c() * h.a() + g.d() * h.c(), g.c() * h.b() + g.d() * h.d());
}

HalfPlanePoint mobius_apply(const MoebiusElement& g, const HalfPlanePoint& z) {
  const double x = z.x(), y = z.y();
  const double jr = g.c() * x + g.d();
  const double ji = g.c() * y;
  const double jn = jr * jr + ji * ji;
  // Re((az+b) * conj(cz+d)) / |cz+d|^2
  const double re = ((g.a() * x + g.b()) * jr + g.a() * y * ji) / jn;
  return HalfPlanePoint(re, y / jn);
}

Complex cocycle_j(const MoebiusElement& g, const HalfPlanePoint& z) {
  return {g.c() * z.x() + g.d(), g.c() * z.y()};
}

double cosh2_half_distance(const HalfPlanePoint& z, const HalfPlanePoint& w) {
  const double dx = z.x() - w.x();
  const double sy = z.y() + w.y();
  return (dx * dx + sy * sy) / (4.0 * z.y() * w.y());
}

double hyp_distance(const HalfPlanePoint& z, const HalfPlanePoint& w) {
  // sinh^2(d/2) = cosh^2(d/2) - 1 = |z - w|^2/(4yv); arcsinh keeps precision near z == w
  const double dx = z.x() - w.x();
  const double dy = z.y() - w.y();
  const double s2 = (dx * dx + dy * dy) / (4.0 * z.y() * w.y());
  return 2.0 * std::asinh(std::sqrt(s2));
}

HalfPlanePoint point_at_distance(const HalfPlanePoint& z, double dist, double angle) {
  // rotate i*e^dist about i by `angle`, then move i to z with w -> y*w + x
  const double t = 0.5 * angle;
  const double ct = std::cos(t), st = std::sin(t);
  const HalfPlanePoint up(0.0, std::exp(dist));
  // R_t = [[cos t, sin t], [-sin t, cos t]] turns tangent vectors at i by 2t
  const double jr = -st * up.x() + ct;
  const double ji = -st * up.y();
  const double jn = jr * jr + ji * ji;
  const double re = ((ct * up.x() + st) * jr + ct * up.y() * ji) / jn;
  const double im = up.y() / jn;
  return HalfPlanePoint(z.y() * re + z.x(), z.y() * im);
}

double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

double log_sinh(double x) { return x + std::log(-std::expm1(-2.0 * x)) - std::log(2.0); }

}  // namespace bergman
