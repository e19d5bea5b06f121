#include "bergman/fuchsian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "bergman/errors.hpp"
#include "bergman/kernel.hpp"
#include "bergman/summation.hpp"

namespace bergman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near_identity(const MoebiusElement& g) {
  return std::abs(g.a() - 1.0) + std::abs(g.b()) + std::abs(g.c()) + std::abs(g.d() - 1.0) < 1e-9;
}

SurfaceModel modular_model() {
  SurfaceModel m;
  m.label = "modular";
  m.kind = ModelKind::noncompact;
  const auto t = MoebiusElement::from_entries(1, 1, 0, 1);
  const auto s = MoebiusElement::from_entries(0, -1, 1, 0);
  m.generators = {t, t.inverse(), s};
  m.cusp_width = 1.0;
  // d(2i, S 2i) = ln 4 is the smallest displacement over cusp_region_samples(1, 2);
  // pinned by the fuchsian tests against estimate_injectivity_radius
  m.injectivity_radius = std::log(4.0);
  m.enumeration = Enumeration::integral;
  return m;
}

}  // namespace

double bolza_systole() { return 2.0 * std::acosh(1.0 + std::numbers::sqrt2); }

std::vector<WideMatrix> bolza_generators_wide() {
  // z -> lambda^2 z translates along the imaginary axis through i by the
  // systole; conjugating by rotations about i through multiples of pi/4 gives
  // the eight pairings of opposite sides of the regular octagon with angles pi/4.
  const long double lambda = std::exp(std::acosh(1.0L + std::sqrt(2.0L)));
  std::vector<WideMatrix> gens;
  gens.reserve(8);
  for (int j = 0; j < 8; ++j) {
    // R_t = [[cos t, sin t], [-sin t, cos t]] rotates about i by 2t
    const long double t = j * std::numbers::pi_v<long double> / 8.0L;
    const long double ct = std::cos(t), st = std::sin(t);
    // R_t * diag(lambda, 1/lambda) * R_{-t}
    const long double a = lambda * ct * ct + st * st / lambda;
    const long double b = (lambda - 1.0L / lambda) * ct * st;
    const long double d = lambda * st * st + ct * ct / lambda;
    gens.push_back({a, -b, -b, d});
  }
  return gens;
}

std::vector<MoebiusElement> bolza_generators() {
  std::vector<MoebiusElement> gens;
  for (const auto& g : bolza_generators_wide()) {
    gens.push_back(MoebiusElement::from_entries(static_cast<double>(g.a), static_cast<double>(g.b),
                                                static_cast<double>(g.c), static_cast<double>(g.d)));
  }
  return gens;
}

SurfaceModel build_surface_model(std::string_view selector) {
  if (selector == "trivial") {
    SurfaceModel m;
    m.label = "trivial";
    m.kind = ModelKind::elementary_trivial;
    return m;
  }
  if (selector == "parabolic") {
    SurfaceModel m;
    m.label = "parabolic";
    m.kind = ModelKind::elementary_parabolic;
    const auto t = MoebiusElement::from_entries(1, 1, 0, 1);
    m.generators = {t, t.inverse()};
    m.cusp_width = 1.0;
    return m;
  }
  if (selector == "modular") return modular_model();
  if (selector == "gamma2") return congruence_cover(modular_model(), 2);
  if (selector == "bolza") {
    SurfaceModel m;
    m.label = "bolza";
    m.kind = ModelKind::compact;
    m.generators = bolza_generators();
    m.wide_generators = bolza_generators_wide();
    m.injectivity_radius = bolza_systole();
    m.word_anchor = HalfPlanePoint(0.0, 1.0);
    return m;
  }
  throw ConfigError("unknown model selector '" + std::string(selector) +
                    "' (expected trivial, parabolic, modular, bolza or gamma2)");
}

OrbitBall enumerate_ball(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                         double radius, const EnumerationOptions& options) {
  if (model.enumeration == Enumeration::integral) return enumerate_ball_integral(model, z, w, radius, options);
  return enumerate_ball_words(model, z, w, radius, options);
}

std::size_t counting_function(const OrbitBall& ball, double rho) {
  if (rho > ball.radius + 1e-12) {
    throw PreconditionError("counting radius " + std::to_string(rho) + " exceeds ball radius " +
                            std::to_string(ball.radius));
  }
  // elements are sorted by displacement
  const auto it = std::upper_bound(ball.elements.begin(), ball.elements.end(), rho,
                                   [](double r, const BallElement& e) { return r < e.displacement; });
  return static_cast<std::size_t>(it - ball.elements.begin());
}

std::size_t counting_function(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                              double rho, const EnumerationOptions& options) {
  return counting_function(enumerate_ball(model, z, w, rho, options), rho);
}

double counting_bound(double delta, double injectivity_radius) {
  if (std::isinf(injectivity_radius)) return std::exp(delta);
  const double r = injectivity_radius;
  // e^delta (1 - e^{-2(delta+r)}) / (1 - e^{-2r}), stable for large r
  return std::exp(delta) * (-std::expm1(-2.0 * (delta + r))) / (-std::expm1(-2.0 * r));
}

double estimate_injectivity_radius(const SurfaceModel& model, std::span<const HalfPlanePoint> samples,
                                   const EnumerationOptions& options) {
  if (samples.empty()) throw PreconditionError("estimate_injectivity_radius needs at least one sample point");
  if (model.kind == ModelKind::elementary_trivial || model.kind == ModelKind::elementary_parabolic ||
      model.generators.empty()) {
    return kInf;
  }
  double best = kInf;
  for (const auto& z : samples) {
    double radius = std::isfinite(best) ? best + 1.0 : 1.0;
    while (true) {
      const OrbitBall ball = enumerate_ball(model, z, z, radius, options);
      double found = kInf;
      for (const auto& e : ball.elements) {
        if (near_identity(e.element) || model.in_cusp_stabilizer(e.element)) continue;
        found = std::min(found, e.displacement);
      }
      if (std::isfinite(found)) {
        best = std::min(best, found);
        break;
      }
      // nothing inside the ball: this sample cannot improve a finite estimate
      if (std::isfinite(best) || radius > 64.0) break;
      radius *= 2.0;
    }
  }
  return best;
}

std::vector<HalfPlanePoint> cusp_region_samples(double cusp_width, double height) {
  if (!(cusp_width > 0.0) || !(height > 0.0)) throw PreconditionError("cusp region needs positive width and height");
  std::vector<HalfPlanePoint> pts = {{0.0, 0.5 * std::numbers::e * height}};
  for (int j = 0; j <= 32; ++j) pts.emplace_back(j * cusp_width / 32.0, height);
  return pts;
}

bool in_principal_congruence(const MoebiusElement& g, int level) {
  if (level != 2) throw ConfigError("only level-2 congruence covers are supported");
  const auto odd = [](double v) { return std::fmod(std::abs(v), 2.0) == 1.0; };
  const auto even = [](double v) { return std::fmod(std::abs(v), 2.0) == 0.0; };
  // -Id == Id mod 2, so the sign of the representative does not matter
  return odd(g.a()) && odd(g.d()) && even(g.b()) && even(g.c());
}

SurfaceModel congruence_cover(const SurfaceModel& modular, int level) {
  if (level != 2) throw ConfigError("congruence cover level " + std::to_string(level) + " is not supported");
  if (modular.label != "modular" || modular.enumeration != Enumeration::integral) {
    throw ConfigError("congruence covers are only built over the modular model");
  }
  SurfaceModel m;
  m.label = "gamma2";
  m.kind = ModelKind::noncompact;
  const auto t2 = MoebiusElement::from_entries(1, 2, 0, 1);
  const auto l2 = MoebiusElement::from_entries(1, 0, 2, 1);
  m.generators = {t2, t2.inverse(), l2, l2.inverse()};
  m.cusp_width = 2.0;
  m.enumeration = Enumeration::integral;
  m.congruence_level = 2;
  const auto samples = cusp_region_samples(m.cusp_width, 1.0);
  m.injectivity_radius = estimate_injectivity_radius(m, samples);
  return m;
}

DecreasingWeight cosh_power_weight(int k, double injectivity_radius) {
  DecreasingWeight f;
  f.value = [k](double rho) { return std::exp(-2.0 * k * log_cosh(0.5 * rho)); };
  f.remainder = [k, injectivity_radius](double radius) { return tail_bound(radius, injectivity_radius, k); };
  return f;
}

CountingMargin counting_inequality_margin(const SurfaceModel& model, const OrbitBall& ball, double delta,
                                          const DecreasingWeight& f) {
  const double r = model.injectivity_radius;
  if (std::isfinite(r) && !(delta > 0.5 * r)) {
    throw PreconditionError("counting inequality needs delta > r_X/2 (delta = " + std::to_string(delta) +
                            ", r_X = " + std::to_string(r) + ")");
  }
  if (!ball.exhaustive) throw PreconditionError("counting inequality needs an exhaustive ball");
  if (delta > ball.radius) throw PreconditionError("counting inequality needs delta <= ball radius");

  CountingMargin out{};
  // both sides share the sum up to delta; the slack is taken from the parts
  // that differ so it does not drown in the rounding of that sum
  CompensatedSum head, beyond;
  for (const auto& e : ball.elements) {
    const double fv = f.value(e.displacement);
    (e.displacement <= delta ? head : beyond).add(fv);
  }
  out.lhs = head.value() + beyond.value();
  const bool complete = model.kind == ModelKind::elementary_trivial || model.kind == ModelKind::elementary_parabolic;
  out.lhs_remainder = complete ? 0.0 : f.remainder(ball.radius);

  double extra = 0.0;
  if (std::isinf(r)) {
    // r -> infinity: 2cosh(r/4)/sinh(r/4) -> 2 and 1/(2 sinh^2(r/4)) -> 0
    extra = f.value(delta) * 2.0 * std::sinh(delta);
  } else {
    const double s4 = std::sinh(0.25 * r);
    extra = f.value(delta) * 2.0 * std::cosh(0.25 * r) * std::sinh(delta) / s4;
    const auto integrand = [&](double t) {
      const double fv = f.value(delta + t);
      if (fv == 0.0) return 0.0;
      return fv * std::sinh(delta + t + 0.5 * r);
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    const double integral = integrator.integrate(integrand, 1e-12);
    extra += integral / (2.0 * s4 * s4);
  }
  out.rhs = head.value() + extra;
  out.slack = extra - beyond.value() - out.lhs_remainder;
  return out;
}

CountingMargin counting_inequality_margin(const SurfaceModel& model, const OrbitBall& ball, double delta, int k) {
  return counting_inequality_margin(model, ball, delta, cosh_power_weight(k, model.injectivity_radius));
}

}  // namespace bergman
