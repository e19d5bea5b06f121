#include "bergman/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

constexpr double kPi = std::numbers::pi;

void require_k(int k) {
  if (k < 3) throw PreconditionError("bounds need k >= 3, got " + std::to_string(k));
}

void require_radius(double r) {
  if (!(r > 0.0)) throw PreconditionError("injectivity radius must be positive");
}

// cosh^{-p}(x) through logs; 0 at x = inf
double cosh_neg_pow(double x, double p) { return std::exp(-p * log_cosh(x)); }

}  // namespace

SurfaceKind surface_kind(const SurfaceModel& model) noexcept {
  return model.has_cusp() ? SurfaceKind::noncompact : SurfaceKind::compact;
}

Regime classify_regime(double delta, double injectivity_radius) {
  require_radius(injectivity_radius);
  if (!(delta >= 0.0)) throw PreconditionError("delta must be non-negative");
  if (delta <= 0.5 * injectivity_radius) return Regime::near;
  if (delta < injectivity_radius) return Regime::mid;
  throw PreconditionError("delta = " + std::to_string(delta) + " is not below r_X = " +
                          std::to_string(injectivity_radius));
}

std::string_view regime_name(Regime regime) noexcept { return regime == Regime::near ? "near" : "mid"; }

std::optional<Regime> parse_regime(std::string_view name) noexcept {
  if (name == "near") return Regime::near;
  if (name == "mid") return Regime::mid;
  return std::nullopt;
}

double constant_c1(int k, double r, double delta) {
  require_k(k);
  require_radius(r);
  if (!(delta > 0.5 * r && delta < r)) throw PreconditionError("constant_c1 needs r/2 < delta < r");
  const double scale = (2.0 * k - 1.0) / (4.0 * kPi);
  const double quarter = cosh_neg_pow(0.25 * r, 2.0 * k - 4.0);
  const double first = scale * (cosh_neg_pow(0.5 * (r - delta), 2.0 * k) + 32.0 * quarter);
  const double second = std::exp(std::log(2.0 * k - 1.0) - std::log(kPi * (k - 2.0)) - 2.0 * log_sinh(0.25 * r) -
                                 (2.0 * k - 4.0) * log_cosh(0.25 * r));
  return first + second;
}

double constant_c2(int k, double r, double delta) {
  require_k(k);
  require_radius(r);
  if (!(delta >= 0.0 && delta <= 0.5 * r)) throw PreconditionError("constant_c2 needs 0 <= delta <= r/2");
  const double scale = (2.0 * k - 1.0) / (4.0 * kPi);
  const double lc4 = log_cosh(0.25 * r);
  const double lc2 = log_cosh(0.5 * r);
  const double first = scale * (2.0 * cosh_neg_pow(0.5 * delta, 2.0 * k) + 16.0 * std::exp(-(2.0 * k - 4.0) * lc4) +
                                8.0 * std::exp(-(2.0 * k - 3.0) * lc2));
  const double outer = std::log(2.0 * k - 1.0) - std::log(2.0 * kPi) - 2.0 * log_sinh(0.25 * r);
  const double second = std::exp(outer - std::log(2.0 * k - 2.0) - (2.0 * k - 3.0) * lc2) +
                        std::exp(outer - std::log(k - 2.0) - (2.0 * k - 4.0) * lc2);
  return first + second;
}

double noncompact_extra(int k, double delta, double y, double v) {
  require_k(k);
  if (!(y > 0.0) || !(v > 0.0)) throw PreconditionError("noncompact_extra needs y, v > 0");
  if (!(delta >= 0.0)) throw PreconditionError("delta must be non-negative");
  const double first = (2.0 * k - 1.0) / (4.0 * kPi) * cosh_neg_pow(0.5 * delta, 2.0 * k);
  const double log_ratio = k * std::log(4.0 * y * v) - (2.0 * k - 1.0) * std::log(y + v);
  const double log_gamma = std::lgamma(k - 0.5) - std::lgamma(static_cast<double>(k));
  const double second =
      std::exp(log_ratio + log_gamma + std::log(2.0 * k - 1.0) - std::log(2.0 * std::sqrt(kPi)));
  return first + second;
}

double theorem_bound(const BoundInput& in) {
  if (classify_regime(in.delta, in.injectivity_radius) != in.regime) {
    throw PreconditionError("regime does not match delta and r_X");
  }
  const double base = in.regime == Regime::mid ? constant_c1(in.k, in.injectivity_radius, in.delta)
                                               : constant_c2(in.k, in.injectivity_radius, in.delta);
  if (in.kind == SurfaceKind::compact) return base;
  return base + noncompact_extra(in.k, in.delta, in.y, in.v);
}

BoundReport check_bound(const BoundInput& input, double kernel_norm, double tail_bound) {
  BoundReport out;
  out.bound_value = theorem_bound(input);
  out.measured_value = kernel_norm + tail_bound;
  out.margin = out.bound_value - out.measured_value;
  out.passed = out.margin >= 0.0;
  return out;
}

std::string_view envelope_name(Envelope which) noexcept {
  switch (which) {
    case Envelope::remark_mid: return "remark-mid";
    case Envelope::remark_near: return "remark-near";
    case Envelope::prior_am1: return "prior-am1";
    case Envelope::diag_compact: return "diag-compact";
    case Envelope::diag_noncompact: return "diag-noncompact";
  }
  return "";
}

double envelope(int k, double delta, double r, Envelope which) {
  switch (which) {
    case Envelope::remark_mid: return k * cosh_neg_pow(0.5 * (r - delta), 2.0 * k);
    case Envelope::remark_near: return k * cosh_neg_pow(0.5 * delta, 2.0 * k);
    case Envelope::prior_am1: return k * cosh_neg_pow(0.5 * (delta - r), 2.0 * k - 4.0);
    case Envelope::diag_compact: return k;
    case Envelope::diag_noncompact: return std::pow(static_cast<double>(k), 1.5);
  }
  return 0.0;
}

}  // namespace bergman
