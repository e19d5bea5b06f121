#pragma once

// Closed-form bounds on the Bergman kernel norm and the growth envelopes used
// to read the measurements. All functions are pure. An infinite injectivity
// radius (the elementary models) is accepted and handled as a limit.

#include <optional>
#include <string_view>

#include "bergman/fuchsian.hpp"

namespace bergman {

enum class SurfaceKind { compact, noncompact };

/// near: 0 <= delta <= r/2. mid: r/2 < delta < r. delta >= r is outside both.
enum class Regime { near, mid };

/// Models with a cusp are noncompact, the rest compact.
SurfaceKind surface_kind(const SurfaceModel& model) noexcept;

/// Throws PreconditionError when delta < 0 or delta >= r.
Regime classify_regime(double delta, double injectivity_radius);

std::string_view regime_name(Regime regime) noexcept;
std::optional<Regime> parse_regime(std::string_view name) noexcept;

struct BoundInput {
  int k = 3;
  double injectivity_radius = 0.0;
  double delta = 0.0;
  double y = 0.0;  ///< noncompact only
  double v = 0.0;  ///< noncompact only
  SurfaceKind kind = SurfaceKind::compact;
  Regime regime = Regime::near;
};

/// Mid-regime constant. Requires k >= 3 and r/2 < delta < r.
double constant_c1(int k, double injectivity_radius, double delta);

/// Near-regime constant. Requires k >= 3 and 0 <= delta <= r/2.
double constant_c2(int k, double injectivity_radius, double delta);

/// Extra terms for a surface with a cusp at i*infinity:
///   (2k-1)/(4 pi cosh^{2k}(delta/2)) + (4yv)^k/(y+v)^{2k-1} * (2k-1) Gamma(k-1/2) / (2 sqrt(pi) Gamma(k))
double noncompact_extra(int k, double delta, double y, double v);

/// c1 or c2 by regime, plus noncompact_extra for noncompact surfaces.
/// Throws PreconditionError when the regime does not match delta.
double theorem_bound(const BoundInput& input);

struct BoundReport {
  double bound_value = 0.0;
  double measured_value = 0.0;  ///< kernel norm + tail bound
  double margin = 0.0;          ///< bound_value - measured_value
  bool passed = false;          ///< margin >= 0
};

BoundReport check_bound(const BoundInput& input, double kernel_norm, double tail_bound);

enum class Envelope { remark_mid, remark_near, prior_am1, diag_compact, diag_noncompact };

std::string_view envelope_name(Envelope which) noexcept;

/// Growth shapes without their unknown constants, for ratio studies only;
/// never a certified bound.
///   remark_mid      k / cosh^{2k}((r - delta)/2)
///   remark_near     k / cosh^{2k}(delta/2)
///   prior_am1       k / cosh^{2k-4}((delta - r)/2)   (meant for delta >= r)
///   diag_compact    k
///   diag_noncompact k^{3/2}
double envelope(int k, double delta, double injectivity_radius, Envelope which);

}  // namespace bergman
