#pragma once

// Shared pieces of the serial and OpenMP kernel evaluations.

#include <cmath>
#include <numbers>
#include <vector>

#include "bergman/errors.hpp"
#include "bergman/fuchsian.hpp"
#include "bergman/kernel.hpp"

namespace bergman::detail {

/// Magnitude (cosh^{-2k} of the half distance) and phase of the scaled term
/// (4yv)^k (gz - conj w)^{-2k} j(g,z)^{-2k}.
struct KernelTerm {
  double magnitude;
  double phase;
};

inline KernelTerm kernel_term(const MoebiusElement& g, const HalfPlanePoint& z, const HalfPlanePoint& w, int k) {
  const HalfPlanePoint p = mobius_apply(g, z);
  const double log_c2 = std::log(cosh2_half_distance(p, w));
  // arg((gz - conj w) * j) = arg(gz - conj w) + arg(j); both factors well conditioned
  const double arg_u = std::atan2(p.y() + w.y(), p.x() - w.x()) + std::atan2(g.c() * z.y(), g.c() * z.x() + g.d());
  return {std::exp(-k * log_c2), -2.0 * k * arg_u};
}

inline std::complex<double> as_complex(const KernelTerm& t) {
  return {t.magnitude * std::cos(t.phase), t.magnitude * std::sin(t.phase)};
}

inline double kernel_scale(int k) { return (2.0 * k - 1.0) / (4.0 * std::numbers::pi); }

/// Validates the inputs and returns the ball elements that enter the truncated sum.
std::vector<const BallElement*> truncated_terms(const SurfaceModel& model, const OrbitBall& ball,
                                                const HalfPlanePoint& z, const HalfPlanePoint& w,
                                                const KernelParams& params);

/// Adds the cusp-stabilizer part and the tail bound, then scales.
KernelEvaluation finish_evaluation(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                                   const KernelParams& params, std::complex<double> ball_sum, double ball_majorant,
                                   std::size_t count);

}  // namespace bergman::detail
