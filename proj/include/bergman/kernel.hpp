#pragma once

#include <cstddef>
#include <vector>

#include "bergman/fuchsian.hpp"
#include "bergman/hypgeo.hpp"

namespace bergman {

struct KernelParams {
  int k = 3;                        ///< tensor power, >= 3
  double truncation_radius = 8.0;   ///< hyperbolic length
  double tail_tolerance = 1e-12;    ///< relative to the majorant; exceeding it only sets a flag
};

struct KernelEvaluation {
  double norm_value = 0.0;      ///< truncated pointwise norm of the Bergman kernel
  double majorant_value = 0.0;  ///< (2k-1)/(4 pi) * sum of cosh^{-2k}(d(gz,w)/2) over the same set
  double tail_bound = 0.0;      ///< bound on what the truncation leaves out, same scale as the values
  std::size_t element_count = 0;
  double parabolic_part = 0.0;  ///< cusp-stabilizer share of majorant_value
  bool tail_warning = false;    ///< tail_bound > tail_tolerance * majorant_value
};

/// cosh^{-2k}(d(z,w)/2), evaluated as exp(-k log cosh^2(d/2)).
double majorant_term(const HalfPlanePoint& z, const HalfPlanePoint& w, int k);

/// sum over n of majorant_term(z + n*width, w, k), summed outward from n = 0
/// until the next term drops below 1e-18 of the partial sum. Not scaled.
double parabolic_subsum(const HalfPlanePoint& z, const HalfPlanePoint& w, int k, double cusp_width);

/// Bound on the terms parabolic_subsum leaves out.
double parabolic_subsum_remainder(const HalfPlanePoint& z, const HalfPlanePoint& w, int k, double cusp_width);

/// (4yv)^k * sum over n of (z + n*width - conj(w))^{-2k}: the cusp-stabilizer
/// part of the kernel series. Uses the Lipschitz expansion
///   sum_n (tau + n)^{-2k} = (2 pi)^{2k} (-1)^k / Gamma(2k) * sum_{m>=1} m^{2k-1} e^{2 pi i m tau}
/// when Im(tau) = (y+v)/width >= 1/2, and symmetric direct summation otherwise.
Complex parabolic_series(const HalfPlanePoint& z, const HalfPlanePoint& w, int k, double cusp_width);

/// Bound on sum over d(gz,w) > delta of cosh^{-2k}(d(gz,w)/2) for a group
/// with injectivity radius r. Throws PreconditionError when k < 3 or
/// delta <= r/2. Not scaled by (2k-1)/(4 pi).
double tail_bound(double delta, double injectivity_radius, int k);

/// Truncated kernel norm over the ball elements with displacement <= the
/// truncation radius, plus the closed-form cusp-stabilizer part for models
/// with a cusp. The term loop is an OpenMP reduction over fixed-size chunks,
/// so the result does not depend on the thread count.
///
/// Throws PreconditionError when the ball is not exhaustive, is based at
/// other points, is smaller than the truncation radius, or when k < 3.
KernelEvaluation kernel_norm(const SurfaceModel& model, const OrbitBall& ball, const HalfPlanePoint& z,
                             const HalfPlanePoint& w, const KernelParams& params);

/// Single-threaded reference for kernel_norm: one compensated pass in ball order.
KernelEvaluation kernel_norm_serial(const SurfaceModel& model, const OrbitBall& ball, const HalfPlanePoint& z,
                                    const HalfPlanePoint& w, const KernelParams& params);

struct StripSample {
  HalfPlanePoint z{0.0, 1.0};
  KernelEvaluation evaluation;
};

struct StripSup {
  double norm_sup = 0.0;      ///< max of norm_value over the samples
  double majorant_sup = 0.0;  ///< max of majorant_value over the samples
  HalfPlanePoint norm_argmax{0.0, 1.0};
  std::vector<StripSample> samples;
};

/// Boundary points of {0 <= x <= 1, y > k/(2 pi)}: half the samples on the
/// bottom edge y = k/(2 pi) (always including x = 1/2), the rest on the side
/// x = 0 for k/(2 pi) <= y <= 5k/(2 pi). The side x = 1 is its translate.
std::vector<HalfPlanePoint> strip_boundary_points(int k, int n_samples);

/// Maximum of the diagonal kernel over strip_boundary_points. A lower bound
/// for the supremum over the half-plane. Requires the modular model and
/// n_samples >= 8.
StripSup diagonal_sup_strip(const SurfaceModel& model, int k, int n_samples, const KernelParams& params,
                            const EnumerationOptions& options = {});

}  // namespace bergman
