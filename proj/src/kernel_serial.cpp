#include "bergman/kernel.hpp"
#include "bergman/summation.hpp"
#include "kernel_detail.hpp"

namespace bergman {

KernelEvaluation kernel_norm_serial(const SurfaceModel& model, const OrbitBall& ball, const HalfPlanePoint& z,
                                    const HalfPlanePoint& w, const KernelParams& params) {
  const auto terms = detail::truncated_terms(model, ball, z, w, params);
  CompensatedComplexSum series;
  CompensatedSum majorant;
  for (const BallElement* e : terms) {
    const auto t = detail::kernel_term(e->element, z, w, params.k);
    series.add(detail::as_complex(t));
    majorant.add(t.magnitude);
  }
  return detail::finish_evaluation(model, z, w, params, series.value(), majorant.value(), terms.size());
}

}  // namespace bergman
