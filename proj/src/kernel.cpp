#include "bergman/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bergman/summation.hpp"
#include "kernel_detail.hpp"

namespace bergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kStopRatio = 1e-18;

void require_weight(int k, int minimum) {
  if (k < minimum) {
    throw PreconditionError("weight k = " + std::to_string(k) + " is below the minimum " + std::to_string(minimum));
  }
}

// x - u reduced into [-h/2, h/2]; the cusp sums are invariant under n -> n + m
double reduced_offset(double x, double u, double h) {
  const double a = (x - u) / h;
  return (a - std::nearbyint(a)) * h;
}

struct DirectCuspSum {
  double sum = 0.0;
  double remainder = 0.0;
};

// sum over n of (4yv / ((a + n h)^2 + s^2))^k with a the reduced offset,
// outward from n = 0, both sides together
DirectCuspSum direct_cusp_majorant(const HalfPlanePoint& z, const HalfPlanePoint& w, int k, double h) {
  const double a = reduced_offset(z.x(), w.x(), h);
  const double s = z.y() + w.y();
  const double log4yv = std::log(4.0 * z.y() * w.y());
  const auto term = [&](double offset) { return std::exp(k * (log4yv - std::log(offset * offset + s * s))); };

  CompensatedSum total;
  total.add(term(a));
  long n = 0;
  while (true) {
    ++n;
    const double plus = term(a + n * h);
    const double minus = term(a - n * h);
    total.add(plus);
    total.add(minus);
    // terms are decreasing in |n| once the offset is reduced
    if (std::max(plus, minus) < kStopRatio * total.value()) break;
  }
  DirectCuspSum out;
  out.sum = total.value();
  // sum_{m>n} g(m) <= int_n^inf g <= (4yv)^k / (h (2k-1) (n h +- a)^{2k-1})
  for (double edge : {n * h + a, n * h - a}) {
    out.remainder += std::exp(k * log4yv - std::log(h * (2.0 * k - 1.0)) - (2.0 * k - 1.0) * std::log(edge));
  }
  return out;
}

}  // namespace

double majorant_term(const HalfPlanePoint& z, const HalfPlanePoint& w, int k) {
  require_weight(k, 1);
  return std::exp(-k * std::log(cosh2_half_distance(z, w)));
}

double parabolic_subsum(const HalfPlanePoint& z, const HalfPlanePoint& w, int k, double cusp_width) {
  require_weight(k, 2);
  if (!(cusp_width > 0.0)) throw PreconditionError("cusp width must be positive");
  return direct_cusp_majorant(z, w, k, cusp_width).sum;
}

double parabolic_subsum_remainder(const HalfPlanePoint& z, const HalfPlanePoint& w, int k, double cusp_width) {
  require_weight(k, 2);
  if (!(cusp_width > 0.0)) throw PreconditionError("cusp width must be positive");
  return direct_cusp_majorant(z, w, k, cusp_width).remainder;
}

Complex parabolic_series(const HalfPlanePoint& z, const HalfPlanePoint& w, int k, double cusp_width) {
  require_weight(k, 2);
  if (!(cusp_width > 0.0)) throw PreconditionError("cusp width must be positive");
  const double h = cusp_width;
  const double a = reduced_offset(z.x(), w.x(), h);
  const double s = z.y() + w.y();
  const double log4yv = std::log(4.0 * z.y() * w.y());

  if (s / h >= 0.5) {
    // Lipschitz expansion in q = e^{2 pi i tau}, tau = (a + i s)/h
    const double log_prefactor = k * log4yv - 2.0 * k * std::log(h) + 2.0 * k * std::log(kTwoPi) -
                                 std::lgamma(2.0 * k);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double decay = kTwoPi * s / h;
    const double turn = kTwoPi * a / h;
    const double peak = (2.0 * k - 1.0) / decay;
    CompensatedComplexSum total;
    double magnitude_sum = 0.0;
    for (long m = 1;; ++m) {
      const double mag = std::exp(log_prefactor + (2.0 * k - 1.0) * std::log(static_cast<double>(m)) - decay * m);
      const double ph = turn * m;
      total.add({sign * mag * std::cos(ph), sign * mag * std::sin(ph)});
      magnitude_sum += mag;
      if (m > peak && mag < kStopRatio * magnitude_sum) break;
    }
    return total.value();
  }

  const auto term = [&](double offset) -> Complex {
    const double mag = std::exp(k * (log4yv - std::log(offset * offset + s * s)));
    const double ph = -2.0 * k * std::atan2(s, offset);
    return {mag * std::cos(ph), mag * std::sin(ph)};
  };
  CompensatedComplexSum total;
  CompensatedSum magnitude;
  total.add(term(a));
  magnitude.add(std::abs(term(a)));
  for (long n = 1;; ++n) {
    const Complex plus = term(a + n * h);
    const Complex minus = term(a - n * h);
    total.add(plus);
    total.add(minus);
    magnitude.add(std::abs(plus) + std::abs(minus));
    if (std::max(std::abs(plus), std::abs(minus)) < kStopRatio * magnitude.value()) break;
  }
  return total.value();
}

double tail_bound(double delta, double injectivity_radius, int k) {
  require_weight(k, 3);
  const double r = injectivity_radius;
  if (!std::isfinite(r) || !(r > 0.0)) throw PreconditionError("tail bound needs a finite positive injectivity radius");
  if (!(delta > 0.5 * r)) {
    throw PreconditionError("tail bound needs delta > r_X/2 (delta = " + std::to_string(delta) +
                            ", r_X = " + std::to_string(r) + ")");
  }
  const double lc = log_cosh(0.5 * delta);
  const double s4 = std::sinh(0.25 * r);
  // closed form of int_delta^inf sinh(rho + r/2) cosh^{-2k}(rho/2) drho
  const double integral = std::exp(std::log(4.0) + log_cosh(0.5 * r) - std::log(2.0 * k - 2.0) - (2.0 * k - 2.0) * lc) +
                          std::exp(std::log(8.0) - std::log(2.0 * k - 4.0) - (2.0 * k - 4.0) * lc);
  const double boundary = std::exp(-2.0 * k * lc + std::log(2.0) + log_cosh(0.25 * r) + log_sinh(delta) - std::log(s4));
  return integral / (2.0 * s4 * s4) + boundary;
}

namespace detail {

std::vector<const BallElement*> truncated_terms(const SurfaceModel& model, const OrbitBall& ball,
                                                const HalfPlanePoint& z, const HalfPlanePoint& w,
                                                const KernelParams& params) {
  require_weight(params.k, 3);
  if (!ball.exhaustive) throw PreconditionError("kernel_norm needs an exhaustive ball");
  if (!(ball.z == z) || !(ball.w == w)) throw PreconditionError("ball is based at different points");
  if (ball.radius < params.truncation_radius) {
    throw PreconditionError("ball radius " + std::to_string(ball.radius) + " is below the truncation radius " +
                            std::to_string(params.truncation_radius));
  }
  const bool infinite_group = model.kind == ModelKind::compact || model.kind == ModelKind::noncompact;
  if (infinite_group && !(params.truncation_radius > model.injectivity_radius)) {
    throw PreconditionError("truncation radius must exceed the injectivity radius");
  }
  std::vector<const BallElement*> terms;
  terms.reserve(ball.elements.size());
  for (const auto& e : ball.elements) {
    if (e.displacement > params.truncation_radius) break;
    if (model.in_cusp_stabilizer(e.element)) continue;
    terms.push_back(&e);
  }
  return terms;
}

KernelEvaluation finish_evaluation(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                                   const KernelParams& params, std::complex<double> ball_sum, double ball_majorant,
                                   std::size_t count) {
  const int k = params.k;
  const double scale = kernel_scale(k);
  KernelEvaluation out;
  std::complex<double> series = ball_sum;
  double majorant = ball_majorant;
  double tail = 0.0;
  if (model.has_cusp()) {
    const DirectCuspSum cusp = direct_cusp_majorant(z, w, k, model.cusp_width);
    series += parabolic_series(z, w, k, model.cusp_width);
    majorant += cusp.sum;
    tail += cusp.remainder;
    out.parabolic_part = scale * cusp.sum;
  }
  if (model.kind == ModelKind::compact || model.kind == ModelKind::noncompact) {
    tail += tail_bound(params.truncation_radius, model.injectivity_radius, k);
  } else if (model.kind == ModelKind::elementary_trivial && count == 0) {
    // the only term lies beyond the truncation radius
    tail += majorant_term(z, w, k);
  }
  out.norm_value = scale * std::abs(series);
  out.majorant_value = scale * majorant;
  out.tail_bound = scale * tail;
  out.element_count = count;
  out.tail_warning = out.tail_bound > params.tail_tolerance * out.majorant_value;
  return out;
}

}  // namespace detail

KernelEvaluation kernel_norm(const SurfaceModel& model, const OrbitBall& ball, const HalfPlanePoint& z,
                             const HalfPlanePoint& w, const KernelParams& params) {
  const auto terms = detail::truncated_terms(model, ball, z, w, params);
  const std::size_t n = terms.size();
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<CompensatedComplexSum> series(chunks);
  std::vector<CompensatedSum> majorant(chunks);
  const int k = params.k;

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(n, begin + kReductionChunk);
    for (std::size_t i = begin; i < end; ++i) {
      const auto t = detail::kernel_term(terms[i]->element, z, w, k);
      series[c].add(detail::as_complex(t));
      majorant[c].add(t.magnitude);
    }
  }

  CompensatedComplexSum series_total;
  CompensatedSum majorant_total;
  for (std::size_t c = 0; c < chunks; ++c) {
    series_total.add(series[c]);
    majorant_total.add(majorant[c]);
  }
  return detail::finish_evaluation(model, z, w, params, series_total.value(), majorant_total.value(), n);
}

std::vector<HalfPlanePoint> strip_boundary_points(int k, int n_samples) {
  if (n_samples < 8) throw PreconditionError("strip sampling needs at least 8 samples");
  const double y0 = k / kTwoPi;
  const double y_cap = 5.0 * k / kTwoPi;
  int bottom = n_samples / 2;
  if (bottom % 2 == 0) --bottom;  // odd count puts a sample at x = 1/2
  const int side = n_samples - bottom;
  std::vector<HalfPlanePoint> pts;
  pts.reserve(n_samples);
  for (int j = 0; j < bottom; ++j) pts.emplace_back(static_cast<double>(j) / (bottom - 1), y0);
  for (int j = 1; j <= side; ++j) pts.emplace_back(0.0, y0 + j * (y_cap - y0) / side);
  return pts;
}

StripSup diagonal_sup_strip(const SurfaceModel& model, int k, int n_samples, const KernelParams& params,
                            const EnumerationOptions& options) {
  if (model.label != "modular") throw PreconditionError("diagonal_sup_strip is defined for the modular model");
  StripSup out;
  KernelParams p = params;
  p.k = k;
  for (const auto& z : strip_boundary_points(k, n_samples)) {
    const OrbitBall ball = enumerate_ball(model, z, z, p.truncation_radius, options);
    StripSample sample{z, kernel_norm(model, ball, z, z, p)};
    if (out.samples.empty() || sample.evaluation.norm_value > out.norm_sup) {
      out.norm_sup = sample.evaluation.norm_value;
      out.norm_argmax = z;
    }
    out.majorant_sup = std::max(out.majorant_sup, sample.evaluation.majorant_value);
    out.samples.push_back(sample);
  }
  return out;
}

}  // namespace bergman
