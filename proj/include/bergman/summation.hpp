#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace bergman {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double term) noexcept {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      comp_ += (sum_ - t) + term;
    } else {
      comp_ += (term - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Compensated accumulation of a complex series, real and imaginary parts
/// carried separately.
class CompensatedComplexSum {
 public:
  void add(std::complex<double> term) noexcept {
    re_.add(term.real());
    im_.add(term.imag());
  }
  void add(const CompensatedComplexSum& other) noexcept {
    re_.add(other.re_);
    im_.add(other.im_);
  }
  std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

/// Fixed chunk length for the parallel reductions. The partition never
/// depends on the thread count, so results are bit-identical for any number
/// of OpenMP threads.
inline constexpr std::size_t kReductionChunk = 2048;

}  // namespace bergman
