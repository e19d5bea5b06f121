#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bergman/bounds.hpp"
#include "bergman/errors.hpp"
#include "bergman/fuchsian.hpp"
#include "oracles.hpp"

using namespace bergman;

namespace {
constexpr double kBolzaR = 3.0571423474742;
double scale(int k) { return (2.0 * k - 1.0) / (4.0 * std::numbers::pi); }
}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("regimes") {
    CHECK(classify_regime(0.0, 3.0) == Regime::near);
    CHECK(classify_regime(1.5, 3.0) == Regime::near);
    CHECK(classify_regime(std::nextafter(1.5, 2.0), 3.0) == Regime::mid);
    CHECK(classify_regime(2.99, 3.0) == Regime::mid);
    CHECK_THROWS_AS(classify_regime(3.0, 3.0), PreconditionError);
    CHECK_THROWS_AS(classify_regime(-0.1, 3.0), PreconditionError);
    CHECK(classify_regime(100.0, INFINITY) == Regime::near);
    CHECK(parse_regime(regime_name(Regime::mid)) == Regime::mid);
    CHECK(parse_regime(regime_name(Regime::near)) == Regime::near);
    CHECK_FALSE(parse_regime("far").has_value());
    CHECK(surface_kind(build_surface_model("bolza")) == SurfaceKind::compact);
    CHECK(surface_kind(build_surface_model("modular")) == SurfaceKind::noncompact);
    CHECK(surface_kind(build_surface_model("parabolic")) == SurfaceKind::noncompact);
    CHECK(surface_kind(build_surface_model("trivial")) == SurfaceKind::compact);
  }

  TEST_CASE("constants agree with 50-digit evaluation") {
    for (int k : {3, 4, 6, 9, 12}) {
      for (double r : {0.8, 1.386, 2.2, 3.0571, 4.5}) {
        for (double t : {0.05, 0.25, 0.5, 0.75, 0.95}) {
          const double near = t * r / 2;
          const double mid = r / 2 + t * r / 2;
          CHECK(constant_c2(k, r, near) == doctest::Approx(oracle::c2(k, r, near)).epsilon(1e-12));
          CHECK(constant_c1(k, r, mid) == doctest::Approx(oracle::c1(k, r, mid)).epsilon(1e-12));
          CHECK(constant_c1(k, r, mid) > 0.0);
          CHECK(constant_c2(k, r, near) > 0.0);
        }
      }
    }
  }

  TEST_CASE("constant examples") {
    CHECK(constant_c1(3, 3.05714, 2.3) == doctest::Approx(oracle::c1(3, 3.05714, 2.3)).epsilon(1e-14));
    CHECK(constant_c2(3, 3.05714, 0.0) == doctest::Approx(oracle::c2(3, 3.05714, 0.0)).epsilon(1e-14));
    CHECK_THROWS_AS(constant_c1(3, 3.0, 1.5), PreconditionError);
    CHECK_THROWS_AS(constant_c1(3, 3.0, 3.0), PreconditionError);
    CHECK_THROWS_AS(constant_c2(3, 3.0, 1.6), PreconditionError);
    CHECK_THROWS_AS(constant_c2(2, 3.0, 1.0), PreconditionError);

    // first bracket term ratio between k and k + 1
    for (int k = 3; k < 12; ++k) {
      const double r = kBolzaR, d = 2.3;
      const auto first = [&](int kk) { return scale(kk) / std::pow(std::cosh((r - d) / 2), 2 * kk); };
      CHECK(first(k + 1) / first(k) ==
            doctest::Approx(std::pow(std::cosh((r - d) / 2), -2) * (2 * k + 1) / (2 * k - 1)).epsilon(1e-14));
    }
  }

  TEST_CASE("monotonicity") {
    // c1 needs r/2 < delta < r, so r ranges over (delta, 2 delta)
    for (int k : {3, 5, 12}) {
      for (double d : {0.8, 1.6, 2.3}) {
        double previous = INFINITY;
        for (int j = 1; j < 40; ++j) {
          const double r = d + j * d / 40;
          const double c = constant_c1(k, r, d);
          CHECK(c < previous);
          previous = c;
        }
      }
      for (double r : {1.0, kBolzaR}) {
        const double at0 = constant_c2(k, r, 0.0);
        for (int j = 1; j <= 20; ++j) CHECK(constant_c2(k, r, j * r / 40) <= at0);
      }
    }
    CHECK(constant_c2(3, kBolzaR, 0.7) > 0.0);
    CHECK(constant_c2(4, kBolzaR, 0.7) > 0.0);
  }

  TEST_CASE("infinite radius limits") {
    CHECK(constant_c2(3, INFINITY, 0.0) == doctest::Approx(2 * scale(3)).epsilon(1e-15));
    CHECK(constant_c2(5, INFINITY, 1.0) == doctest::Approx(2 * scale(5) / std::pow(std::cosh(0.5), 10)).epsilon(1e-14));
    CHECK(std::isfinite(constant_c2(3, 1e300, 0.0)));
  }

  TEST_CASE("noncompact extra") {
    for (int k : {3, 4, 7, 12}) {
      for (double y : {0.5, 1.0, 2.0, 9.5}) {
        const double g = std::exp(std::lgamma(k - 0.5) - std::lgamma(k));
        const double simple = scale(k) / std::pow(std::cosh(0.35), 2 * k) + 2 * y * (2 * k - 1) * g / (2 * std::sqrt(std::numbers::pi));
        CHECK(noncompact_extra(k, 0.7, y, y) == doctest::Approx(simple).epsilon(1e-14));
      }
    }
    CHECK(std::tgamma(2.5) / std::tgamma(3.0) == doctest::Approx(3 * std::sqrt(std::numbers::pi) / 8).epsilon(1e-15));
    CHECK(noncompact_extra(3, 0.0, 1.0, 1.0) == doctest::Approx(oracle::noncompact_extra(3, 0.0, 1.0, 1.0)).epsilon(1e-14));
    CHECK(noncompact_extra(3, 0.0, 1.0, 1.0) ==
          doctest::Approx(5 / (4 * std::numbers::pi) + 2.0 * 5 * (3 * std::sqrt(std::numbers::pi) / 8) / (2 * std::sqrt(std::numbers::pi))));
    for (double y : {0.3, 2.0, 10.0}) {
      for (double v : {0.7, 5.0}) {
        CHECK(noncompact_extra(6, 1.1, y, v) == doctest::Approx(oracle::noncompact_extra(6, 1.1, y, v)).epsilon(1e-12));
      }
    }
    // large k: log-space evaluation, no overflow
    CHECK(noncompact_extra(60, 0.5, 3.0, 7.0) == doctest::Approx(oracle::noncompact_extra(60, 0.5, 3.0, 7.0)).epsilon(1e-12));
    CHECK(std::isfinite(noncompact_extra(400, 0.5, 3.0, 7.0)));
  }

  TEST_CASE("theorem bound dispatch") {
    BoundInput in;
    in.k = 3;
    in.injectivity_radius = kBolzaR;
    in.delta = 2.0;
    in.regime = Regime::mid;
    CHECK(theorem_bound(in) == constant_c1(3, kBolzaR, 2.0));
    in.regime = Regime::near;
    CHECK_THROWS_AS(theorem_bound(in), PreconditionError);
    in.delta = 0.0;
    CHECK(theorem_bound(in) == constant_c2(3, kBolzaR, 0.0));
    in.kind = SurfaceKind::noncompact;
    in.y = in.v = 2.0;
    CHECK(theorem_bound(in) == doctest::Approx(constant_c2(3, kBolzaR, 0.0) + noncompact_extra(3, 0.0, 2.0, 2.0)));
    CHECK(theorem_bound(in) > constant_c2(3, kBolzaR, 0.0));
    in.delta = 2.0;
    in.regime = Regime::mid;
    CHECK(theorem_bound(in) == doctest::Approx(constant_c1(3, kBolzaR, 2.0) + noncompact_extra(3, 2.0, 2.0, 2.0)));

    const auto report = check_bound(in, 0.1, 0.01);
    CHECK(report.measured_value == doctest::Approx(0.11));
    CHECK(report.margin == doctest::Approx(report.bound_value - 0.11));
    CHECK(report.passed);
    const auto failing = check_bound(in, 1e6, 0.0);
    CHECK_FALSE(failing.passed);
    CHECK(failing.margin < 0.0);
  }

  TEST_CASE("envelopes") {
    CHECK(envelope(5, 0.0, 3.0, Envelope::remark_near) == 5.0);
    CHECK(envelope(5, 3.0, 3.0, Envelope::remark_mid) == 5.0);
    CHECK(envelope(5, std::nextafter(3.0, 0.0), 3.0, Envelope::remark_mid) == doctest::Approx(5.0));
    CHECK(envelope(4, 1.0, 3.0, Envelope::diag_noncompact) == 8.0);
    CHECK(envelope(7, 1.0, 3.0, Envelope::diag_compact) == 7.0);
    CHECK(envelope(4, 5.0, 3.0, Envelope::prior_am1) == doctest::Approx(4.0 / std::pow(std::cosh(1.0), 4)));
    CHECK(envelope_name(Envelope::remark_mid) == "remark-mid");
  }
}
