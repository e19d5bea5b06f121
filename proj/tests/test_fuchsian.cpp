#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include "bergman/errors.hpp"
#include "bergman/fuchsian.hpp"

using namespace bergman;

namespace {

using IntMatrix = std::array<std::int64_t, 4>;

IntMatrix normalized(IntMatrix m) {
  if (m[2] < 0 || (m[2] == 0 && m[0] < 0)) {
    for (auto& e : m) e = -e;
  }
  return m;
}

IntMatrix multiply(const IntMatrix& g, const IntMatrix& h) {
  return normalized({g[0] * h[0] + g[1] * h[2], g[0] * h[1] + g[1] * h[3], g[2] * h[0] + g[3] * h[2],
                     g[2] * h[1] + g[3] * h[3]});
}

double displacement(const IntMatrix& g, const HalfPlanePoint& z, const HalfPlanePoint& w) {
  const auto e = MoebiusElement::from_entries(static_cast<double>(g[0]), static_cast<double>(g[1]),
                                              static_cast<double>(g[2]), static_cast<double>(g[3]));
  return hyp_distance(mobius_apply(e, z), w);
}

// Every PSL(2,Z) element reachable by a word of length <= max_len in T, T^-1, S
// with d(gz, w) <= radius and c != 0, exact in 64-bit integers.
std::set<IntMatrix> brute_force_ball(const HalfPlanePoint& z, const HalfPlanePoint& w, double radius, int max_len) {
  const std::array<IntMatrix, 3> gens{IntMatrix{1, 1, 0, 1}, IntMatrix{1, -1, 0, 1}, IntMatrix{0, -1, 1, 0}};
  std::set<IntMatrix> seen{IntMatrix{1, 0, 0, 1}};
  std::vector<IntMatrix> layer{IntMatrix{1, 0, 0, 1}};
  for (int len = 0; len < max_len; ++len) {
    std::vector<IntMatrix> next;
    for (const auto& g : layer) {
      for (const auto& s : gens) {
        const auto h = multiply(g, s);
        if (seen.insert(h).second) next.push_back(h);
      }
    }
    layer = std::move(next);
  }
  std::set<IntMatrix> ball;
  for (const auto& g : seen) {
    if (g[2] != 0 && displacement(g, z, w) <= radius) ball.insert(g);
  }
  return ball;
}

std::set<IntMatrix> as_integers(const OrbitBall& ball) {
  std::set<IntMatrix> out;
  for (const auto& e : ball.elements) {
    out.insert({std::llround(e.element.a()), std::llround(e.element.b()), std::llround(e.element.c()),
                std::llround(e.element.d())});
  }
  return out;
}

// up to sign: a c entry that should vanish can come out as +-1e-17
bool contains(const OrbitBall& ball, const MoebiusElement& g) {
  const auto close = [](const MoebiusElement& e, const MoebiusElement& g, double s) {
    const double tol = 1e-9 * std::max(1.0, g.max_abs_entry());
    return std::abs(e.a() - s * g.a()) < tol && std::abs(e.b() - s * g.b()) < tol &&
           std::abs(e.c() - s * g.c()) < tol && std::abs(e.d() - s * g.d()) < tol;
  };
  return std::any_of(ball.elements.begin(), ball.elements.end(), [&](const BallElement& e) {
    return close(e.element, g, 1.0) || close(e.element, g, -1.0);
  });
}

}  // namespace

TEST_SUITE("fuchsian") {
  TEST_CASE("model construction") {
    CHECK(build_surface_model("trivial").generators.empty());
    CHECK(std::isinf(build_surface_model("trivial").injectivity_radius));
    const auto modular = build_surface_model("modular");
    const auto has = [&](double a, double b, double c, double d) {
      const auto g = MoebiusElement::from_entries(a, b, c, d);
      return std::find(modular.generators.begin(), modular.generators.end(), g) != modular.generators.end();
    };
    CHECK(has(1, 1, 0, 1));
    CHECK(has(0, -1, 1, 0));
    CHECK(modular.cusp_width == 1.0);
    CHECK(modular.injectivity_radius == doctest::Approx(std::log(4.0)).epsilon(1e-15));
    const auto bolza = build_surface_model("bolza");
    CHECK(bolza.generators.size() == 8);
    CHECK(bolza.injectivity_radius == doctest::Approx(3.05714).epsilon(1e-5));
    CHECK(bolza_systole() == doctest::Approx(2.0 * std::acosh(1.0 + std::sqrt(2.0))).epsilon(1e-15));
    CHECK_THROWS_AS(build_surface_model("hexagon"), ConfigError);
  }

  TEST_CASE("bolza generators are hyperbolic with the systole as translation length") {
    const auto gens = bolza_generators();
    for (const auto& g : gens) {
      CHECK(std::abs(g.determinant() - 1.0) < 1e-14);
      // |trace| = 2 cosh(l/2)
      CHECK(std::abs(g.a() + g.d()) == doctest::Approx(2.0 * std::cosh(bolza_systole() / 2)).epsilon(1e-14));
      const bool inverse_listed = std::any_of(gens.begin(), gens.end(), [&](const MoebiusElement& h) {
        const auto p = mobius_compose(g, h);
        return std::abs(p.b()) < 1e-12 && std::abs(p.c()) < 1e-12;
      });
      CHECK(inverse_listed);
    }
  }

  TEST_CASE("ball examples") {
    const HalfPlanePoint i(0.0, 1.0), two_i(0.0, 2.0);
    const auto trivial = enumerate_ball(build_surface_model("trivial"), i, i, 10.0);
    REQUIRE(trivial.elements.size() == 1);
    CHECK(trivial.elements[0].element == MoebiusElement::identity());
    CHECK(trivial.elements[0].displacement == 0.0);
    CHECK(trivial.exhaustive);

    const auto modular = build_surface_model("modular");
    // the identity lies in the cusp stabilizer, which the ball leaves out
    CHECK(enumerate_ball(modular, two_i, two_i, 0.1).elements.empty());
    const auto at_i = enumerate_ball(modular, i, i, 0.01);
    REQUIRE(at_i.elements.size() == 1);
    CHECK(at_i.elements[0].element == MoebiusElement::from_entries(0, -1, 1, 0));
    CHECK(at_i.elements[0].displacement < 1e-15);
    CHECK_THROWS_AS(enumerate_ball(modular, i, i, -1.0), PreconditionError);
  }

  TEST_CASE("ball invariants") {
    const auto model = build_surface_model("bolza");
    const HalfPlanePoint z(0.05, 1.1), w(-0.1, 0.9);
    const auto ball = enumerate_ball(model, z, w, 6.0);
    CHECK(ball.exhaustive);
    CHECK(std::is_sorted(ball.elements.begin(), ball.elements.end(),
                         [](const BallElement& a, const BallElement& b) { return a.displacement < b.displacement; }));
    for (std::size_t j = 0; j < ball.elements.size(); ++j) {
      const auto& e = ball.elements[j];
      CHECK(e.displacement <= 6.0 + 1e-9);
      CHECK(e.displacement == doctest::Approx(hyp_distance(mobius_apply(e.element, z), w)).epsilon(1e-12));
    }
    // distinct orbit points
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : ball.elements) {
      const auto p = mobius_apply(e.element, z);
      pts.emplace_back(p.x(), p.y());
    }
    std::sort(pts.begin(), pts.end());
    for (std::size_t j = 1; j < pts.size(); ++j) {
      CHECK(hyp_distance(HalfPlanePoint(pts[j].first, pts[j].second),
                         HalfPlanePoint(pts[j - 1].first, pts[j - 1].second)) > 1e-6);
    }
  }

  TEST_CASE("element cap") {
    const auto model = build_surface_model("bolza");
    EnumerationOptions options;
    options.element_cap = 100;
    try {
      enumerate_ball(model, HalfPlanePoint(0, 1), HalfPlanePoint(0, 1), 8.0, options);
      FAIL("expected ResourceError");
    } catch (const ResourceError& e) {
      CHECK(e.cap() == 100);
      CHECK(std::string(e.what()).find("100") != std::string::npos);
    }
  }

  TEST_CASE("modular ball equals the brute-force word search") {
    const auto model = build_surface_model("modular");
    const std::vector<std::tuple<HalfPlanePoint, HalfPlanePoint, double>> cases{
        {HalfPlanePoint(0.0, 2.0), HalfPlanePoint(0.0, 2.0), 4.0},
        {HalfPlanePoint(0.1, 2.3), HalfPlanePoint(0.2, 3.0), 4.0},
        {HalfPlanePoint(-0.4, 1.0), HalfPlanePoint(0.3, 1.5), 3.5},
        {HalfPlanePoint(0.0, 1.0), HalfPlanePoint(0.0, 1.0), 3.0},
    };
    for (const auto& [z, w, radius] : cases) {
      const auto expected = brute_force_ball(z, w, radius, 14);
      CHECK(as_integers(enumerate_ball_integral(model, z, w, radius)) == expected);
      CHECK(as_integers(enumerate_ball_words(model, z, w, radius)) == expected);
    }
  }

  TEST_CASE("congruence subgroup") {
    CHECK_FALSE(in_principal_congruence(MoebiusElement::from_entries(1, 1, 0, 1), 2));
    CHECK(in_principal_congruence(MoebiusElement::from_entries(1, 2, 0, 1), 2));
    CHECK(in_principal_congruence(MoebiusElement::from_entries(1, 0, 2, 1), 2));
    CHECK(in_principal_congruence(MoebiusElement::from_entries(-1, 2, 2, -5), 2));
    const auto modular = build_surface_model("modular");
    CHECK_THROWS_AS(congruence_cover(modular, 3), ConfigError);
    CHECK_THROWS_AS(congruence_cover(build_surface_model("bolza"), 2), ConfigError);
    const auto cover = congruence_cover(modular, 2);
    CHECK(cover.cusp_width == 2.0);
    CHECK(cover.injectivity_radius == doctest::Approx(2.0 * std::asinh(1.0)).epsilon(1e-12));

    const HalfPlanePoint z(0.3, 1.2), w(-0.5, 2.0);
    const auto sub = enumerate_ball(cover, z, w, 5.0);
    const auto full = enumerate_ball(modular, z, w, 5.0);
    CHECK(!sub.elements.empty());
    for (const auto& e : sub.elements) {
      CHECK(in_principal_congruence(e.element, 2));
      CHECK(contains(full, e.element));
    }

    const auto samples = cusp_region_samples(2.0, 1.0);
    CHECK(estimate_injectivity_radius(cover, samples) >= estimate_injectivity_radius(modular, samples));
  }

  TEST_CASE("injectivity radius estimates") {
    const auto bolza = build_surface_model("bolza");
    const std::vector<HalfPlanePoint> center{HalfPlanePoint(0.0, 1.0)};
    CHECK(estimate_injectivity_radius(bolza, center) == doctest::Approx(bolza_systole()).epsilon(1e-10));
    CHECK(std::isinf(estimate_injectivity_radius(build_surface_model("trivial"), center)));

    const auto modular = build_surface_model("modular");
    const std::vector<HalfPlanePoint> three{HalfPlanePoint(0.0, 2.0), HalfPlanePoint(0.5, 2.0),
                                            HalfPlanePoint(0.0, std::numbers::e)};
    const double r3 = estimate_injectivity_radius(modular, three);
    CHECK(r3 > 0.0);
    CHECK(std::isfinite(r3));
    // S moves 2i to i/2
    CHECK(r3 == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    CHECK(estimate_injectivity_radius(modular, cusp_region_samples(1.0, 2.0)) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-14));
  }

  TEST_CASE("counting function") {
    const HalfPlanePoint i(0.0, 1.0), two_i(0.0, 2.0);
    CHECK(counting_function(build_surface_model("trivial"), i, i, 1.0) == 1);
    const auto modular = build_surface_model("modular");
    CHECK(counting_function(modular, two_i, two_i, 0.0) == 0);
    CHECK(counting_function(modular, two_i, two_i, std::log(4.0)) == 1);

    const auto ball = enumerate_ball(modular, two_i, two_i, 6.0);
    std::size_t previous = 0;
    for (double rho = 0.0; rho <= 6.0; rho += 0.05) {
      const auto n = counting_function(ball, rho);
      CHECK(n >= previous);
      previous = n;
      if (rho < modular.injectivity_radius) CHECK(n <= counting_bound(rho, modular.injectivity_radius));
    }
    // right-continuous: a sampled displacement is counted at its own value
    for (const auto& e : ball.elements) {
      CHECK(counting_function(ball, e.displacement) >= counting_function(ball, std::nextafter(e.displacement, 0.0)));
      CHECK(counting_function(ball, e.displacement) ==
            static_cast<std::size_t>(std::count_if(ball.elements.begin(), ball.elements.end(), [&](const BallElement& f) {
              return f.displacement <= e.displacement;
            })));
    }
    CHECK_THROWS_AS(counting_function(ball, 6.5), PreconditionError);
    CHECK(counting_bound(1.0, INFINITY) == doctest::Approx(std::exp(1.0)));
    CHECK(counting_bound(1.0, 2.0) == doctest::Approx(std::sinh(3.0) / std::sinh(2.0)));
  }

  TEST_CASE("compact model: at most one element closer than r/2") {
    const auto model = build_surface_model("bolza");
    const double r = model.injectivity_radius;
    for (const auto& [z, w] : std::vector<std::pair<HalfPlanePoint, HalfPlanePoint>>{
             {HalfPlanePoint(0, 1), HalfPlanePoint(0, 1)},
             {HalfPlanePoint(0.1, 1.05), HalfPlanePoint(-0.2, 0.8)},
             {HalfPlanePoint(0.5, 1.3), HalfPlanePoint(0.3, 0.4)},
             {HalfPlanePoint(-0.6, 0.7), HalfPlanePoint(0.6, 0.7)}}) {
      const auto ball = enumerate_ball(model, z, w, r);
      CHECK(counting_function(ball, std::nextafter(r / 2, 0.0)) <= 1);
    }
  }

  TEST_CASE("group closure") {
    const auto model = build_surface_model("bolza");
    const HalfPlanePoint z(0.0, 1.0);
    const double radius = 5.0;
    const auto ball = enumerate_ball(model, z, z, radius);
    const std::size_t n = std::min<std::size_t>(ball.elements.size(), 120);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const auto g = mobius_compose(ball.elements[a].element, ball.elements[b].element);
        const double d = hyp_distance(mobius_apply(g, z), z);
        if (d <= radius - 1e-9) CHECK(contains(ball, g));
      }
    }
    const auto modular = build_surface_model("modular");
    const HalfPlanePoint m(0.1, 1.7);
    const auto mball = enumerate_ball(modular, m, m, 4.0);
    for (const auto& e : mball.elements) {
      for (const auto& f : mball.elements) {
        const auto g = mobius_compose(e.element, f.element);
        if (modular.in_cusp_stabilizer(g)) continue;
        if (hyp_distance(mobius_apply(g, m), m) <= 4.0 - 1e-9) CHECK(contains(mball, g));
      }
    }
  }

  TEST_CASE("counting inequality margins") {
    const auto trivial = build_surface_model("trivial");
    const HalfPlanePoint i(0.0, 1.0), two_i(0.0, 2.0);
    const auto tball = enumerate_ball(trivial, i, i, 4.0);
    const auto t = counting_inequality_margin(trivial, tball, 1.0, 3);
    CHECK(t.lhs == 1.0);
    CHECK(t.slack >= 0.0);

    const auto modular = build_surface_model("modular");
    const auto mball = enumerate_ball(modular, two_i, two_i, 10.0);
    const auto m = counting_inequality_margin(modular, mball, modular.injectivity_radius, 3);
    CHECK(m.slack >= 0.0);
    CHECK(m.lhs > 0.0);
    CHECK_THROWS_AS(counting_inequality_margin(modular, mball, modular.injectivity_radius / 2, 3), PreconditionError);

    const auto bolza = build_surface_model("bolza");
    const auto bball = enumerate_ball(bolza, i, i, 8.0);
    const auto b = counting_inequality_margin(bolza, bball, 0.9 * bolza.injectivity_radius, 4);
    CHECK(b.slack >= 0.0);
    CHECK(b.lhs_remainder >= 0.0);
  }

  TEST_CASE("ball cache round trip") {
    const auto model = build_surface_model("modular");
    const HalfPlanePoint z(0.1, 2.3), w(0.2, 3.0);
    const auto ball = enumerate_ball(model, z, w, 5.0);
    std::stringstream ss;
    write_ball(ss, ball);
    const auto back = read_ball(ss);
    CHECK(back.elements == ball.elements);
    CHECK(back.radius == ball.radius);
    CHECK(back.exhaustive);

    const auto dir = std::filesystem::temp_directory_path() / "bergman-unit-cache";
    std::filesystem::remove_all(dir);
    const BallCache cache(dir.string());
    const auto first = cache.get_or_enumerate(model, z, w, 5.0);
    CHECK(std::filesystem::exists(cache.path_for(model.label, z, w, 5.0)));
    const auto second = cache.get_or_enumerate(model, z, w, 5.0);
    CHECK(first.elements == ball.elements);
    CHECK(second.elements == ball.elements);
    // a damaged entry is rebuilt
    { std::ofstream(cache.path_for(model.label, z, w, 5.0)) << "garbage\n"; }
    CHECK(cache.get_or_enumerate(model, z, w, 5.0).elements == ball.elements);
    std::filesystem::remove_all(dir);

    std::stringstream bad("# bergman-ball-1 modular 0 1 0 1 2 1\n");
    CHECK_THROWS_AS(read_ball(bad), ConfigError);
  }
}
