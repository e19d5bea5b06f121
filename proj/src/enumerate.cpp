#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "bergman/errors.hpp"
#include "bergman/fuchsian.hpp"

namespace bergman {

namespace {

bool same_element(const MoebiusElement& g, const MoebiusElement& h) {
  const double tol = 1e-9 * std::max(1.0, std::max(g.max_abs_entry(), h.max_abs_entry()));
  const double minus = std::abs(g.a() - h.a()) + std::abs(g.b() - h.b()) + std::abs(g.c() - h.c()) +
                       std::abs(g.d() - h.d());
  // c ~ 0 can flip the normalized sign, so compare against -h as well
  const double plus = std::abs(g.a() + h.a()) + std::abs(g.b() + h.b()) + std::abs(g.c() + h.c()) +
                      std::abs(g.d() + h.d());
  return std::min(minus, plus) <= tol;
}

bool ball_order(const BallElement& l, const BallElement& r) {
  if (l.displacement != r.displacement) return l.displacement < r.displacement;
  const auto& g = l.element;
  const auto& h = r.element;
  if (g.a() != h.a()) return g.a() < h.a();
  if (g.b() != h.b()) return g.b() < h.b();
  if (g.c() != h.c()) return g.c() < h.c();
  return g.d() < h.d();
}

// Buckets group elements by the image of a fixed generic point, so elements
// that agree up to rounding land in the same or a neighbouring cell no matter
// how close their entries sit to a rounding boundary. The point is not fixed
// by any elliptic element of PSL(2,Z).
class ElementIndex {
 public:
  explicit ElementIndex(const std::vector<BallElement>& storage) : storage_(storage) {}

  bool contains(const MoebiusElement& g) const {
    const auto [cy, x] = coordinates(g);
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      const std::int64_t row = cy + dy;
      const std::int64_t cx = column(x, row);
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        auto [lo, hi] = cells_.equal_range(key(row, cx + dx));
        for (auto it = lo; it != hi; ++it) {
          if (same_element(storage_[it->second].element, g)) return true;
        }
      }
    }
    return false;
  }

  void insert(const MoebiusElement& g, std::uint32_t index) {
    const auto [cy, x] = coordinates(g);
    cells_.emplace(key(cy, column(x, cy)), index);
  }

 private:
  static constexpr double kCell = 0.05;

  static std::pair<std::int64_t, double> coordinates(const MoebiusElement& g) {
    static const HalfPlanePoint probe(0.31415926535, 1.27182818284);
    const auto p = mobius_apply(g, probe);
    return {static_cast<std::int64_t>(std::floor(std::log(p.y()) / kCell)), p.x()};
  }
  static std::int64_t column(double x, std::int64_t row) {
    const double width = kCell * std::exp(static_cast<double>(row) * kCell);
    return static_cast<std::int64_t>(std::clamp(std::floor(x / width), -4.0e18, 4.0e18));
  }
  static std::uint64_t key(std::int64_t row, std::int64_t col) {
    std::uint64_t h = static_cast<std::uint64_t>(row) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(col) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return h;
  }

  const std::vector<BallElement>& storage_;
  std::unordered_multimap<std::uint64_t, std::uint32_t> cells_;
};

OrbitBall make_ball(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w, double radius) {
  if (!(radius >= 0.0)) throw PreconditionError("ball radius must be nonnegative");
  OrbitBall ball;
  ball.model_label = model.label;
  ball.z = z;
  ball.w = w;
  ball.radius = radius;
  return ball;
}

void finish(const SurfaceModel& model, OrbitBall& ball, std::vector<BallElement> found) {
  std::erase_if(found, [&](const BallElement& e) {
    return e.displacement > ball.radius || model.in_cusp_stabilizer(e.element);
  });
  std::sort(found.begin(), found.end(), ball_order);
  ball.elements = std::move(found);
}

// extended Euclid: returns (p, q) with p*d - q*c = 1 for coprime c > 0, d
std::pair<std::int64_t, std::int64_t> unimodular_completion(std::int64_t c, std::int64_t d) {
  // solve p*d + s*c = 1, then q = -s
  std::int64_t old_r = d, r = c, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - q * r};
    std::tie(old_s, s) = std::pair{s, old_s - q * s};
    std::tie(old_t, t) = std::pair{t, old_t - q * t};
  }
  // old_s*d + old_t*c = old_r = +-1
  if (old_r < 0) {
    old_s = -old_s;
    old_t = -old_t;
  }
  return {old_s, -old_t};
}

WideMatrix widen(const MoebiusElement& g) { return {g.a(), g.b(), g.c(), g.d()}; }

WideMatrix wide_compose(const WideMatrix& g, const WideMatrix& h) {
  WideMatrix m{g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
  const long double s = 1.0L / std::sqrt(m.a * m.d - m.b * m.c);
  m.a *= s;
  m.b *= s;
  m.c *= s;
  m.d *= s;
  return m;
}

MoebiusElement narrow(const WideMatrix& m) {
  return MoebiusElement::from_entries(static_cast<double>(m.a), static_cast<double>(m.b), static_cast<double>(m.c),
                                      static_cast<double>(m.d));
}

}  // namespace

OrbitBall enumerate_ball_words(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                               double radius, const EnumerationOptions& options) {
  OrbitBall ball = make_ball(model, z, w, radius);
  const double d0 = hyp_distance(z, w);
  std::vector<BallElement> nodes{{MoebiusElement::identity(), d0}};
  if (model.kind == ModelKind::elementary_parabolic || model.generators.empty()) {
    // nothing outside the cusp stabilizer
    ball.visited = 1;
    ball.exhaustive = true;
    finish(model, ball, std::move(nodes));
    return ball;
  }

  const HalfPlanePoint anchor = model.word_anchor.value_or(z);
  double reach = 0.0;
  for (const auto& g : model.generators) reach = std::max(reach, hyp_distance(anchor, mobius_apply(g, anchor)));
  const double anchor_w = hyp_distance(anchor, w);
  const double limit = std::max(radius + hyp_distance(z, anchor), anchor_w) + 2.0 * reach;

  std::vector<WideMatrix> gens = model.wide_generators;
  if (gens.empty()) {
    for (const auto& g : model.generators) gens.push_back(widen(g));
  }
  std::vector<WideMatrix> wide{WideMatrix{}};
  ElementIndex index(nodes);
  index.insert(nodes[0].element, 0);
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    const WideMatrix current = wide[head];
    for (const auto& gen : gens) {
      const WideMatrix next_wide = wide_compose(current, gen);
      const MoebiusElement next = narrow(next_wide);
      if (hyp_distance(mobius_apply(next, anchor), w) > limit || index.contains(next)) continue;
      const double disp = hyp_distance(mobius_apply(next, z), w);
      if (nodes.size() >= options.element_cap) throw ResourceError(options.element_cap);
      nodes.push_back({next, disp});
      wide.push_back(next_wide);
      index.insert(next, static_cast<std::uint32_t>(nodes.size() - 1));
    }
  }
  ball.visited = nodes.size();
  ball.exhaustive = anchor_w <= limit;
  finish(model, ball, std::move(nodes));
  return ball;
}

OrbitBall enumerate_ball_integral(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                                  double radius, const EnumerationOptions& options) {
  if (model.enumeration != Enumeration::integral) {
    throw PreconditionError("model '" + model.label + "' has no integral enumeration");
  }
  OrbitBall ball = make_ball(model, z, w, radius);
  const int level = model.congruence_level;
  const double x = z.x(), y = z.y(), u = w.x(), v = w.y();
  // d(gz, w) <= R forces e^{-R} <= Im(gz)/v <= e^{R}, i.e. |cz + d|^2 <= y e^R / v
  const double cap_j = y * std::exp(radius) / v * (1.0 + 1e-12);
  const double cosh2 = std::pow(std::cosh(0.5 * radius), 2) * (1.0 + 1e-12);

  std::vector<BallElement> found;
  std::size_t visited = 0;
  // c >= 1 throughout: the cusp stabilizer is never part of the ball
  const auto c_max = static_cast<std::int64_t>(std::floor(std::sqrt(cap_j) / y));
  for (std::int64_t c = 1; c <= c_max; ++c) {
    if (level == 2 && c % 2 != 0) continue;
    const double cd = static_cast<double>(c);
    const double room = cap_j - cd * cd * y * y;
    if (room < 0.0) continue;
    const double s = std::sqrt(room);
    const auto d_lo = static_cast<std::int64_t>(std::floor(-cd * x - s)) - 1;
    const auto d_hi = static_cast<std::int64_t>(std::ceil(-cd * x + s)) + 1;
    for (std::int64_t d = d_lo; d <= d_hi; ++d) {
      if (std::gcd(c, d) != 1) continue;
      if (level == 2 && d % 2 == 0) continue;
      const auto [a0, b0] = unimodular_completion(c, d);
      const auto g0 = MoebiusElement::from_entries(static_cast<double>(a0), static_cast<double>(b0), cd,
                                                   static_cast<double>(d));
      const HalfPlanePoint p0 = mobius_apply(g0, z);
      const double eta = p0.y();
      const double width2 = 4.0 * eta * v * cosh2 - (eta + v) * (eta + v);
      if (width2 < 0.0) continue;
      const double half = std::sqrt(width2);
      const auto n_lo = static_cast<std::int64_t>(std::floor(u - p0.x() - half)) - 1;
      const auto n_hi = static_cast<std::int64_t>(std::ceil(u - p0.x() + half)) + 1;
      for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        const std::int64_t a = a0 + n * c;
        const std::int64_t b = b0 + n * d;
        if (level == 2 && (b % 2 != 0)) continue;
        ++visited;
        const auto g = MoebiusElement::from_entries(static_cast<double>(a), static_cast<double>(b), cd,
                                                    static_cast<double>(d));
        const double disp = hyp_distance(mobius_apply(g, z), w);
        if (disp > radius) continue;
        if (found.size() >= options.element_cap) throw ResourceError(options.element_cap);
        found.push_back({g, disp});
      }
    }
  }
  ball.visited = visited;
  ball.exhaustive = true;
  finish(model, ball, std::move(found));
  return ball;
}

}  // namespace bergman
