#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bergman/hypgeo.hpp"

namespace bergman {

/// Matrix entries at extended precision. Word enumeration composes in this
/// precision: long words of large matrices cancel back to small ones, and
/// double rounding there is enough to split one group element into several.
struct WideMatrix {
  long double a = 1.0L, b = 0.0L, c = 0.0L, d = 1.0L;
};

enum class ModelKind { compact, noncompact, elementary_trivial, elementary_parabolic };

/// How enumerate_ball visits group elements.
enum class Enumeration {
  words,     ///< breadth-first search over generator words
  integral,  ///< direct sweep over integer matrices (PSL(2,Z) and its congruence subgroups)
};

/// A concrete Fuchsian group acting on the upper half-plane.
///
/// For models with a cusp the cusp sits at i*infinity and its stabilizer is
/// generated by z -> z + cusp_width; elements of that stabilizer are exactly
/// the elements with c == 0.
struct SurfaceModel {
  std::string label;
  ModelKind kind = ModelKind::elementary_trivial;
  std::vector<MoebiusElement> generators;  ///< closed under inverses
  /// The same generators at extended precision; empty means "promote generators".
  std::vector<WideMatrix> wide_generators;
  double cusp_width = 0.0;
  /// Infimum of d(z, gz) over non-identity g outside the cusp stabilizer;
  /// +infinity when that set is empty.
  double injectivity_radius = std::numeric_limits<double>::infinity();
  Enumeration enumeration = Enumeration::words;
  /// Point the word search prunes at (the centre of a fundamental polygon).
  /// Without one the search prunes at the ball's own z, whose generator
  /// displacements, and with them the pruning margin, grow away from the centre.
  std::optional<HalfPlanePoint> word_anchor;
  int congruence_level = 1;  ///< integral models: keep only g == Id (mod level)

  bool has_cusp() const noexcept {
    return kind == ModelKind::noncompact || kind == ModelKind::elementary_parabolic;
  }
  bool in_cusp_stabilizer(const MoebiusElement& g) const noexcept { return has_cusp() && g.c() == 0.0; }
};

/// Model selectors: "trivial", "parabolic", "modular", "bolza", "gamma2".
/// Throws ConfigError for anything else.
SurfaceModel build_surface_model(std::string_view selector);

/// Half-plane side pairings of the regular octagon centred at i.
std::vector<MoebiusElement> bolza_generators();
std::vector<WideMatrix> bolza_generators_wide();

/// Translation length of the Bolza side pairings, 2*arccosh(1 + sqrt 2).
double bolza_systole();

struct BallElement {
  MoebiusElement element;
  double displacement;  ///< d(g z, w)

  friend bool operator==(const BallElement&, const BallElement&) = default;
};

/// Group elements g with d(gz, w) <= radius, sorted by displacement.
///
/// For models with a cusp the ball holds only elements outside the cusp
/// stabilizer (identity included in the stabilizer); the kernel sums the
/// stabilizer in closed form.
struct OrbitBall {
  std::string model_label;
  HalfPlanePoint z{0.0, 1.0};
  HalfPlanePoint w{0.0, 1.0};
  double radius = 0.0;
  std::vector<BallElement> elements;
  bool exhaustive = false;
  /// Number of elements whose orbit point was computed during the search.
  std::size_t visited = 0;
};

struct EnumerationOptions {
  std::size_t element_cap = 5'000'000;
};

/// Dispatches on model.enumeration. Throws ResourceError past the cap and
/// PreconditionError for a negative radius.
OrbitBall enumerate_ball(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                         double radius, const EnumerationOptions& options = {});

/// Breadth-first search over generator words. With anchor o (model.word_anchor,
/// else z) a word is pruned when d(go, w) > max(radius + d(z, o), d(o, w)) + 2*D,
/// D the largest generator displacement at o. Every ball element satisfies
/// d(go, w) <= radius + d(z, o), so for o = z this is the plain 2*D margin.
OrbitBall enumerate_ball_words(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                               double radius, const EnumerationOptions& options = {});

/// Exhaustive sweep over integer matrices for integral models.
OrbitBall enumerate_ball_integral(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                                  double radius, const EnumerationOptions& options = {});

/// Number of ball elements with displacement <= rho. Requires rho <= ball.radius.
std::size_t counting_function(const OrbitBall& ball, double rho);

std::size_t counting_function(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                              double rho, const EnumerationOptions& options = {});

/// sinh(delta + r)/sinh(r); tends to e^delta as r -> infinity.
double counting_bound(double delta, double injectivity_radius);

/// Minimum of d(z, gz) over the samples and non-identity g outside the cusp
/// stabilizer. An upper bound on the injectivity radius; +infinity for the
/// elementary models.
double estimate_injectivity_radius(const SurfaceModel& model, std::span<const HalfPlanePoint> samples,
                                   const EnumerationOptions& options = {});

/// Sample set for the part {y >= height} of a cusp of width h: the row
/// {j*h/32 + i*height : j = 0..32} and (e/2)*height*i. The modular model pins
/// its radius on height 2, the level-2 cover estimates on height 1.
std::vector<HalfPlanePoint> cusp_region_samples(double cusp_width, double height);

/// g == Id modulo `level` in PSL(2,Z). Only level 2 is supported.
bool in_principal_congruence(const MoebiusElement& g, int level);

/// Principal congruence subgroup of the modular model. Only level 2. Its
/// radius is estimated on cusp_region_samples(2, 1).
SurfaceModel congruence_cover(const SurfaceModel& modular, int level);

/// A positive decreasing weight f together with a bound on sum_{d(gz,w) > R} f
/// for the elements a ball of radius R leaves out.
struct DecreasingWeight {
  std::function<double(double)> value;
  std::function<double(double radius)> remainder;
};

/// f(rho) = cosh^{-2k}(rho/2) with the kernel tail bound as remainder.
DecreasingWeight cosh_power_weight(int k, double injectivity_radius);

struct CountingMargin {
  double lhs;            ///< sum of f over the ball
  double lhs_remainder;  ///< bound on the part of the sum beyond the ball radius
  double rhs;            ///< right-hand side of the counting inequality
  double slack;          ///< rhs - lhs - lhs_remainder, formed without cancelling the shared head
};

/// Both sides of
///   int f dN <= int_0^delta f dN + f(delta) 2cosh(r/4)sinh(delta)/sinh(r/4)
///              + 1/(2 sinh^2(r/4)) int_delta^inf f(rho) sinh(rho + r/2) drho
/// with the Stieltjes integrals taken over the ball. Throws PreconditionError
/// when delta <= r/2 or the ball is not exhaustive.
CountingMargin counting_inequality_margin(const SurfaceModel& model, const OrbitBall& ball, double delta,
                                          const DecreasingWeight& f);

CountingMargin counting_inequality_margin(const SurfaceModel& model, const OrbitBall& ball, double delta, int k);

// ---- ball cache -------------------------------------------------------------

/// Header: "# bergman-ball-2 <label> <zx> <zy> <wx> <wy> <radius> <exhaustive>", then one
/// "a b c d displacement" line per element, all at 17 significant digits.
void write_ball(std::ostream& os, const OrbitBall& ball);
OrbitBall read_ball(std::istream& is);

/// Directory-backed cache keyed on (label, z, w, radius). An empty directory
/// path disables caching. Unreadable entries are re-enumerated.
class BallCache {
 public:
  explicit BallCache(std::string directory = {}) : directory_(std::move(directory)) {}

  bool enabled() const noexcept { return !directory_.empty(); }
  OrbitBall get_or_enumerate(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                             double radius, const EnumerationOptions& options = {}) const;
  std::string path_for(const std::string& label, const HalfPlanePoint& z, const HalfPlanePoint& w,
                       double radius) const;

 private:
  std::string directory_;
};

}  // namespace bergman
