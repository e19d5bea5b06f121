#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "bergman/errors.hpp"
#include "bergman/fuchsian.hpp"

namespace bergman {

namespace {

// bumped whenever the meaning of a stored ball changes
constexpr const char* kFormatTag = "bergman-ball-2";

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string header_line(const std::string& label, const HalfPlanePoint& z, const HalfPlanePoint& w, double radius) {
  return std::string("# ") + kFormatTag + " " + label + " " + fmt17(z.x()) + " " + fmt17(z.y()) + " " + fmt17(w.x()) + " " + fmt17(w.y()) + " " +
         fmt17(radius);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void write_ball(std::ostream& os, const OrbitBall& ball) {
  os << header_line(ball.model_label, ball.z, ball.w, ball.radius) << ' ' << (ball.exhaustive ? 1 : 0) << '\n';
  for (const auto& e : ball.elements) {
    const auto& g = e.element;
    os << fmt17(g.a()) << ' ' << fmt17(g.b()) << ' ' << fmt17(g.c()) << ' ' << fmt17(g.d()) << ' '
       << fmt17(e.displacement) << '\n';
  }
}

OrbitBall read_ball(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw ConfigError("ball file: missing header line");
  std::istringstream hs(line.substr(2));
  OrbitBall ball;
  std::string tag;
  double zx, zy, wx, wy;
  int exhaustive = 0;
  if (!(hs >> tag) || tag != kFormatTag) throw ConfigError("ball file: unknown format '" + tag + "'");
  if (!(hs >> ball.model_label >> zx >> zy >> wx >> wy >> ball.radius >> exhaustive)) {
    throw ConfigError("ball file: malformed header '" + line + "'");
  }
  ball.z = HalfPlanePoint(zx, zy);
  ball.w = HalfPlanePoint(wx, wy);
  ball.exhaustive = exhaustive != 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double a, b, c, d, disp;
    if (!(ls >> a >> b >> c >> d >> disp)) throw ConfigError("ball file: malformed element line '" + line + "'");
    ball.elements.push_back({MoebiusElement::from_stored(a, b, c, d), disp});
  }
  ball.visited = ball.elements.size();
  return ball;
}

std::string BallCache::path_for(const std::string& label, const HalfPlanePoint& z, const HalfPlanePoint& w,
                                double radius) const {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(header_line(label, z, w, radius))));
  return (std::filesystem::path(directory_) / (label + "-" + hex + ".ball")).string();
}

OrbitBall BallCache::get_or_enumerate(const SurfaceModel& model, const HalfPlanePoint& z, const HalfPlanePoint& w,
                                      double radius, const EnumerationOptions& options) const {
  if (!enabled()) return enumerate_ball(model, z, w, radius, options);
  const std::string path = path_for(model.label, z, w, radius);
  if (std::ifstream in(path); in) {
    try {
      OrbitBall cached = read_ball(in);
      if (cached.model_label == model.label && cached.z == z && cached.w == w && cached.radius == radius &&
          cached.exhaustive) {
        return cached;
      }
    } catch (const ConfigError&) {
      // stale or damaged entry: enumerate again and overwrite it
    }
  }
  OrbitBall ball = enumerate_ball(model, z, w, radius, options);
  std::filesystem::create_directories(directory_);
  // write-then-rename so concurrent readers never see a partial file
  const std::string tmp = path + ".tmp" + std::to_string(fnv1a(path + std::to_string(ball.elements.size())));
  {
    std::ofstream out(tmp);
    write_ball(out, ball);
  }
  std::filesystem::rename(tmp, path);
  return ball;
}

}  // namespace bergman
