#include "bergman/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

constexpr int kMaxRedraws = 100000;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("'" + std::string(key) + "': cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("'" + std::string(key) + "': cannot parse '" + std::string(text) + "' as an integer");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("'" + std::string(key) + "': expected true or false");
}

// "3,4,6" or "3..12"
std::vector<int> parse_weights(std::string_view key, std::string_view text) {
  std::vector<int> out;
  for (auto part : split(text, ',')) {
    if (part.empty()) continue;
    if (const auto dots = part.find(".."); dots != std::string_view::npos) {
      const int lo = parse_int<int>(key, part.substr(0, dots));
      const int hi = parse_int<int>(key, part.substr(dots + 2));
      if (hi < lo) throw ConfigError("'" + std::string(key) + "': empty range");
      for (int k = lo; k <= hi; ++k) out.push_back(k);
    } else {
      out.push_back(parse_int<int>(key, part));
    }
  }
  for (int k : out) {
    if (k < 3) throw ConfigError("'" + std::string(key) + "': weights must be >= 3");
  }
  return out;
}

std::vector<double> parse_doubles(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    if (!part.empty()) out.push_back(parse_double(key, part));
  }
  return out;
}

// "x y; x y; ..."
std::vector<HalfPlanePoint> parse_points(std::string_view key, std::string_view text) {
  std::vector<HalfPlanePoint> out;
  for (auto part : split(text, ';')) {
    if (part.empty()) continue;
    std::istringstream is{std::string(part)};
    std::string xs, ys, extra;
    if (!(is >> xs >> ys) || (is >> extra)) {
      throw ConfigError("'" + std::string(key) + "': expected 'x y' pairs separated by ';'");
    }
    const double y = parse_double(key, ys);
    if (!(y > 0.0)) throw ConfigError("'" + std::string(key) + "': points need y > 0");
    out.emplace_back(parse_double(key, xs), y);
  }
  return out;
}

std::string fmt(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string sanitize(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

double uniform_angle(std::mt19937_64& rng) {
  return 2.0 * std::numbers::pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool inside_window(const HalfPlanePoint& w, const SamplingPlan& plan) {
  return w.y() >= plan.min_height && w.y() <= plan.max_height && w.x() >= plan.min_x && w.x() <= plan.max_x;
}

std::vector<double> delta_targets(const SamplingPlan& plan, double r) {
  if (!plan.deltas.empty()) return plan.deltas;
  if (!std::isfinite(r)) throw ConfigError("a model with infinite r_X needs an explicit 'deltas' list");
  std::vector<double> out;
  const int n = plan.near_count;
  // [0, r/2): the recomputed distance of the last target stays below r/2
  for (int j = 0; j < n; ++j) out.push_back(j * (0.5 * r) / n);
  const int m = plan.mid_count;
  for (int j = 0; j < m; ++j) out.push_back(0.5 * r + (j + 1) * (0.5 * r) / (m + 1));
  return out;
}

SurfaceModel model_for(const SweepConfig& config) { return build_surface_model(config.model); }

std::string metadata_line(const SweepConfig& config, const SurfaceModel& model, std::string_view study) {
  std::ostringstream os;
  os << "study=" << study << " model=" << model.label << " seed=" << config.seed
     << " truncation_radius=" << fmt(config.truncation_radius) << " r_X=" << fmt(model.injectivity_radius)
     << " element_cap=" << config.element_cap;
  return os.str();
}

BallCache cache_for(const SweepConfig& config) { return BallCache(config.use_cache ? config.cache_dir : std::string{}); }

CsvRow base_row(const SurfaceModel& model, int k, const HalfPlanePoint& z, const HalfPlanePoint& w, double delta,
                std::string regime) {
  CsvRow row;
  row.model = model.label;
  row.k = k;
  row.zx = z.x();
  row.zy = z.y();
  row.wx = w.x();
  row.wy = w.y();
  row.delta = delta;
  row.regime = std::move(regime);
  return row;
}

// Runs `body` for every index; failures land in the rows through `on_error`.
// Exceptions never cross the parallel region.
template <class Body, class OnError>
void for_each_parallel(std::size_t n, Body body, OnError on_error) {
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (const ResourceError& e) {
      on_error(static_cast<std::size_t>(i), e.what(), true);
    } catch (const std::exception& e) {
      on_error(static_cast<std::size_t>(i), e.what(), false);
    }
  }
}

ResultSet flatten(std::string metadata, std::vector<std::vector<CsvRow>>& groups) {
  ResultSet out;
  out.metadata = std::move(metadata);
  for (auto& g : groups) {
    for (auto& row : g) {
      if (row.error.find("element cap") != std::string::npos) out.resource_capped = true;
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace

void apply_setting(SweepConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "model") {
    c.model = std::string(value);
  } else if (key == "k") {
    c.ks = parse_weights(key, value);
  } else if (key == "truncation_radius") {
    c.truncation_radius = parse_double(key, value);
  } else if (key == "tail_tolerance") {
    c.tail_tolerance = parse_double(key, value);
  } else if (key == "output") {
    c.output = std::string(value);
  } else if (key == "seed") {
    c.seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "element_cap") {
    c.element_cap = parse_int<std::size_t>(key, value);
  } else if (key == "cache_dir") {
    c.cache_dir = std::string(value);
  } else if (key == "cache") {
    c.use_cache = parse_bool(key, value);
  } else if (key == "base_points") {
    c.plan.base_points = parse_points(key, value);
  } else if (key == "near_count") {
    c.plan.near_count = parse_int<int>(key, value);
  } else if (key == "mid_count") {
    c.plan.mid_count = parse_int<int>(key, value);
  } else if (key == "deltas") {
    c.plan.deltas = parse_doubles(key, value);
  } else if (key == "min_height") {
    c.plan.min_height = parse_double(key, value);
  } else if (key == "max_height") {
    c.plan.max_height = parse_double(key, value);
  } else if (key == "min_x") {
    c.plan.min_x = parse_double(key, value);
  } else if (key == "max_x") {
    c.plan.max_x = parse_double(key, value);
  } else if (key == "diag_points") {
    c.diag_points = parse_points(key, value);
  } else if (key == "diag_k") {
    c.diag_ks = parse_weights(key, value);
  } else if (key == "strip_samples") {
    c.strip_samples = parse_int<int>(key, value);
  } else if (key == "count_deltas") {
    c.count_deltas = parse_doubles(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
  if (c.plan.near_count < 0 || c.plan.mid_count < 0) throw ConfigError("sample counts must be non-negative");
}

SweepConfig parse_config(std::istream& is) {
  SweepConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply_setting(config, trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  return config;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::vector<SampledPair> sample_pairs(const SurfaceModel& model, const SamplingPlan& plan, std::uint64_t seed) {
  if (plan.base_points.empty()) throw ConfigError("sampling plan has no base points");
  const double r = model.injectivity_radius;
  const auto targets = delta_targets(plan, r);
  std::mt19937_64 rng(seed);
  std::vector<SampledPair> out;
  out.reserve(targets.size());
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const double target = targets[j];
    if (!(target >= 0.0) || !(target < r)) {
      throw ConfigError("delta target " + fmt(target) + " is outside [0, r_X = " + fmt(r) + ")");
    }
    const HalfPlanePoint z = plan.base_points[j % plan.base_points.size()];
    std::optional<HalfPlanePoint> w;
    for (int attempt = 0; attempt < kMaxRedraws && !w; ++attempt) {
      const double angle = uniform_angle(rng);
      const HalfPlanePoint candidate = target == 0.0 ? z : point_at_distance(z, target, angle);
      if (inside_window(candidate, plan)) w = candidate;
    }
    if (!w) throw ConfigError("no point at distance " + fmt(target) + " from a base point lies in the window");
    SampledPair pair;
    pair.z = z;
    pair.w = *w;
    pair.delta = hyp_distance(z, *w);
    pair.regime = classify_regime(pair.delta, r);
    out.push_back(pair);
  }
  return out;
}

ResultSet run_sweep(const SweepConfig& config) {
  const SurfaceModel model = model_for(config);
  const auto pairs = sample_pairs(model, config.plan, config.seed);
  const BallCache cache = cache_for(config);
  const EnumerationOptions options{config.element_cap};
  const SurfaceKind kind = surface_kind(model);

  std::vector<std::vector<CsvRow>> groups(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (int k : config.ks) {
      const auto& p = pairs[i];
      groups[i].push_back(base_row(model, k, p.z, p.w, p.delta, std::string(regime_name(p.regime))));
    }
  }

  for_each_parallel(
      pairs.size(),
      [&](std::size_t i) {
        const auto& p = pairs[i];
        const OrbitBall ball = cache.get_or_enumerate(model, p.z, p.w, config.truncation_radius, options);
        for (std::size_t j = 0; j < config.ks.size(); ++j) {
          CsvRow& row = groups[i][j];
          try {
            KernelParams params;
            params.k = config.ks[j];
            params.truncation_radius = config.truncation_radius;
            params.tail_tolerance = config.tail_tolerance;
            const KernelEvaluation e = kernel_norm(model, ball, p.z, p.w, params);
            BoundInput in;
            in.k = params.k;
            in.injectivity_radius = model.injectivity_radius;
            in.delta = p.delta;
            in.y = p.z.y();
            in.v = p.w.y();
            in.kind = kind;
            in.regime = p.regime;
            const BoundReport report = check_bound(in, e.norm_value, e.tail_bound);
            row.measured = e.norm_value;
            row.tail = e.tail_bound;
            row.parabolic = e.parabolic_part;
            row.bound = report.bound_value;
            row.margin = report.margin;
            row.elements = e.element_count;
          } catch (const std::exception& e) {
            row.error = sanitize(e.what());
          }
        }
      },
      [&](std::size_t i, const char* what, bool) {
        for (auto& row : groups[i]) row.error = sanitize(what);
      });

  return flatten(metadata_line(config, model, "sweep"), groups);
}

ResultSet run_diag(const SweepConfig& config) {
  const SurfaceModel model = model_for(config);
  const EnumerationOptions options{config.element_cap};
  const bool strip = model.label == "modular";
  const Envelope which = surface_kind(model) == SurfaceKind::noncompact ? Envelope::diag_noncompact
                                                                         : Envelope::diag_compact;
  std::vector<std::vector<CsvRow>> groups;

  if (strip) {
    groups.resize(config.diag_ks.size());
    for_each_parallel(
        config.diag_ks.size(),
        [&](std::size_t i) {
          const int k = config.diag_ks[i];
          KernelParams params;
          params.k = k;
          params.truncation_radius = config.truncation_radius;
          params.tail_tolerance = config.tail_tolerance;
          const StripSup sup = diagonal_sup_strip(model, k, config.strip_samples, params, options);
          const HalfPlanePoint& z = sup.norm_argmax;
          const double env = envelope(k, 0.0, model.injectivity_radius, which);
          double tail = 0.0;
          std::size_t elements = 0;
          for (const auto& s : sup.samples) {
            tail = std::max(tail, s.evaluation.tail_bound);
            elements = std::max(elements, s.evaluation.element_count);
          }
          CsvRow norm = base_row(model, k, z, z, 0.0, "diag");
          norm.measured = sup.norm_sup;
          norm.tail = tail;
          norm.bound = env;
          norm.margin = std::numeric_limits<double>::quiet_NaN();
          norm.elements = elements;
          CsvRow maj = norm;
          maj.regime = "diag-majorant";
          maj.measured = sup.majorant_sup;
          groups[i] = {norm, maj};
        },
        [&](std::size_t i, const char* what, bool) {
          const HalfPlanePoint i_point(0.0, 1.0);
          CsvRow row = base_row(model, config.diag_ks[i], i_point, i_point, 0.0, "diag");
          row.margin = std::numeric_limits<double>::quiet_NaN();
          row.error = sanitize(what);
          groups[i] = {row};
        });
    return flatten(metadata_line(config, model, "diag"), groups);
  }

  const auto& points = config.diag_points.empty() ? config.plan.base_points : config.diag_points;
  if (points.empty()) throw ConfigError("diag needs diag_points or base_points");
  const BallCache cache = cache_for(config);
  groups.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int k : config.diag_ks) {
      CsvRow row = base_row(model, k, points[i], points[i], 0.0, "diag");
      row.bound = envelope(k, 0.0, model.injectivity_radius, which);
      row.margin = std::numeric_limits<double>::quiet_NaN();
      groups[i].push_back(row);
    }
  }
  for_each_parallel(
      points.size(),
      [&](std::size_t i) {
        const HalfPlanePoint& z = points[i];
        const OrbitBall ball = cache.get_or_enumerate(model, z, z, config.truncation_radius, options);
        for (std::size_t j = 0; j < config.diag_ks.size(); ++j) {
          KernelParams params;
          params.k = config.diag_ks[j];
          params.truncation_radius = config.truncation_radius;
          params.tail_tolerance = config.tail_tolerance;
          const KernelEvaluation e = kernel_norm(model, ball, z, z, params);
          CsvRow& row = groups[i][j];
          row.measured = e.norm_value;
          row.tail = e.tail_bound;
          row.parabolic = e.parabolic_part;
          row.elements = e.element_count;
        }
      },
      [&](std::size_t i, const char* what, bool) {
        for (auto& row : groups[i]) row.error = sanitize(what);
      });
  return flatten(metadata_line(config, model, "diag"), groups);
}

ResultSet run_count(const SweepConfig& config) {
  const SurfaceModel model = model_for(config);
  const auto pairs = sample_pairs(model, config.plan, config.seed);
  const BallCache cache = cache_for(config);
  const EnumerationOptions options{config.element_cap};
  for (double cut : config.count_deltas) {
    if (cut > config.truncation_radius) throw ConfigError("count_deltas must not exceed the truncation radius");
    if (std::isfinite(model.injectivity_radius) && !(cut > 0.5 * model.injectivity_radius)) {
      throw ConfigError("count_deltas must exceed r_X/2 = " + fmt(0.5 * model.injectivity_radius));
    }
  }

  std::vector<std::vector<CsvRow>> groups(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    groups[i].push_back(base_row(model, 0, p.z, p.w, p.delta, "count-n"));
    for (int k : config.ks) {
      for (double cut : config.count_deltas) groups[i].push_back(base_row(model, k, p.z, p.w, cut, "count"));
    }
  }

  for_each_parallel(
      pairs.size(),
      [&](std::size_t i) {
        const auto& p = pairs[i];
        const OrbitBall ball = cache.get_or_enumerate(model, p.z, p.w, config.truncation_radius, options);
        CsvRow& n_row = groups[i][0];
        n_row.measured = static_cast<double>(counting_function(ball, p.delta));
        n_row.bound = counting_bound(p.delta, model.injectivity_radius);
        n_row.margin = n_row.bound - n_row.measured;
        n_row.elements = ball.elements.size();
        for (std::size_t j = 1; j < groups[i].size(); ++j) {
          CsvRow& row = groups[i][j];
          try {
            const CountingMargin m = counting_inequality_margin(model, ball, row.delta, row.k);
            row.measured = m.lhs;
            row.tail = m.lhs_remainder;
            row.bound = m.rhs;
            row.margin = m.slack;
            row.elements = ball.elements.size();
          } catch (const std::exception& e) {
            row.error = sanitize(e.what());
          }
        }
      },
      [&](std::size_t i, const char* what, bool) {
        for (auto& row : groups[i]) row.error = sanitize(what);
      });
  return flatten(metadata_line(config, model, "count"), groups);
}

void write_csv(std::ostream& os, const ResultSet& result) {
  os << "# " << result.metadata << '\n' << kCsvHeader << '\n';
  for (const auto& r : result.rows) {
    os << r.model << ',' << r.k << ',' << fmt(r.zx) << ',' << fmt(r.zy) << ',' << fmt(r.wx) << ',' << fmt(r.wy)
       << ',' << fmt(r.delta) << ',' << r.regime << ',' << fmt(r.measured) << ',' << fmt(r.tail) << ','
       << fmt(r.parabolic) << ',' << fmt(r.bound) << ',' << fmt(r.margin) << ',' << r.elements << ','
       << r.error << '\n';
  }
}

ResultSet read_csv(std::istream& is) {
  ResultSet out;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!header_seen && out.metadata.empty()) out.metadata = std::string(trim(std::string_view(line).substr(1)));
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw ConfigError("CSV header mismatch: expected '" + std::string(kCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 15) throw ConfigError("CSV line " + std::to_string(lineno) + ": expected 15 fields");
    const auto num = [&](std::size_t i) {
      if (f[i] == "nan") return std::numeric_limits<double>::quiet_NaN();
      return parse_double("csv line " + std::to_string(lineno), f[i]);
    };
    CsvRow r;
    r.model = std::string(f[0]);
    r.k = parse_int<int>("k", f[1]);
    r.zx = num(2);
    r.zy = num(3);
    r.wx = num(4);
    r.wy = num(5);
    r.delta = num(6);
    r.regime = std::string(f[7]);
    r.measured = num(8);
    r.tail = num(9);
    r.parabolic = num(10);
    r.bound = num(11);
    r.margin = num(12);
    r.elements = parse_int<std::size_t>("elements", f[13]);
    r.error = std::string(f[14]);
    if (r.error.find("element cap") != std::string::npos) out.resource_capped = true;
    out.rows.push_back(std::move(r));
  }
  if (!header_seen) throw ConfigError("CSV has no header row");
  return out;
}

VerificationReport verify(const ResultSet& result) {
  VerificationReport report;
  std::map<std::string, RegimeSummary> by_regime;
  // k -> max ratio for each diagonal kind
  std::map<std::string, std::map<int, double>> diag_ratio;
  std::vector<std::string> failures;

  for (const auto& r : result.rows) {
    auto& summary = by_regime[r.regime];
    summary.regime = r.regime;
    ++summary.rows;
    if (!r.error.empty()) {
      ++report.errored_rows;
      report.lines.push_back("error: " + r.model + " k=" + std::to_string(r.k) + " " + r.regime + ": " + r.error);
      continue;
    }
    if (r.regime == "diag" || r.regime == "diag-majorant") {
      auto& ratio = diag_ratio[r.regime][r.k];
      ratio = std::max(ratio, r.measured / r.bound);
      ++summary.passed;
      continue;
    }
    double margin = 0.0;
    if (r.regime == "near" || r.regime == "mid") {
      margin = r.bound - r.measured - r.tail;
    } else if (r.regime == "count") {
      margin = r.bound - r.measured;  // slack + tail allowance
    } else if (r.regime == "count-n") {
      margin = r.bound - r.measured;
    } else {
      throw ConfigError("unknown regime '" + r.regime + "' in CSV");
    }
    summary.min_margin = std::min(summary.min_margin, margin);
    if (margin >= 0.0) {
      ++summary.passed;
    } else {
      ++report.failures;
      std::ostringstream os;
      os << "FAIL " << r.model << " k=" << r.k << " " << r.regime << " z=(" << fmt(r.zx) << ", " << fmt(r.zy)
         << ") w=(" << fmt(r.wx) << ", " << fmt(r.wy) << ") margin=" << fmt(margin);
      failures.push_back(os.str());
    }
  }

  for (auto& [name, s] : by_regime) {
    std::ostringstream os;
    os << name << ": " << s.passed << "/" << s.rows << " pass";
    if (std::isfinite(s.min_margin)) os << ", min margin " << fmt(s.min_margin);
    report.lines.push_back(os.str());
    report.regimes.push_back(s);
  }
  for (const auto& [name, per_k] : diag_ratio) {
    for (const auto& [k, ratio] : per_k) {
      report.lines.push_back(name + " k=" + std::to_string(k) + ": max measured/envelope " + fmt(ratio));
    }
  }
  report.lines.insert(report.lines.end(), failures.begin(), failures.end());
  report.lines.push_back(report.failures == 0 ? "verify: pass" : "verify: " + std::to_string(report.failures) +
                                                                     " bound violation(s)");
  return report;
}

}  // namespace bergman
