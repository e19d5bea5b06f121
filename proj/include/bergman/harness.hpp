#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "bergman/bounds.hpp"
#include "bergman/fuchsian.hpp"
#include "bergman/kernel.hpp"

namespace bergman {

enum ExitStatus : int { exit_pass = 0, exit_violation = 1, exit_usage = 2, exit_resource = 3 };

/// Where the sweep places its (z, w) pairs.
///
/// Without explicit `deltas`, near_count targets are spread over [0, r/2)
/// and mid_count over (r/2, r). Target j starts from base point j mod n.
/// Candidates w outside the height/x window are redrawn at a new angle.
struct SamplingPlan {
  std::vector<HalfPlanePoint> base_points;
  int near_count = 10;
  int mid_count = 10;
  std::vector<double> deltas;
  double min_height = 0.0;
  double max_height = std::numeric_limits<double>::infinity();
  double min_x = -std::numeric_limits<double>::infinity();
  double max_x = std::numeric_limits<double>::infinity();
};

struct SweepConfig {
  std::string model = "bolza";
  std::vector<int> ks{3};
  SamplingPlan plan;
  double truncation_radius = 8.0;
  double tail_tolerance = 1e-12;
  std::string output;  ///< empty: standard output
  std::uint64_t seed = 1;
  std::size_t element_cap = 5'000'000;
  std::string cache_dir = ".bergman-cache";
  bool use_cache = true;
  // diag
  std::vector<HalfPlanePoint> diag_points;  ///< empty: the plan's base points
  std::vector<int> diag_ks{3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  int strip_samples = 16;
  // count
  std::vector<double> count_deltas{2.5, 4.0};
};

/// Parses "key = value" lines; '#' starts a comment. Throws ConfigError on
/// unknown keys or malformed values.
SweepConfig parse_config(std::istream& is);
SweepConfig load_config(const std::string& path);

/// Applies one "key = value" setting; the same keys as the config file.
void apply_setting(SweepConfig& config, std::string_view key, std::string_view value);

struct SampledPair {
  HalfPlanePoint z{0.0, 1.0};
  HalfPlanePoint w{0.0, 1.0};
  double delta = 0.0;  ///< hyp_distance(z, w), recomputed
  Regime regime = Regime::near;
};

/// Deterministic in (model, plan, seed). Throws ConfigError for a target
/// delta >= r_X, an empty base point list, or a window no draw can reach.
std::vector<SampledPair> sample_pairs(const SurfaceModel& model, const SamplingPlan& plan, std::uint64_t seed);

/// One CSV row. regime is "near" or "mid" for bound rows, "diag" and
/// "diag-majorant" for the diagonal study, "count" and "count-n" for the
/// counting study.
struct CsvRow {
  std::string model;
  int k = 0;
  double zx = 0.0, zy = 1.0, wx = 0.0, wy = 1.0;
  double delta = 0.0;
  std::string regime;
  double measured = 0.0;
  double tail = 0.0;
  double parabolic = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  std::size_t elements = 0;
  std::string error;
};

struct ResultSet {
  std::string metadata;  ///< written as the leading "# ..." line
  std::vector<CsvRow> rows;
  bool resource_capped = false;  ///< some row hit the element cap
};

inline constexpr std::string_view kCsvHeader =
    "model,k,zx,zy,wx,wy,delta,regime,measured,tail,parabolic,bound,margin,elements,error";

void write_csv(std::ostream& os, const ResultSet& result);
/// Throws ConfigError on a header mismatch or a malformed row.
ResultSet read_csv(std::istream& is);

/// Bound rows: one per (pair, k), margin = bound - measured - tail.
ResultSet run_sweep(const SweepConfig& config);

/// Diagonal rows, bound = growth envelope (k or k^{3/2}), margin = nan.
/// Compact and elementary models evaluate z = w at diag_points; the modular
/// model reports the strip-boundary supremum per k (norm and majorant).
ResultSet run_diag(const SweepConfig& config);

/// Counting rows over the sweep's pairs: "count-n" compares N(z,w;delta)
/// with sinh(delta + r)/sinh(r) (k column 0), "count" is the weighted
/// inequality per k and cut in count_deltas (measured = lhs, tail = lhs
/// remainder, bound = rhs, margin = slack).
ResultSet run_count(const SweepConfig& config);

struct RegimeSummary {
  std::string regime;
  std::size_t rows = 0;
  std::size_t passed = 0;
  double min_margin = std::numeric_limits<double>::infinity();
};

struct VerificationReport {
  std::vector<RegimeSummary> regimes;
  std::size_t failures = 0;
  std::size_t errored_rows = 0;
  std::vector<std::string> lines;  ///< human-readable summary
  int exit_status() const noexcept { return failures == 0 ? exit_pass : exit_violation; }
};

/// Recomputes every margin from the other columns. A bound row fails when
/// bound - measured - tail < 0, a count row when bound - measured < 0, a
/// count-n row when measured > bound. Diagonal rows are reported as
/// measured/bound ratios per k and never fail. Rows carrying an error are
/// counted and listed but not treated as violations.
VerificationReport verify(const ResultSet& result);

}  // namespace bergman
