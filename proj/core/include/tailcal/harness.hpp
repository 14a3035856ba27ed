#pragma once

// Run-level orchestration behind the CLI subcommands: threshold resolution,
// per-threshold diagnostic emission (CSV + SVG views), manifests, test
// reports, and the canned reproduction recipes. Exit-code convention:
// 0 success, 1 diagnostics partially degenerate, 2 usage or parse error.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tailcal/diagnostics.hpp"
#include "tailcal/inference.hpp"
#include "tailcal/simlab.hpp"

namespace tailcal::harness {

struct BinSpec {
    std::string covariate;
    std::vector<double> breakpoints;  // empty when quantile_bins is used
    std::size_t quantile_bins = 0;
};

struct ThresholdSpec {
    std::vector<double> raw;
    std::vector<double> quantile_levels;  // levels in (0, 1)
    bool include_standard_pit = false;    // adds the t = -inf panel
};

struct RunConfig {
    ThresholdSpec thresholds;
    std::size_t u_grid_points = 101;
    std::optional<BinSpec> bins;
    std::optional<double> ci_level;
    bool run_tests = false;
    bool marginal = false;
    std::size_t marginal_points = 101;
    std::optional<double> marginal_x_max;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir;
};

// One resolved threshold: its value, a filename-safe tag, and provenance.
struct ResolvedThreshold {
    double value = 0.0;
    std::string tag;
    std::string description;
};

std::vector<ResolvedThreshold> resolve_thresholds(const ThresholdSpec& spec, Pairs pairs);

// Emits per-threshold combined/severity CSVs, the occurrence series, any
// binned curves and sup-distance series, marginal curves, test reports, the
// SVG panels, and a manifest. Returns 0, or 1 when some thresholds were
// degenerate (partial outputs, warnings to `log`).
int run_diagnose(const RunConfig& config, const std::filesystem::path& dataset_path,
                 std::ostream& log);

// Writes one JSON-lines dataset per stream plus a manifest; logs the
// analytic marginal law of the observations.
void run_simulate(const simlab::ScenarioSpec& spec, const std::filesystem::path& out_dir,
                  std::ostream& log);

// KS uniformity test of the excess PITs and/or the exact binomial
// occurrence test at one threshold.
std::vector<TestReport> run_test(const std::filesystem::path& dataset_path,
                                 const ThresholdSpec& threshold, const std::string& kind,
                                 std::uint64_t seed);

std::vector<std::string> repro_ids();

// Regenerates the data behind one synthetic-study figure at the given size.
int run_repro(const std::string& id, std::size_t n, std::uint64_t seed,
              const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace tailcal::harness
