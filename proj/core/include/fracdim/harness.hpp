#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fracdim/dimension.hpp"
#include "fracdim/geometry.hpp"

namespace fracdim {

/// Sharp theoretical bound H(d,s) = min(d+1-s, d/s) with its active branch
/// ("d+1-s" for s < d, "d/s" for s >= d).
struct HTheory {
    double value = 0.0;
    std::string branch;
};

HTheory h_theory(double d, double s);

enum class FunctionKind { weierstrass, besov_synth };

/// One experiment cell: a set, a function family, and estimator settings.
struct ExperimentConfig {
    IfsSpec set_spec;
    FunctionKind kind = FunctionKind::weierstrass;
    double s = 0.5;
    double rho = 2.0;
    std::vector<std::uint64_t> seeds{1};
    int attractor_level = 10;
    std::pair<int, int> j_range{4, 8};
    bool est_boxdim = true;
    bool est_corrdim = false;
    bool est_premeasure = false;
    /// Count graph boxes by filling each base column between the sampled
    /// extremes (exact for functions on interval/cube bases, where the graph
    /// over a cell is connected). Leave false for fractal bases: filling would
    /// bridge the gaps of K and follow the d+1-s covering even where the d/s
    /// one is smaller.
    bool boxdim_filled_columns = false;
    int threads = 1;
    std::int64_t corr_pairs = 200000;
    std::int64_t point_budget = kDefaultPointBudget;
};

struct ResultRow {
    double d = 0.0;
    double s = 0.0;
    std::uint64_t seed = 0;
    double boxdim_graph = 0.0;
    double corrdim_graph = 0.0;
    double H_theory = 0.0;
    std::string branch;
    int j_lo = 0;
    int j_hi = 0;
    double residual = 0.0;
    std::string error;  ///< empty on success
};

/// Evaluates the config's function family (Weierstrass with seeded phases, or
/// a signed-random synthesized series) on the sample points. Weierstrass
/// truncation is chosen so the certified tail stays below the finest counting
/// scale of cfg.j_range.
std::vector<double> evaluate_function(const ExperimentConfig& cfg, const SampledMeasure& mu,
                                      std::uint64_t seed);

/// Runs every (config, seed) cell; failures are recorded per row, never abort
/// the sweep. Rows come back sorted by (d, s, seed).
std::vector<ResultRow> run_sweep(const std::vector<ExperimentConfig>& grid);

/// Breakpoint of the two-branch model y(s) = H(sigma, s) fitted to
/// boxdim_graph vs s by least squares over a fine sigma grid. The rows must
/// share d and straddle it.
double detect_transition(const std::vector<ResultRow>& rows);

/// CSV columns: d,s,seed,boxdim_graph,corrdim_graph,H_theory,branch,j_lo,j_hi,residual.
/// Byte-deterministic given identical rows.
void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void emit_csv_file(const std::vector<ResultRow>& rows, const std::string& path);

/// Self-contained 800x600 SVG scatter of boxdim_graph vs s with the H(d,.)
/// theory curve overlaid per distinct d. Byte-deterministic.
void emit_svg(const std::vector<ResultRow>& rows, std::ostream& out);
void emit_svg_file(const std::vector<ResultRow>& rows, const std::string& path);

/// JSON config (see README for the schema). A sweep config expands to one
/// ExperimentConfig per listed s value.
std::vector<ExperimentConfig> parse_sweep_config(const std::string& json_text);
ExperimentConfig parse_experiment_config(const std::string& json_text);

}  // namespace fracdim
