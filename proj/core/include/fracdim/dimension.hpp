#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "fracdim/functions.hpp"
#include "fracdim/geometry.hpp"

namespace fracdim {

/// Per-level counts of dyadic cells (side 2^-j, centers 2^-j m) hit by a cloud.
struct DyadicTally {
    std::vector<int> levels;
    std::vector<std::int64_t> counts;
    int ambient_dim = 1;
};

/// Exact occupancy counts for j in [j_min, j_max]. Cell index per coordinate
/// is round(2^j x) with half-up ties (equidistant points go to the larger
/// index). Thread count never changes the result (per-thread sets are unioned).
DyadicTally tally_boxes(const SampledMeasure& cloud, int j_min, int j_max, int threads = 1);

/// Least-squares fit of log2 N_j against j.
struct DimensionEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::pair<int, int> j_range{0, 0};
    bool valid = true;  ///< false when slope falls outside [0, ambient_dim + 0.2]
};

DimensionEstimate fit_dimension(const DyadicTally& tally, std::pair<int, int> j_range);

/// Default fit-range policy: drop the two smallest tallied levels and every j
/// with 2^-j below 4x the sample resolution.
std::pair<int, int> default_fit_range(const DyadicTally& tally, double resolution);

/// Points (x, f(x)) in R^(n+1); weights, mass and resolution carried over,
/// which makes the graph cloud the push-forward of mu under x -> (x, f(x)).
using GraphCloud = SampledMeasure;

GraphCloud graph_cloud(const SampledMeasure& mu, const PointFunction& f);
GraphCloud graph_cloud_from_values(const SampledMeasure& mu, std::span<const double> values);

/// Monte Carlo estimates of the double integral of |x-y|^-t d(mu x mu).
struct CorrelationCurve {
    std::vector<double> t_values;
    std::vector<double> sums;
    std::int64_t pair_count = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::int64_t kCorrelationBlockSize = std::int64_t{1} << 16;
inline constexpr int kCoincidentRedrawLimit = 100;

/// Weight-proportional pair sampling with replacement; coincident pairs
/// (equal coordinates) are redrawn up to kCoincidentRedrawLimit times, then
/// the measure is rejected as degenerate. Deterministic in seed; block
/// structure makes results identical for every thread count.
CorrelationCurve correlation_integral(const SampledMeasure& mu, std::vector<double> t_values,
                                      std::int64_t pair_count, std::uint64_t seed,
                                      int threads = 1);

/// Largest tested t whose sums stay resolution-stable across the curve family
/// (growth factor below 1.1 per level doubling; curves come with their
/// resolution levels). Returns 0 when nothing is stable.
double lower_bound_dimension(const std::vector<CorrelationCurve>& curves,
                             const std::vector<int>& resolution_levels);

/// Compares the discrete radial sums I(y) = sum_x w_x |x-y|^-u at seeded probe
/// points against the reference integral R = diam^(d-u)/(d-u).
/// Returns [min_y I(y)/R, max_y I(y)/R]. Requires 0 <= u < d.
std::pair<double, double> radial_profile_check(const SampledMeasure& mu, double d, double u,
                                               int probe_count, std::uint64_t seed);

/// CSV exports: (j,N_j) and (t,sum,pair_count).
void write_tally_csv(const DyadicTally& tally, std::ostream& out);
void write_curve_csv(const CorrelationCurve& curve, std::ostream& out);

}  // namespace fracdim
