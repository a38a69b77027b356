#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fracdim {

inline constexpr std::int64_t kDefaultPointBudget = std::int64_t{1} << 22;

/// Equal-ratio iterated function system on [0,1]^n: maps x -> r*x + t_k.
///
/// Only systems satisfying the open set condition are accepted (images of
/// [0,1]^n pairwise disjoint up to boundary contact), so the attractor is an
/// exact d-set with d = log m / log(1/r) and the natural measure splits as
/// 1/m per branch.
struct IfsSpec {
    int ambient_dim = 1;                             ///< n
    int branch_count = 0;                            ///< m
    double ratio = 0.0;                              ///< r in (0,1)
    std::vector<std::vector<double>> translations;   ///< m vectors in [0, 1-r]^n

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

/// Similarity dimension d = log m / log(1/r). Rejects d > ambient_dim.
double ifs_dimension(const IfsSpec& spec);

/// How a cloud's atoms stand in for the measure below the resolution scale.
/// `atoms`: the points carry the mass as-is (attractor samples, graphs).
/// `uniform_cell`: each point's mass is spread uniformly over the cell of
/// side `resolution` around it (dense samples of Lebesgue measure); pair
/// statistics then admit exact sub-resolution corrections.
enum class CellModel { atoms, uniform_cell };

/// Weighted point cloud approximating a mass distribution.
///
/// Coordinates are stored flat, row-major (point i occupies
/// coords[i*ambient_dim .. +ambient_dim)). `resolution` is the spatial scale
/// below which the cloud no longer resolves the measure (r^level for IFS
/// output, grid spacing for dense samples, 0 if unknown).
struct SampledMeasure {
    int ambient_dim = 1;
    int level = 0;
    double total_mass = 0.0;
    double resolution = 0.0;
    CellModel cell_model = CellModel::atoms;
    std::vector<double> coords;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(ambient_dim),
                static_cast<std::size_t>(ambient_dim)};
    }
};

/// Bounding-box diagonal of the cloud (upper estimate of the support diameter).
double cloud_diameter(const SampledMeasure& mu);

/// Level-`level` discretization of the natural self-similar measure:
/// one point per composition word at the word-cell center, weight m^-level,
/// in lexicographic word order. Throws if m^level exceeds `point_budget`.
SampledMeasure generate_attractor(const IfsSpec& spec, int level,
                                  std::int64_t point_budget = kDefaultPointBudget);

/// Dense deterministic samples of [0,1] and [0,1]^2, for calibration runs.
/// The interval cloud declares CellModel::uniform_cell (it stands for
/// Lebesgue measure); the square cloud stays atomic (the sub-resolution
/// correction is implemented on the line only).
SampledMeasure uniform_interval_cloud(std::size_t point_count);
SampledMeasure uniform_square_cloud(std::size_t points_per_axis);

/// Mass of the closed Euclidean ball B_radius(center) under the sampled measure.
double mass_of_ball(const SampledMeasure& mu, std::span<const double> center, double radius);

/// Empirical d-set regularity constants: extremes of mu(B_rho(x))/rho^d over
/// seeded probe points x (drawn from the support) and the given radii.
struct RegularityReport {
    double d = 0.0;
    std::vector<double> radii;
    double c1_hat = 0.0;            ///< min over (probe, radius) of mu(B_rho(x))/rho^d
    double c2_hat = 0.0;            ///< max over (probe, radius)
    double worst_ratio_low = 0.0;   ///< min over probes of per-probe spread across radii
    double worst_ratio_high = 0.0;  ///< max over probes of per-probe spread across radii
};

RegularityReport check_regularity(const SampledMeasure& mu, double d,
                                  std::vector<double> radii, int probes,
                                  std::uint64_t seed);

/// JSON wire format: {"n":..., "m":..., "r":..., "translations":[[...],...]}.
IfsSpec parse_ifs_spec(const std::string& json_text);
std::string to_json(const IfsSpec& spec);

/// CSV with columns x_1..x_n,weight.
void write_attractor_csv(const SampledMeasure& mu, std::ostream& out);

}  // namespace fracdim
