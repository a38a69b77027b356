#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracdim/geometry.hpp"

namespace fracdim {

using PointFunction = std::function<double(std::span<const double>)>;

inline constexpr int kDefaultWeierstrassTruncation = 40;

/// Lacunary cosine series sum_i sum_{j<J} rho^{-j s} cos(rho^j x_i + theta_ij).
struct WeierstrassParams {
    double s = 0.5;                            ///< smoothness exponent, in (0,1)
    double rho = 2.0;                          ///< lacunarity, > 1
    std::vector<std::vector<double>> phases;   ///< n rows of at least `truncation` phases
    int truncation = kDefaultWeierstrassTruncation;

    void validate() const;
};

/// Returns (partial sum, certified tail bound n * rho^{-Js} / (1 - rho^{-s})).
/// The full series value lies within value +- tail_bound.
std::pair<double, double> weierstrass_eval(const WeierstrassParams& params,
                                           std::span<const double> x);

/// n x j_max matrix of i.i.d. uniform [0, 2*pi) phases, deterministic in seed.
std::vector<std::vector<double>> random_phases(int n, int j_max, std::uint64_t seed);

/// Callable adapter for point-cloud evaluation.
struct WeierstrassFunction {
    WeierstrassParams params;
    double operator()(std::span<const double> x) const {
        return weierstrass_eval(params, x).first;
    }
};

/// Empirical Holder exponent from the 95th-percentile envelope of
/// log|f(x)-f(y)| vs log|x-y| over seeded sample pairs binned by scale.
/// s_hat is the envelope slope; c_hat is the smallest constant making
/// c_hat * |x-y|^s_hat dominate every sampled pair.
struct HolderReport {
    double s_hat = 1.0;
    double c_hat = 0.0;
    std::int64_t pair_count = 0;
    std::pair<double, double> scale_range{0.0, 0.0};
    bool degenerate = false;
};

HolderReport estimate_holder_exponent(const PointFunction& f, const SampledMeasure& points,
                                      std::uint64_t seed, std::int64_t pair_target = 100000);

// --- Wavelet-style synthesis -------------------------------------------------

/// Mother bump: tensor product of (1-u^2)^3 on [-1,1], zero outside.
/// C^2, compactly supported, sup |psi| = 1.
double mother_bump(std::span<const double> u);
inline constexpr double kMotherSupportRadius = 1.0;
/// max_u |d/du (1-u^2)^3| = 96 / (25 sqrt 5); per-coordinate partial bound.
inline constexpr double kMotherGradBound1d = 1.7180815044228634;

/// Sparse coefficient series h(x) = sum_j sum_m lambda_jm psi(2^{j-1} x - m).
struct WaveletSeries {
    struct LevelCoeffs {
        int j = 1;
        std::vector<std::vector<std::int64_t>> cells;  ///< indices m, one vector per coefficient
        std::vector<double> lambdas;
    };

    std::string mother = "poly_bump_c2";
    int ambient_dim = 1;
    double target_s = 0.5;
    double target_d = 1.0;
    std::vector<LevelCoeffs> levels;

    int max_level() const;
    /// sum_m |lambda_jm| at level j (0 if the level is absent).
    double level_abs_sum(int j) const;
    /// 2^{j(s-d)} * level_abs_sum(j): the tracked smoothness quantity.
    double level_quantity(int j) const;
};

/// Exact finite sum over all stored coefficients.
double besov_synthesize(const WaveletSeries& series, std::span<const double> x);

/// Same sum restricted to levels j < level_cap (used for partial sums h_0).
double besov_synthesize_below(const WaveletSeries& series, std::span<const double> x,
                              int level_cap);

/// Batch evaluator with per-level index maps; same values as besov_synthesize.
class BesovEvaluator {
public:
    explicit BesovEvaluator(const WaveletSeries& series, int level_cap = -1);
    double operator()(std::span<const double> x) const;

private:
    struct Level {
        int j;
        double scale;  // 2^{j-1}
        std::vector<std::int64_t> flat_cells;
        std::vector<double> lambdas;
        // open addressing over packed keys, built once
        std::vector<std::int64_t> keys;
        std::vector<std::int32_t> slots;
        std::uint64_t mask = 0;
    };
    int dim_;
    std::vector<Level> levels_;
};

enum class BesovMode { deterministic, signed_random };

/// Coefficients realizing the critical level sums: per level j, activates the
/// indices m whose cell round(2^{j-1} x) is hit by the attractor and splits the
/// magnitude 2^{-j(s-d)} equally among them. signed_random flips signs i.i.d.
WaveletSeries make_besov_coefficients(const IfsSpec& spec, double s, int levels,
                                      BesovMode mode, std::uint64_t seed,
                                      std::int64_t point_budget = kDefaultPointBudget);

WaveletSeries parse_wavelet_series(const std::string& json_text);
std::string to_json(const WaveletSeries& series);

/// CSV with columns x_1..x_n,f (one row per sample point).
void write_function_samples_csv(const SampledMeasure& points, std::span<const double> values,
                                std::ostream& out);

}  // namespace fracdim
