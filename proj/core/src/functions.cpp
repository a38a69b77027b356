#include "fracdim/functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "fracdim/rng.hpp"
#include "grid_detail.hpp"

namespace fracdim {

void WeierstrassParams::validate() const {
    if (!(s > 0.0) || !(s < 1.0))
        throw std::invalid_argument("WeierstrassParams: s must lie strictly in (0,1)");
    if (!(rho > 1.0)) throw std::invalid_argument("WeierstrassParams: rho must exceed 1");
    if (truncation < 1) throw std::invalid_argument("WeierstrassParams: truncation must be >= 1");
    for (const auto& row : phases)
        if (row.size() < static_cast<std::size_t>(truncation))
            throw std::invalid_argument("WeierstrassParams: phase row shorter than truncation");
}

std::pair<double, double> weierstrass_eval(const WeierstrassParams& params,
                                           std::span<const double> x) {
    params.validate();
    if (x.size() != params.phases.size())
        throw std::invalid_argument("weierstrass_eval: point dimension != phase rows");
    const int n = static_cast<int>(x.size());
    const int J = params.truncation;
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& theta = params.phases[static_cast<std::size_t>(i)];
        double amp = 1.0;          // rho^{-js}
        double freq = 1.0;         // rho^j
        const double amp_step = std::pow(params.rho, -params.s);
        for (int j = 0; j < J; ++j) {
            value += amp * std::cos(freq * x[i] + theta[static_cast<std::size_t>(j)]);
            amp *= amp_step;
            freq *= params.rho;
        }
    }
    const double q = std::pow(params.rho, -params.s);
    const double tail = n * std::pow(params.rho, -J * params.s) / (1.0 - q);
    return {value, tail};
}

std::vector<std::vector<double>> random_phases(int n, int j_max, std::uint64_t seed) {
    if (n < 1 || j_max < 1) throw std::invalid_argument("random_phases: n and j_max must be >= 1");
    constexpr double two_pi = 6.283185307179586476925286766559;
    SplitMix64 rng(seed);
    std::vector<std::vector<double>> phases(static_cast<std::size_t>(n));
    for (auto& row : phases) {
        row.resize(static_cast<std::size_t>(j_max));
        for (auto& v : row) v = rng.next_double() * two_pi;
    }
    return phases;
}

HolderReport estimate_holder_exponent(const PointFunction& f, const SampledMeasure& points,
                                      std::uint64_t seed, std::int64_t pair_target) {
    if (points.size() < 100)
        throw std::invalid_argument("estimate_holder_exponent: need at least 100 points");
    if (pair_target < 1000)
        throw std::invalid_argument("estimate_holder_exponent: pair target too small");

    const std::size_t count = points.size();
    const int n = points.ambient_dim;
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = f(points.point(i));

    double vmax = -std::numeric_limits<double>::infinity();
    double vmin = std::numeric_limits<double>::infinity();
    for (double v : values) {
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
    }
    HolderReport rep;
    rep.pair_count = pair_target;
    if (vmax - vmin < 1e-14 * std::max(1.0, std::fabs(vmax))) {
        rep.degenerate = true;
        rep.s_hat = 1.0;
        rep.c_hat = 0.0;
        return rep;
    }

    // log2-width distance bins; per bin, the 95th percentile of |df|.
    SplitMix64 rng(seed);
    std::unordered_map<int, std::vector<double>> bins;
    std::vector<std::pair<double, double>> samples;  // (log dist, |df|)
    samples.reserve(static_cast<std::size_t>(pair_target));
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (std::int64_t pair = 0; pair < pair_target; ++pair) {
        const std::size_t a = static_cast<std::size_t>(rng.next_below(count));
        const std::size_t b = static_cast<std::size_t>(rng.next_below(count));
        if (a == b) continue;
        const double* pa = points.coords.data() + a * static_cast<std::size_t>(n);
        const double* pb = points.coords.data() + b * static_cast<std::size_t>(n);
        double sq = 0.0;
        for (int c = 0; c < n; ++c) sq += (pa[c] - pb[c]) * (pa[c] - pb[c]);
        const double dist = std::sqrt(sq);
        if (dist <= 0.0) continue;
        dmin = std::min(dmin, dist);
        dmax = std::max(dmax, dist);
        const int bin = static_cast<int>(std::floor(std::log2(dist)));
        const double diff = std::fabs(values[a] - values[b]);
        bins[bin].push_back(diff);
        samples.emplace_back(std::log(dist), diff);
    }
    rep.scale_range = {dmin, dmax};

    std::vector<double> xs, ys;
    for (auto& [bin, diffs] : bins) {
        if (diffs.size() < 50) continue;
        const auto nth = diffs.begin() + static_cast<std::ptrdiff_t>(0.95 * diffs.size());
        std::nth_element(diffs.begin(), nth, diffs.end());
        const double p95 = *nth;
        if (p95 <= 0.0) continue;
        xs.push_back((bin + 0.5) * std::log(2.0));  // log of geometric bin center
        ys.push_back(std::log(p95));
    }
    if (xs.size() < 3)
        throw std::invalid_argument("estimate_holder_exponent: too few usable distance scales");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double k = static_cast<double>(xs.size());
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    rep.s_hat = std::clamp(slope, 1e-9, 1.0);
    // Slope comes from the robust per-bin envelope; the constant is a sup, so
    // the intercept is raised until the line dominates every sampled pair.
    double log_c = -std::numeric_limits<double>::infinity();
    for (const auto& [log_dist, diff] : samples)
        if (diff > 0.0) log_c = std::max(log_c, std::log(diff) - rep.s_hat * log_dist);
    rep.c_hat = std::exp(log_c);
    return rep;
}

// --- Wavelet synthesis -------------------------------------------------------

double mother_bump(std::span<const double> u) {
    double prod = 1.0;
    for (double c : u) {
        const double a = 1.0 - c * c;
        if (a <= 0.0) return 0.0;
        prod *= a * a * a;
    }
    return prod;
}

int WaveletSeries::max_level() const {
    int top = 0;
    for (const auto& lvl : levels) top = std::max(top, lvl.j);
    return top;
}

double WaveletSeries::level_abs_sum(int j) const {
    double sum = 0.0;
    for (const auto& lvl : levels)
        if (lvl.j == j)
            for (double l : lvl.lambdas) sum += std::fabs(l);
    return sum;
}

double WaveletSeries::level_quantity(int j) const {
    return std::exp2(j * (target_s - target_d)) * level_abs_sum(j);
}

namespace {

double synth_impl(const WaveletSeries& series, std::span<const double> x, int level_cap) {
    const int n = series.ambient_dim;
    if (x.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("besov_synthesize: point dimension mismatch");
    double value = 0.0;
    std::vector<double> u(static_cast<std::size_t>(n));
    for (const auto& lvl : series.levels) {
        if (level_cap >= 0 && lvl.j >= level_cap) continue;
        const double scale = std::exp2(lvl.j - 1);
        for (std::size_t k = 0; k < lvl.lambdas.size(); ++k) {
            const auto& m = lvl.cells[k];
            bool inside = true;
            for (int c = 0; c < n; ++c) {
                u[static_cast<std::size_t>(c)] =
                    scale * x[static_cast<std::size_t>(c)] -
                    static_cast<double>(m[static_cast<std::size_t>(c)]);
                if (std::fabs(u[static_cast<std::size_t>(c)]) >= 1.0) {
                    inside = false;
                    break;
                }
            }
            if (inside) value += lvl.lambdas[k] * mother_bump(u);
        }
    }
    return value;
}

}  // namespace

double besov_synthesize(const WaveletSeries& series, std::span<const double> x) {
    return synth_impl(series, x, -1);
}

double besov_synthesize_below(const WaveletSeries& series, std::span<const double> x,
                              int level_cap) {
    return synth_impl(series, x, level_cap);
}

BesovEvaluator::BesovEvaluator(const WaveletSeries& series, int level_cap)
    : dim_(series.ambient_dim) {
    const detail::KeyPacker packer(dim_);
    for (const auto& lvl : series.levels) {
        if (level_cap >= 0 && lvl.j >= level_cap) continue;
        if (lvl.lambdas.empty()) continue;
        Level built;
        built.j = lvl.j;
        built.scale = std::exp2(lvl.j - 1);
        built.lambdas = lvl.lambdas;
        built.flat_cells.reserve(lvl.cells.size() * static_cast<std::size_t>(dim_));
        std::size_t buckets = 16;
        while (buckets < lvl.lambdas.size() * 2) buckets <<= 1;
        built.mask = buckets - 1;
        built.keys.assign(buckets, std::numeric_limits<std::int64_t>::min());
        built.slots.assign(buckets, -1);
        for (std::size_t k = 0; k < lvl.cells.size(); ++k) {
            const auto& m = lvl.cells[k];
            for (int c = 0; c < dim_; ++c)
                built.flat_cells.push_back(m[static_cast<std::size_t>(c)]);
            for (std::int64_t idx : m)
                if (!packer.fits(idx))
                    throw std::invalid_argument("BesovEvaluator: coefficient index out of range");
            const auto key = static_cast<std::int64_t>(
                packer.pack({m.data(), static_cast<std::size_t>(dim_)}));
            std::uint64_t h = static_cast<std::uint64_t>(key) * 0x9E3779B97F4A7C15ULL;
            std::uint64_t slot = h & built.mask;
            while (built.slots[slot] >= 0) slot = (slot + 1) & built.mask;
            built.keys[slot] = key;
            built.slots[slot] = static_cast<std::int32_t>(k);
        }
        levels_.push_back(std::move(built));
    }
}

double BesovEvaluator::operator()(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("BesovEvaluator: point dimension mismatch");
    const detail::KeyPacker packer(dim_);
    double value = 0.0;
    std::int64_t cand[8];
    double u[8];
    if (dim_ > 8) throw std::invalid_argument("BesovEvaluator: dimension too large");
    for (const auto& lvl : levels_) {
        // Candidate indices per coordinate: the up-to-3 integers within
        // distance < 1 of scale*x_c.
        std::int64_t base[8];
        int counts[8];
        for (int c = 0; c < dim_; ++c) {
            const double sc = lvl.scale * x[static_cast<std::size_t>(c)];
            const std::int64_t lo = static_cast<std::int64_t>(std::ceil(sc - 1.0));
            const std::int64_t hi = static_cast<std::int64_t>(std::floor(sc + 1.0));
            base[c] = lo;
            counts[c] = static_cast<int>(hi - lo + 1);
            if (counts[c] < 0) counts[c] = 0;
        }
        int total = 1;
        for (int c = 0; c < dim_; ++c) total *= counts[c];
        for (int combo = 0; combo < total; ++combo) {
            int rem = combo;
            bool inside = true;
            for (int c = 0; c < dim_; ++c) {
                cand[c] = base[c] + rem % counts[c];
                rem /= counts[c];
                u[c] = lvl.scale * x[static_cast<std::size_t>(c)] - static_cast<double>(cand[c]);
                if (std::fabs(u[c]) >= 1.0) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
            const auto key = static_cast<std::int64_t>(
                packer.pack({cand, static_cast<std::size_t>(dim_)}));
            std::uint64_t h = static_cast<std::uint64_t>(key) * 0x9E3779B97F4A7C15ULL;
            std::uint64_t slot = h & lvl.mask;
            while (lvl.slots[slot] >= 0 && lvl.keys[slot] != key) slot = (slot + 1) & lvl.mask;
            if (lvl.slots[slot] < 0) continue;
            value += lvl.lambdas[static_cast<std::size_t>(lvl.slots[slot])] *
                     mother_bump({u, static_cast<std::size_t>(dim_)});
        }
    }
    return value;
}

WaveletSeries make_besov_coefficients(const IfsSpec& spec, double s, int levels, BesovMode mode,
                                      std::uint64_t seed, std::int64_t point_budget) {
    if (levels < 1) throw std::invalid_argument("make_besov_coefficients: levels must be >= 1");
    if (!(s > 0.0) || s > 1.0)
        throw std::invalid_argument("make_besov_coefficients: s must lie in (0,1]");
    const double d = ifs_dimension(spec);
    const int n = spec.ambient_dim;

    // Sample the attractor finely enough that every dyadic cell of the finest
    // coefficient scale that meets the attractor contains a sample point.
    int sample_level = 0;
    while (std::pow(spec.ratio, sample_level) > std::exp2(-(levels - 1)) &&
           sample_level < 60)
        ++sample_level;
    sample_level += 2;
    {
        double pts = std::pow(static_cast<double>(spec.branch_count), sample_level);
        while (pts > static_cast<double>(point_budget) && sample_level > 0) {
            --sample_level;
            pts = std::pow(static_cast<double>(spec.branch_count), sample_level);
        }
    }
    const SampledMeasure mu = generate_attractor(spec, sample_level, point_budget);

    WaveletSeries series;
    series.ambient_dim = n;
    series.target_s = s;
    series.target_d = d;

    SplitMix64 rng(seed);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
    for (int j = 1; j <= levels; ++j) {
        const double scale = std::exp2(j - 1);
        detail::VectorSet active;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            auto p = mu.point(i);
            for (int c = 0; c < n; ++c)
                idx[static_cast<std::size_t>(c)] = detail::cell_index(p[c], scale);
            active.insert(idx);
        }
        WaveletSeries::LevelCoeffs lvl;
        lvl.j = j;
        lvl.cells.assign(active.begin(), active.end());
        std::sort(lvl.cells.begin(), lvl.cells.end());
        const double magnitude =
            std::exp2(-j * (s - d)) / static_cast<double>(lvl.cells.size());
        lvl.lambdas.assign(lvl.cells.size(), magnitude);
        if (mode == BesovMode::signed_random) {
            for (auto& l : lvl.lambdas)
                if (rng.next() & 1ULL) l = -l;
        }
        series.levels.push_back(std::move(lvl));
    }
    return series;
}

WaveletSeries parse_wavelet_series(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    WaveletSeries series;
    series.mother = j.value("mother", std::string("poly_bump_c2"));
    series.ambient_dim = j.at("n").get<int>();
    series.target_s = j.at("target_s").get<double>();
    series.target_d = j.at("target_d").get<double>();
    for (const auto& jl : j.at("levels")) {
        WaveletSeries::LevelCoeffs lvl;
        lvl.j = jl.at("j").get<int>();
        for (const auto& jc : jl.at("coefficients")) {
            lvl.cells.push_back(jc.at("m").get<std::vector<std::int64_t>>());
            lvl.lambdas.push_back(jc.at("lambda").get<double>());
        }
        series.levels.push_back(std::move(lvl));
    }
    return series;
}

void write_function_samples_csv(const SampledMeasure& points, std::span<const double> values,
                                std::ostream& out) {
    if (values.size() != points.size())
        throw std::invalid_argument("write_function_samples_csv: one value per point required");
    for (int c = 1; c <= points.ambient_dim; ++c) out << "x_" << c << ",";
    out << "f\n";
    char buf[64];
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto p = points.point(i);
        for (int c = 0; c < points.ambient_dim; ++c) {
            std::snprintf(buf, sizeof buf, "%.12g", p[c]);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.12g", values[i]);
        out << buf << '\n';
    }
}

std::string to_json(const WaveletSeries& series) {
    nlohmann::json j;
    j["mother"] = series.mother;
    j["n"] = series.ambient_dim;
    j["target_s"] = series.target_s;
    j["target_d"] = series.target_d;
    j["levels"] = nlohmann::json::array();
    for (const auto& lvl : series.levels) {
        nlohmann::json jl;
        jl["j"] = lvl.j;
        jl["coefficients"] = nlohmann::json::array();
        for (std::size_t k = 0; k < lvl.lambdas.size(); ++k) {
            nlohmann::json jc;
            jc["m"] = lvl.cells[k];
            jc["lambda"] = lvl.lambdas[k];
            jl["coefficients"].push_back(std::move(jc));
        }
        j["levels"].push_back(std::move(jl));
    }
    return j.dump();
}

}  // namespace fracdim
