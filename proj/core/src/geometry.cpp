#include "fracdim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "fracdim/rng.hpp"

namespace fracdim {

namespace {
constexpr double kGeomTol = 1e-12;
}

void IfsSpec::validate() const {
    if (ambient_dim < 1) throw std::invalid_argument("IfsSpec: ambient_dim must be >= 1");
    if (branch_count < 2) throw std::invalid_argument("IfsSpec: branch_count must be >= 2");
    if (!(ratio > 0.0) || !(ratio < 1.0))
        throw std::invalid_argument("IfsSpec: ratio must lie in (0,1)");
    if (translations.size() != static_cast<std::size_t>(branch_count))
        throw std::invalid_argument("IfsSpec: need one translation per branch");
    for (const auto& t : translations) {
        if (t.size() != static_cast<std::size_t>(ambient_dim))
            throw std::invalid_argument("IfsSpec: translation dimension mismatch");
        for (double c : t) {
            if (c < -kGeomTol || c > 1.0 - ratio + kGeomTol)
                throw std::invalid_argument(
                    "IfsSpec: translations must keep images inside [0,1]^n");
        }
    }
    // Open set condition for axis-aligned cubes of side r: interiors of the
    // images are disjoint iff some coordinate gap reaches r.
    for (std::size_t a = 0; a + 1 < translations.size(); ++a) {
        for (std::size_t b = a + 1; b < translations.size(); ++b) {
            double max_gap = 0.0;
            for (int c = 0; c < ambient_dim; ++c)
                max_gap = std::max(max_gap, std::fabs(translations[a][c] - translations[b][c]));
            if (max_gap < ratio - kGeomTol)
                throw std::invalid_argument("IfsSpec: open set condition violated");
        }
    }
    const double d = std::log(static_cast<double>(branch_count)) / std::log(1.0 / ratio);
    if (d > ambient_dim + kGeomTol)
        throw std::invalid_argument("IfsSpec: log m / log(1/r) exceeds ambient dimension");
}

double ifs_dimension(const IfsSpec& spec) {
    spec.validate();
    return std::log(static_cast<double>(spec.branch_count)) / std::log(1.0 / spec.ratio);
}

double cloud_diameter(const SampledMeasure& mu) {
    const int n = mu.ambient_dim;
    if (mu.size() == 0) return 0.0;
    std::vector<double> lo(n, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto p = mu.point(i);
        for (int c = 0; c < n; ++c) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }
    }
    double sq = 0.0;
    for (int c = 0; c < n; ++c) sq += (hi[c] - lo[c]) * (hi[c] - lo[c]);
    return std::sqrt(sq);
}

SampledMeasure generate_attractor(const IfsSpec& spec, int level, std::int64_t point_budget) {
    spec.validate();
    if (level < 0) throw std::invalid_argument("generate_attractor: level must be >= 0");
    const double m = spec.branch_count;
    if (level * std::log(m) > std::log(static_cast<double>(point_budget)) + 1e-9)
        throw std::invalid_argument("generate_attractor: point budget exceeded");
    std::int64_t count = 1;
    for (int i = 0; i < level; ++i) count *= spec.branch_count;
    if (count > point_budget)
        throw std::invalid_argument("generate_attractor: point budget exceeded");

    const int n = spec.ambient_dim;
    SampledMeasure out;
    out.ambient_dim = n;
    out.level = level;
    out.total_mass = 1.0;
    out.resolution = std::pow(spec.ratio, level);
    out.coords.resize(static_cast<std::size_t>(count) * n);
    out.weights.assign(static_cast<std::size_t>(count), 1.0 / static_cast<double>(count));

    // r^0 .. r^level
    std::vector<double> rpow(level + 1);
    rpow[0] = 1.0;
    for (int i = 1; i <= level; ++i) rpow[i] = rpow[i - 1] * spec.ratio;

    // Word (k_1..k_L) in lexicographic order = index i in base m, k_1 most
    // significant. Point = sum_d r^{d-1} t_{k_d} + r^L * center.
    const double half = 0.5;
    for (std::int64_t i = 0; i < count; ++i) {
        double* p = out.coords.data() + static_cast<std::size_t>(i) * n;
        for (int c = 0; c < n; ++c) p[c] = rpow[level] * half;
        std::int64_t word = i;
        for (int d = level; d >= 1; --d) {
            const int k = static_cast<int>(word % spec.branch_count);
            word /= spec.branch_count;
            const auto& t = spec.translations[static_cast<std::size_t>(k)];
            for (int c = 0; c < n; ++c) p[c] += rpow[d - 1] * t[c];
        }
    }
    return out;
}

SampledMeasure uniform_interval_cloud(std::size_t point_count) {
    if (point_count < 2) throw std::invalid_argument("uniform_interval_cloud: need >= 2 points");
    SampledMeasure out;
    out.ambient_dim = 1;
    out.level = 0;
    out.total_mass = 1.0;
    out.resolution = 1.0 / static_cast<double>(point_count - 1);
    out.cell_model = CellModel::uniform_cell;
    out.coords.resize(point_count);
    out.weights.assign(point_count, 1.0 / static_cast<double>(point_count));
    for (std::size_t k = 0; k < point_count; ++k)
        out.coords[k] = static_cast<double>(k) / static_cast<double>(point_count - 1);
    return out;
}

SampledMeasure uniform_square_cloud(std::size_t points_per_axis) {
    if (points_per_axis < 2) throw std::invalid_argument("uniform_square_cloud: need >= 2 per axis");
    const std::size_t count = points_per_axis * points_per_axis;
    SampledMeasure out;
    out.ambient_dim = 2;
    out.level = 0;
    out.total_mass = 1.0;
    out.resolution = 1.0 / static_cast<double>(points_per_axis);
    out.coords.resize(count * 2);
    out.weights.assign(count, 1.0 / static_cast<double>(count));
    const double inv = 1.0 / static_cast<double>(points_per_axis);
    std::size_t idx = 0;
    for (std::size_t a = 0; a < points_per_axis; ++a) {
        for (std::size_t b = 0; b < points_per_axis; ++b) {
            out.coords[idx * 2] = (static_cast<double>(a) + 0.5) * inv;
            out.coords[idx * 2 + 1] = (static_cast<double>(b) + 0.5) * inv;
            ++idx;
        }
    }
    return out;
}

double mass_of_ball(const SampledMeasure& mu, std::span<const double> center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("mass_of_ball: radius must be positive");
    if (center.size() != static_cast<std::size_t>(mu.ambient_dim))
        throw std::invalid_argument("mass_of_ball: center dimension mismatch");
    const double r2 = radius * radius;
    const int n = mu.ambient_dim;
    double mass = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double* p = mu.coords.data() + i * static_cast<std::size_t>(n);
        double sq = 0.0;
        for (int c = 0; c < n; ++c) {
            const double dc = p[c] - center[c];
            sq += dc * dc;
        }
        if (sq <= r2) mass += mu.weights[i];
    }
    return mass;
}

RegularityReport check_regularity(const SampledMeasure& mu, double d, std::vector<double> radii,
                                  int probes, std::uint64_t seed) {
    if (mu.size() == 0) throw std::invalid_argument("check_regularity: empty measure");
    if (!(d > 0.0)) throw std::invalid_argument("check_regularity: d must be positive");
    if (probes < 1) throw std::invalid_argument("check_regularity: need at least one probe");
    if (radii.empty()) throw std::invalid_argument("check_regularity: empty radius list");
    for (double rho : radii) {
        if (!(rho > 0.0) || rho > 1.0)
            throw std::invalid_argument("check_regularity: radii must lie in (0,1]");
        if (rho < mu.resolution)
            throw std::invalid_argument("check_regularity: radius below discretization scale");
    }
    std::sort(radii.begin(), radii.end());

    const int n = mu.ambient_dim;
    SplitMix64 rng(seed);
    RegularityReport rep;
    rep.d = d;
    rep.radii = radii;
    rep.c1_hat = std::numeric_limits<double>::infinity();
    rep.c2_hat = 0.0;
    rep.worst_ratio_low = std::numeric_limits<double>::infinity();
    rep.worst_ratio_high = 0.0;

    std::vector<double> masses(radii.size());
    for (int probe = 0; probe < probes; ++probe) {
        const std::size_t pick = static_cast<std::size_t>(rng.next_below(mu.size()));
        const double* x = mu.coords.data() + pick * static_cast<std::size_t>(n);
        std::fill(masses.begin(), masses.end(), 0.0);
        // One pass over the sample: bin each point into the smallest radius
        // containing it, then prefix-sum. Same values as mass_of_ball per radius.
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const double* p = mu.coords.data() + i * static_cast<std::size_t>(n);
            double sq = 0.0;
            for (int c = 0; c < n; ++c) {
                const double dc = p[c] - x[c];
                sq += dc * dc;
            }
            const double dist = std::sqrt(sq);
            auto it = std::lower_bound(radii.begin(), radii.end(), dist);
            if (it != radii.end()) masses[static_cast<std::size_t>(it - radii.begin())] += mu.weights[i];
        }
        for (std::size_t k = 1; k < masses.size(); ++k) masses[k] += masses[k - 1];

        double probe_lo = std::numeric_limits<double>::infinity();
        double probe_hi = 0.0;
        for (std::size_t k = 0; k < radii.size(); ++k) {
            const double q = masses[k] / std::pow(radii[k], d);
            probe_lo = std::min(probe_lo, q);
            probe_hi = std::max(probe_hi, q);
        }
        rep.c1_hat = std::min(rep.c1_hat, probe_lo);
        rep.c2_hat = std::max(rep.c2_hat, probe_hi);
        const double spread = (probe_lo > 0.0) ? probe_hi / probe_lo
                                               : std::numeric_limits<double>::infinity();
        rep.worst_ratio_low = std::min(rep.worst_ratio_low, spread);
        rep.worst_ratio_high = std::max(rep.worst_ratio_high, spread);
    }
    return rep;
}

IfsSpec parse_ifs_spec(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    IfsSpec spec;
    spec.ambient_dim = j.at("n").get<int>();
    spec.branch_count = j.at("m").get<int>();
    spec.ratio = j.at("r").get<double>();
    spec.translations = j.at("translations").get<std::vector<std::vector<double>>>();
    spec.validate();
    return spec;
}

std::string to_json(const IfsSpec& spec) {
    nlohmann::json j;
    j["n"] = spec.ambient_dim;
    j["m"] = spec.branch_count;
    j["r"] = spec.ratio;
    j["translations"] = spec.translations;
    return j.dump();
}

void write_attractor_csv(const SampledMeasure& mu, std::ostream& out) {
    for (int c = 1; c <= mu.ambient_dim; ++c) out << "x_" << c << ",";
    out << "weight\n";
    char buf[64];
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto p = mu.point(i);
        for (int c = 0; c < mu.ambient_dim; ++c) {
            std::snprintf(buf, sizeof buf, "%.12g", p[c]);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.12g", mu.weights[i]);
        out << buf << '\n';
    }
}

}  // namespace fracdim
