#include "fracdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fracdim/rng.hpp"
#include "grid_detail.hpp"

namespace fracdim {

namespace {

/// Occupancy count at one level, packed fast path. Range [begin, end) of points.
void collect_packed(const SampledMeasure& cloud, double scale, std::size_t begin,
                    std::size_t end, const detail::KeyPacker& packer, detail::PackedSet& out) {
    const int n = cloud.ambient_dim;
    std::int64_t idx[8];
    for (std::size_t i = begin; i < end; ++i) {
        const double* p = cloud.coords.data() + i * static_cast<std::size_t>(n);
        for (int c = 0; c < n; ++c) idx[c] = detail::cell_index(p[c], scale);
        out.insert(packer.pack({idx, static_cast<std::size_t>(n)}));
    }
}

void collect_vector(const SampledMeasure& cloud, double scale, std::size_t begin,
                    std::size_t end, detail::VectorSet& out) {
    const int n = cloud.ambient_dim;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
    for (std::size_t i = begin; i < end; ++i) {
        const double* p = cloud.coords.data() + i * static_cast<std::size_t>(n);
        for (int c = 0; c < n; ++c)
            idx[static_cast<std::size_t>(c)] = detail::cell_index(p[c], scale);
        out.insert(idx);
    }
}

bool packable(const SampledMeasure& cloud, double scale, const detail::KeyPacker& packer) {
    if (cloud.ambient_dim > 8) return false;
    // Index magnitude is bounded by the coordinate extremes; checking the
    // bounding box once is enough.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double c : cloud.coords) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    return packer.fits(detail::cell_index(lo, scale)) &&
           packer.fits(detail::cell_index(hi, scale));
}

double log2_count(std::int64_t c) { return std::log2(static_cast<double>(c)); }

}  // namespace

DyadicTally tally_boxes(const SampledMeasure& cloud, int j_min, int j_max, int threads) {
    if (cloud.size() == 0) throw std::invalid_argument("tally_boxes: empty point cloud");
    if (j_max - j_min < 2) throw std::invalid_argument("tally_boxes: need j_max - j_min >= 2");
    if (j_min < 0) throw std::invalid_argument("tally_boxes: j_min must be >= 0");
    if (threads < 1) threads = 1;

    DyadicTally tally;
    tally.ambient_dim = cloud.ambient_dim;
    const detail::KeyPacker packer(cloud.ambient_dim);

    for (int j = j_min; j <= j_max; ++j) {
        const double scale = std::exp2(j);
        std::int64_t count = 0;
        const std::size_t total = cloud.size();
        const int nthreads =
            static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads),
                                                   std::max<std::size_t>(total / 4096, 1)));
        if (packable(cloud, scale, packer)) {
            if (nthreads <= 1) {
                detail::PackedSet set;
                set.reserve(total / 2);
                collect_packed(cloud, scale, 0, total, packer, set);
                count = static_cast<std::int64_t>(set.size());
            } else {
                std::vector<std::future<detail::PackedSet>> futs;
                const std::size_t chunk = (total + nthreads - 1) / nthreads;
                for (int t = 0; t < nthreads; ++t) {
                    const std::size_t b = static_cast<std::size_t>(t) * chunk;
                    const std::size_t e = std::min(total, b + chunk);
                    futs.push_back(std::async(std::launch::async, [&, b, e] {
                        detail::PackedSet set;
                        collect_packed(cloud, scale, b, e, packer, set);
                        return set;
                    }));
                }
                detail::PackedSet merged;
                for (auto& f : futs) {
                    auto part = f.get();
                    merged.merge(part);
                }
                count = static_cast<std::int64_t>(merged.size());
            }
        } else {
            detail::VectorSet set;
            collect_vector(cloud, scale, 0, total, set);
            count = static_cast<std::int64_t>(set.size());
        }
        tally.levels.push_back(j);
        tally.counts.push_back(count);
    }
    return tally;
}

DimensionEstimate fit_dimension(const DyadicTally& tally, std::pair<int, int> j_range) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < tally.levels.size(); ++i) {
        const int j = tally.levels[i];
        if (j < j_range.first || j > j_range.second) continue;
        xs.push_back(j);
        ys.push_back(log2_count(tally.counts[i]));
    }
    if (xs.size() < 3)
        throw std::invalid_argument("fit_dimension: fewer than 3 levels in range");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    DimensionEstimate est;
    est.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    est.intercept = (sy - est.slope * sx) / k;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (est.intercept + est.slope * xs[i]);
        ss += r * r;
    }
    est.residual_rms = std::sqrt(ss / k);
    est.j_range = j_range;
    est.valid = est.slope >= 0.0 && est.slope <= tally.ambient_dim + 0.2;
    return est;
}

std::pair<int, int> default_fit_range(const DyadicTally& tally, double resolution) {
    if (tally.levels.size() < 3) throw std::invalid_argument("default_fit_range: tally too short");
    int lo = tally.levels.front() + 2;
    int hi = tally.levels.back();
    if (resolution > 0.0) {
        const int cap = static_cast<int>(std::floor(-std::log2(4.0 * resolution)));
        hi = std::min(hi, cap);
    }
    if (hi - lo < 2) lo = std::max(tally.levels.front(), hi - 2);
    if (hi - lo < 2)
        throw std::invalid_argument("default_fit_range: no usable range (sample too coarse)");
    return {lo, hi};
}

GraphCloud graph_cloud(const SampledMeasure& mu, const PointFunction& f) {
    std::vector<double> values(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) values[i] = f(mu.point(i));
    return graph_cloud_from_values(mu, values);
}

GraphCloud graph_cloud_from_values(const SampledMeasure& mu, std::span<const double> values) {
    if (values.size() != mu.size())
        throw std::invalid_argument("graph_cloud: one value per point required");
    GraphCloud g;
    g.ambient_dim = mu.ambient_dim + 1;
    g.level = mu.level;
    g.total_mass = mu.total_mass;
    g.resolution = mu.resolution;
    g.cell_model = CellModel::atoms;  // function values are not cell-uniform
    g.weights = mu.weights;
    g.coords.resize(mu.size() * static_cast<std::size_t>(g.ambient_dim));
    const int n = mu.ambient_dim;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double* src = mu.coords.data() + i * static_cast<std::size_t>(n);
        double* dst = g.coords.data() + i * static_cast<std::size_t>(n + 1);
        for (int c = 0; c < n; ++c) dst[c] = src[c];
        dst[n] = values[i];
    }
    return g;
}

namespace {

struct WeightSampler {
    const SampledMeasure& mu;
    bool uniform;
    std::vector<double> cdf;

    explicit WeightSampler(const SampledMeasure& m) : mu(m) {
        uniform = true;
        const double w0 = mu.weights.empty() ? 0.0 : mu.weights.front();
        for (double w : mu.weights)
            if (w != w0) {
                uniform = false;
                break;
            }
        if (!uniform) {
            cdf.resize(mu.size());
            double acc = 0.0;
            for (std::size_t i = 0; i < mu.size(); ++i) {
                acc += mu.weights[i];
                cdf[i] = acc;
            }
        }
    }

    std::size_t draw(SplitMix64& rng) const {
        if (uniform) return static_cast<std::size_t>(rng.next_below(mu.size()));
        const double u = rng.next_double() * cdf.back();
        return static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
};

}  // namespace

namespace {

/// Pair kernel for mass spread uniformly over cells of side h on the line:
/// the double box convolution of |z|^-t, exact at every atom separation.
/// Valid for t in [0, 1); the smoothed pair integral diverges at t >= 1.
double uniform_cell_kernel(double delta, double h, double t) {
    const double num = std::pow(std::fabs(delta + h), 2.0 - t) -
                       2.0 * std::pow(std::fabs(delta), 2.0 - t) +
                       std::pow(std::fabs(delta - h), 2.0 - t);
    return num / (h * h * (1.0 - t) * (2.0 - t));
}

}  // namespace

CorrelationCurve correlation_integral(const SampledMeasure& mu, std::vector<double> t_values,
                                      std::int64_t pair_count, std::uint64_t seed, int threads) {
    if (mu.size() < 2) throw std::invalid_argument("correlation_integral: need >= 2 points");
    if (pair_count < 10000)
        throw std::invalid_argument("correlation_integral: pair_count must be >= 10^4");
    if (t_values.empty()) throw std::invalid_argument("correlation_integral: empty t grid");
    if (threads < 1) threads = 1;

    const bool smoothed = mu.cell_model == CellModel::uniform_cell;
    if (smoothed) {
        if (mu.ambient_dim != 1)
            throw std::invalid_argument(
                "correlation_integral: uniform_cell smoothing is implemented for dim 1");
        if (!(mu.resolution > 0.0))
            throw std::invalid_argument(
                "correlation_integral: uniform_cell requires a positive resolution");
        for (double t : t_values)
            if (t >= 1.0 - 1e-12)
                throw std::invalid_argument(
                    "correlation_integral: smoothed pair integral diverges for t >= 1");
    }

    const int n = mu.ambient_dim;
    const std::size_t nt = t_values.size();
    const WeightSampler sampler(mu);
    const SplitMix64 master(seed);
    const std::int64_t nblocks = (pair_count + kCorrelationBlockSize - 1) / kCorrelationBlockSize;

    // Per-block partial sums, reduced in block order afterwards: identical
    // results for any thread count.
    std::vector<std::vector<double>> block_sums(static_cast<std::size_t>(nblocks));
    std::vector<std::uint8_t> block_failed(static_cast<std::size_t>(nblocks), 0);

    auto run_block = [&](std::int64_t b) {
        SplitMix64 rng = master.split(static_cast<std::uint64_t>(b));
        const std::int64_t begin = b * kCorrelationBlockSize;
        const std::int64_t end = std::min(pair_count, begin + kCorrelationBlockSize);
        std::vector<double> sums(nt, 0.0);
        for (std::int64_t pair = begin; pair < end; ++pair) {
            double dist = 0.0;
            bool ok = false;
            for (int attempt = 0; attempt < kCoincidentRedrawLimit; ++attempt) {
                const std::size_t a = sampler.draw(rng);
                const std::size_t bb = sampler.draw(rng);
                const double* pa = mu.coords.data() + a * static_cast<std::size_t>(n);
                const double* pb = mu.coords.data() + bb * static_cast<std::size_t>(n);
                double sq = 0.0;
                for (int c = 0; c < n; ++c) sq += (pa[c] - pb[c]) * (pa[c] - pb[c]);
                if (sq > 0.0) {
                    dist = std::sqrt(sq);
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                block_failed[static_cast<std::size_t>(b)] = 1;
                return;
            }
            if (smoothed) {
                for (std::size_t k = 0; k < nt; ++k)
                    sums[k] += uniform_cell_kernel(dist, mu.resolution, t_values[k]);
            } else {
                const double ld = std::log(dist);
                for (std::size_t k = 0; k < nt; ++k) sums[k] += std::exp(-t_values[k] * ld);
            }
        }
        block_sums[static_cast<std::size_t>(b)] = std::move(sums);
    };

    if (threads <= 1 || nblocks == 1) {
        for (std::int64_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<std::int64_t> next{0};
        const int workers = static_cast<int>(std::min<std::int64_t>(threads, nblocks));
        for (int t = 0; t < workers; ++t) {
            futs.push_back(std::async(std::launch::async, [&] {
                for (std::int64_t b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1))
                    run_block(b);
            }));
        }
        for (auto& f : futs) f.get();
    }

    for (std::int64_t b = 0; b < nblocks; ++b)
        if (block_failed[static_cast<std::size_t>(b)])
            throw std::runtime_error("correlation_integral: all-coincident degenerate measure");

    CorrelationCurve curve;
    curve.t_values = std::move(t_values);
    curve.pair_count = pair_count;
    curve.seed = seed;
    curve.sums.assign(nt, 0.0);
    for (std::int64_t b = 0; b < nblocks; ++b)
        for (std::size_t k = 0; k < nt; ++k)
            curve.sums[k] += block_sums[static_cast<std::size_t>(b)][k];
    const double w = mu.total_mass;
    for (std::size_t k = 0; k < nt; ++k)
        curve.sums[k] *= w * w / static_cast<double>(pair_count);
    if (smoothed) {
        // The rejected same-atom stratum carries real sub-resolution pair
        // mass under the cell model; it integrates in closed form.
        double q = 0.0;
        for (double wi : mu.weights) q += (wi / w) * (wi / w);
        for (std::size_t k = 0; k < nt; ++k) {
            const double diag = uniform_cell_kernel(0.0, mu.resolution, curve.t_values[k]);
            curve.sums[k] = curve.sums[k] * (1.0 - q) + w * w * q * diag;
        }
    }
    return curve;
}

double lower_bound_dimension(const std::vector<CorrelationCurve>& curves,
                             const std::vector<int>& resolution_levels) {
    if (curves.size() < 3)
        throw std::invalid_argument("lower_bound_dimension: need >= 3 resolutions");
    if (curves.size() != resolution_levels.size())
        throw std::invalid_argument("lower_bound_dimension: one level per curve required");
    const auto& ts = curves.front().t_values;
    for (const auto& c : curves)
        if (c.t_values != ts)
            throw std::invalid_argument("lower_bound_dimension: curves must share the t grid");
    for (std::size_t i = 1; i < resolution_levels.size(); ++i)
        if (resolution_levels[i] <= resolution_levels[i - 1])
            throw std::invalid_argument("lower_bound_dimension: levels must increase");

    double best = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        bool stable = true;
        for (std::size_t i = 1; i < curves.size(); ++i) {
            const double prev = curves[i - 1].sums[k];
            const double cur = curves[i].sums[k];
            if (!(prev > 0.0) || !std::isfinite(cur)) {
                stable = false;
                break;
            }
            const double allowed =
                std::pow(1.1, resolution_levels[i] - resolution_levels[i - 1]);
            if (cur / prev >= allowed) {
                stable = false;
                break;
            }
        }
        if (stable) best = std::max(best, ts[k]);
    }
    return best;
}

std::pair<double, double> radial_profile_check(const SampledMeasure& mu, double d, double u,
                                               int probe_count, std::uint64_t seed) {
    if (mu.size() == 0) throw std::invalid_argument("radial_profile_check: empty measure");
    if (u < 0.0 || u >= d)
        throw std::invalid_argument("radial_profile_check: requires 0 <= u < d");
    if (probe_count < 1) throw std::invalid_argument("radial_profile_check: need >= 1 probe");

    const double diam = cloud_diameter(mu);
    if (!(diam > 0.0)) throw std::invalid_argument("radial_profile_check: degenerate support");
    const double reference = std::pow(diam, d - u) / (d - u);

    const int n = mu.ambient_dim;
    SplitMix64 rng(seed);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int probe = 0; probe < probe_count; ++probe) {
        const std::size_t pick = static_cast<std::size_t>(rng.next_below(mu.size()));
        const double* y = mu.coords.data() + pick * static_cast<std::size_t>(n);
        double integral = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const double* p = mu.coords.data() + i * static_cast<std::size_t>(n);
            double sq = 0.0;
            for (int c = 0; c < n; ++c) sq += (p[c] - y[c]) * (p[c] - y[c]);
            if (sq > 0.0) {
                integral += mu.weights[i] * std::pow(sq, -0.5 * u);
            } else if (u == 0.0) {
                integral += mu.weights[i];  // |x-y|^0 = 1 on the diagonal too
            }
        }
        const double ratio = integral / reference;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {lo, hi};
}

void write_tally_csv(const DyadicTally& tally, std::ostream& out) {
    out << "j,N_j\n";
    for (std::size_t i = 0; i < tally.levels.size(); ++i)
        out << tally.levels[i] << ',' << tally.counts[i] << '\n';
}

void write_curve_csv(const CorrelationCurve& curve, std::ostream& out) {
    out << "t,sum,pair_count\n";
    char buf[64];
    for (std::size_t i = 0; i < curve.t_values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,", curve.t_values[i], curve.sums[i]);
        out << buf << curve.pair_count << '\n';
    }
}

}  // namespace fracdim
