#include "fracdim/covering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "grid_detail.hpp"

namespace fracdim {

namespace {

struct CellAccum {
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    double sup_abs = 0.0;
};

/// Groups sample points into grid cells of side 1/scale and accumulates
/// per-cell extremes. Ordered map keeps reductions deterministic by cell index.
std::map<std::vector<std::int64_t>, CellAccum> accumulate_cells(
    const SampledMeasure& mu, std::span<const double> target_values,
    std::span<const double> h1_values, double scale) {
    const int n = mu.ambient_dim;
    std::map<std::vector<std::int64_t>, CellAccum> cells;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto p = mu.point(i);
        for (int c = 0; c < n; ++c)
            idx[static_cast<std::size_t>(c)] = detail::cell_index(p[c], scale);
        CellAccum& acc = cells[idx];
        if (!target_values.empty()) {
            acc.vmin = std::min(acc.vmin, target_values[i]);
            acc.vmax = std::max(acc.vmax, target_values[i]);
        }
        if (!h1_values.empty()) acc.sup_abs = std::max(acc.sup_abs, std::fabs(h1_values[i]));
    }
    return cells;
}

std::vector<double> evaluate_all(const PointFunction& f, const SampledMeasure& mu) {
    std::vector<double> values(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) values[i] = f(mu.point(i));
    return values;
}

}  // namespace

CellFunctionView make_cell_view(const SampledMeasure& mu, std::span<const double> target_values,
                                std::span<const double> h1_values, int level) {
    if (mu.size() == 0) throw std::invalid_argument("make_cell_view: empty sample");
    if (!target_values.empty() && target_values.size() != mu.size())
        throw std::invalid_argument("make_cell_view: one target value per point required");
    if (!h1_values.empty() && h1_values.size() != mu.size())
        throw std::invalid_argument("make_cell_view: one h1 value per point required");

    CellFunctionView view;
    view.level = level;
    const auto cells = accumulate_cells(mu, target_values, h1_values, std::exp2(level));
    view.cells.reserve(cells.size());
    for (const auto& [idx, acc] : cells) {
        CellFunctionView::CellStats stats;
        stats.cell = idx;
        stats.sup_abs = acc.sup_abs;
        stats.osc = target_values.empty() ? 0.0 : acc.vmax - acc.vmin;
        view.cells.push_back(std::move(stats));
    }
    return view;
}

std::int64_t aggregation_added_count(const CellFunctionView& view) {
    const double factor = std::exp2(view.level + 1);
    double total = 0.0;
    for (const auto& cell : view.cells) total += factor * cell.sup_abs + 2.0;
    return static_cast<std::int64_t>(std::ceil(total - 1e-9));
}

double oscillation_sum_values(const SampledMeasure& mu, std::span<const double> values,
                              int level) {
    if (mu.size() == 0) throw std::invalid_argument("oscillation_sum: empty sample");
    if (values.size() != mu.size())
        throw std::invalid_argument("oscillation_sum: one value per point required");
    if (mu.resolution > 0.0 && std::exp2(-level) < mu.resolution)
        throw std::invalid_argument("oscillation_sum: grid finer than the sample resolution");
    const auto cells = accumulate_cells(mu, values, {}, std::exp2(level));
    double sum = 0.0;
    for (const auto& [idx, acc] : cells) sum += acc.vmax - acc.vmin;
    return sum;
}

double oscillation_sum(const PointFunction& f, const SampledMeasure& mu, int level) {
    return oscillation_sum_values(mu, evaluate_all(f, mu), level);
}

std::int64_t cover_count_graph_values(const SampledMeasure& mu, std::span<const double> values,
                                      int level, double sigma) {
    if (!(sigma > 0.0) || sigma > 1.0)
        throw std::invalid_argument("cover_count_graph: sigma must lie in (0,1]");
    if (mu.size() == 0) throw std::invalid_argument("cover_count_graph: empty sample");
    if (values.size() != mu.size())
        throw std::invalid_argument("cover_count_graph: one value per point required");

    const double base_scale = std::exp2(static_cast<double>(level) / sigma);
    if (mu.resolution > 0.0 && 1.0 / base_scale < mu.resolution)
        throw std::invalid_argument("cover_count_graph: base grid finer than the sample");
    const auto cells = accumulate_cells(mu, values, {}, base_scale);
    const double height_scale = std::exp2(level);
    double total = 0.0;
    for (const auto& [idx, acc] : cells) total += height_scale * (acc.vmax - acc.vmin) + 1.0;
    if (sigma < 1.0) total *= std::exp2(mu.ambient_dim + 1);
    return static_cast<std::int64_t>(std::ceil(total - 1e-9));
}

std::int64_t cover_count_graph(const PointFunction& f, const SampledMeasure& mu, int level,
                               double sigma) {
    return cover_count_graph_values(mu, evaluate_all(f, mu), level, sigma);
}

PremeasureBound premeasure_upper_bound(const WaveletSeries& series, const SampledMeasure& mu,
                                       double t, int j1, int j2) {
    if (j1 < 2 || j2 <= j1)
        throw std::invalid_argument("premeasure_upper_bound: requires j2 > j1 >= 2");
    const double d = series.target_d;
    if (!(t > d))
        throw std::invalid_argument(
            "premeasure_upper_bound: bound vacuous for t <= d (first term diverges)");
    if (mu.size() == 0) throw std::invalid_argument("premeasure_upper_bound: empty sample");

    PremeasureBound bound;
    bound.t = t;
    bound.j1 = j1;
    bound.j2 = j2;

    for (int j = j1; j < j2; ++j) bound.geometry_term += std::exp2(-j * (t - d));

    // h0 = levels 1 .. j1-1 restricted to the sampled support.
    const BesovEvaluator h0(series, j1);
    std::vector<double> h0_values(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) h0_values[i] = h0(mu.point(i));
    const double osc = oscillation_sum_values(mu, h0_values, j1 - 1);
    bound.oscillation_term = std::exp2(-j1 * (t - 1.0)) * osc;

    for (int j = j1; j < j2; ++j)
        bound.coefficient_term += std::exp2(-j * (t - 1.0)) * series.level_abs_sum(j);

    bound.total = bound.geometry_term + bound.oscillation_term + bound.coefficient_term;

    double tail = 0.0;
    for (int j = j2; j <= series.max_level(); ++j) tail += series.level_abs_sum(j);
    bound.tail_sup_bound = tail;  // sup|psi| = 1 for the poly bump
    return bound;
}

void write_premeasure_csv(std::span<const PremeasureBound> rows, std::ostream& out) {
    out << "t,j1,j2,term1,term2,term3,total\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.6g,%d,%d,%.6g,%.6g,%.6g,%.6g\n", row.t, row.j1,
                      row.j2, row.geometry_term, row.oscillation_term, row.coefficient_term,
                      row.total);
        out << buf;
    }
}

}  // namespace fracdim
