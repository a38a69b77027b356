#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fracdim/functions.hpp"
#include "fracdim/geometry.hpp"

namespace fracdim {

/// Per-cell view of a function restricted to the sampled support, on the grid
/// of side 2^-level (indices round(2^level x)). Only occupied cells appear.
struct CellFunctionView {
    struct CellStats {
        std::vector<std::int64_t> cell;
        double sup_abs = 0.0;  ///< sup of |h1| over the cell's sample points
        double osc = 0.0;      ///< max - min of the target over the cell's sample points
    };

    int level = 0;
    std::vector<CellStats> cells;
};

/// Builds the view from sampled values: target_values feed `osc`, h1_values
/// feed `sup_abs`. Either span may be empty (the matching field stays 0).
CellFunctionView make_cell_view(const SampledMeasure& mu, std::span<const double> target_values,
                                std::span<const double> h1_values, int level);

/// Upper bound, ceil(sum over cells of (2^{l+1} sup|h1| + 2)), on the number
/// of (n+1)-cubes of side 2^-l added when the term h1 joins the function being
/// covered.
std::int64_t aggregation_added_count(const CellFunctionView& view);

/// Sum over occupied cells of (max - min) of f on the cell's sample points.
/// Requires the grid to resolve the sample: 2^-level >= mu.resolution.
double oscillation_sum(const PointFunction& f, const SampledMeasure& mu, int level);
double oscillation_sum_values(const SampledMeasure& mu, std::span<const double> values,
                              int level);

/// Graph covering count by (n+1)-cubes of side 2^-level. sigma = 1 covers over
/// base cells of the same side; sigma < 1 uses base cells of side 2^-level/sigma
/// with unit-height parallelepipeds, each converted to at most 2^{n+1} cubes.
std::int64_t cover_count_graph(const PointFunction& f, const SampledMeasure& mu, int level,
                               double sigma);
std::int64_t cover_count_graph_values(const SampledMeasure& mu, std::span<const double> values,
                                      int level, double sigma);

/// Three-term upper bound on the t-dimensional pre-measure of the graph of the
/// synthesized series at covering scale sqrt(n+1) * 2^{-j1+1}:
///   geometry     sum_{j=j1}^{j2-1} 2^{-j(t-d)}
///   oscillation  2^{-j1(t-1)} * oscillation_sum(h0, grid level j1-1),
///                h0 = series levels 1..j1-1 on mu's points
///   coefficient  sum_{j=j1}^{j2-1} 2^{-j(t-1)} sum_m |lambda_jm|
/// Multiplicative constants are set to 1. tail_sup_bound reports
/// sup|psi| * sum_{j>=j2} sum_m |lambda_jm|, the exact bound on the dropped
/// tail sup, so callers can check the smallness condition for their j2.
struct PremeasureBound {
    double t = 0.0;
    int j1 = 2;
    int j2 = 3;
    double geometry_term = 0.0;
    double oscillation_term = 0.0;
    double coefficient_term = 0.0;
    double total = 0.0;
    double tail_sup_bound = 0.0;
};

PremeasureBound premeasure_upper_bound(const WaveletSeries& series, const SampledMeasure& mu,
                                       double t, int j1, int j2);

/// CSV rows (t, j1, j2, term1, term2, term3, total).
void write_premeasure_csv(std::span<const PremeasureBound> rows, std::ostream& out);

}  // namespace fracdim
