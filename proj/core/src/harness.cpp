#include "fracdim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fracdim/covering.hpp"
#include "fracdim/functions.hpp"

namespace fracdim {

HTheory h_theory(double d, double s) {
    if (!(d > 0.0)) throw std::invalid_argument("h_theory: d must be positive");
    if (!(s > 0.0) || s > 1.0) throw std::invalid_argument("h_theory: s must lie in (0,1]");
    HTheory out;
    if (s < d) {
        out.value = d + 1.0 - s;
        out.branch = "d+1-s";
    } else {
        out.value = d / s;
        out.branch = "d/s";
    }
    return out;
}

namespace {

/// Truncation deep enough that the certified series tail stays below the
/// finest counting scale: rho^{-Js}/(1-rho^{-s}) <= 2^{-(j_hi+4)}.
int auto_truncation(double s, double rho, int j_hi) {
    const double tail_log2 = j_hi + 4.0 + std::log2(1.0 / (1.0 - std::pow(rho, -s)));
    const int needed = static_cast<int>(std::ceil(tail_log2 / (s * std::log2(rho))));
    return std::clamp(needed, kDefaultWeierstrassTruncation, 400);
}

ResultRow run_cell(const ExperimentConfig& cfg, std::uint64_t seed) {
    ResultRow row;
    row.s = cfg.s;
    row.seed = seed;
    row.corrdim_graph = std::numeric_limits<double>::quiet_NaN();
    try {
        const double d = ifs_dimension(cfg.set_spec);
        row.d = d;
        const auto theory = h_theory(d, cfg.s);
        row.H_theory = theory.value;
        row.branch = theory.branch;

        const SampledMeasure mu =
            generate_attractor(cfg.set_spec, cfg.attractor_level, cfg.point_budget);

        std::vector<double> values(mu.size());
        if (cfg.kind == FunctionKind::weierstrass) {
            WeierstrassParams params;
            params.s = cfg.s;
            params.rho = cfg.rho;
            params.truncation = auto_truncation(cfg.s, cfg.rho, cfg.j_range.second);
            params.phases =
                random_phases(cfg.set_spec.ambient_dim, params.truncation, seed);
            for (std::size_t i = 0; i < mu.size(); ++i)
                values[i] = weierstrass_eval(params, mu.point(i)).first;
        } else {
            const int levels = std::max(cfg.j_range.second, 2);
            const WaveletSeries series = make_besov_coefficients(
                cfg.set_spec, cfg.s, levels, BesovMode::signed_random, seed, cfg.point_budget);
            const BesovEvaluator h(series);
            for (std::size_t i = 0; i < mu.size(); ++i) values[i] = h(mu.point(i));
        }

        const GraphCloud graph = graph_cloud_from_values(mu, values);

        if (cfg.est_boxdim) {
            DyadicTally tally;
            tally.ambient_dim = graph.ambient_dim;
            if (cfg.boxdim_filled_columns) {
                for (int j = cfg.j_range.first; j <= cfg.j_range.second; ++j) {
                    tally.levels.push_back(j);
                    tally.counts.push_back(cover_count_graph_values(mu, values, j, 1.0));
                }
            } else {
                tally = tally_boxes(graph, cfg.j_range.first, cfg.j_range.second, cfg.threads);
            }
            const DimensionEstimate est = fit_dimension(tally, cfg.j_range);
            row.boxdim_graph = est.slope;
            row.j_lo = cfg.j_range.first;
            row.j_hi = cfg.j_range.second;
            row.residual = est.residual_rms;
        } else {
            row.boxdim_graph = std::numeric_limits<double>::quiet_NaN();
        }

        if (cfg.est_corrdim) {
            std::vector<double> t_grid;
            for (double t = 0.1; t < d + 1.0 - 1e-9; t += 0.1) t_grid.push_back(t);
            std::vector<CorrelationCurve> curves;
            std::vector<int> levels;
            for (int delta = 4; delta >= 0; delta -= 2) {
                const int lvl = cfg.attractor_level - delta;
                if (lvl < 1) continue;
                const SampledMeasure base =
                    generate_attractor(cfg.set_spec, lvl, cfg.point_budget);
                std::vector<double> vals(base.size());
                if (cfg.kind == FunctionKind::weierstrass) {
                    WeierstrassParams params;
                    params.s = cfg.s;
                    params.rho = cfg.rho;
                    params.truncation = auto_truncation(cfg.s, cfg.rho, cfg.j_range.second);
                    params.phases =
                        random_phases(cfg.set_spec.ambient_dim, params.truncation, seed);
                    for (std::size_t i = 0; i < base.size(); ++i)
                        vals[i] = weierstrass_eval(params, base.point(i)).first;
                } else {
                    const WaveletSeries series = make_besov_coefficients(
                        cfg.set_spec, cfg.s, std::max(cfg.j_range.second, 2),
                        BesovMode::signed_random, seed, cfg.point_budget);
                    const BesovEvaluator h(series);
                    for (std::size_t i = 0; i < base.size(); ++i) vals[i] = h(base.point(i));
                }
                curves.push_back(correlation_integral(graph_cloud_from_values(base, vals),
                                                      t_grid, cfg.corr_pairs,
                                                      seed + 1000 + static_cast<std::uint64_t>(lvl),
                                                      cfg.threads));
                levels.push_back(lvl);
            }
            if (curves.size() >= 3)
                row.corrdim_graph = lower_bound_dimension(curves, levels);
        }
    } catch (const std::exception& e) {
        row.error = e.what();
        row.boxdim_graph = std::numeric_limits<double>::quiet_NaN();
        row.corrdim_graph = std::numeric_limits<double>::quiet_NaN();
        if (row.branch.empty()) row.branch = "error";
    }
    return row;
}

}  // namespace

std::vector<ResultRow> run_sweep(const std::vector<ExperimentConfig>& grid) {
    std::vector<ResultRow> rows;
    for (const auto& cfg : grid)
        for (std::uint64_t seed : cfg.seeds) rows.push_back(run_cell(cfg, seed));
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.s != b.s) return a.s < b.s;
        return a.seed < b.seed;
    });
    return rows;
}

double detect_transition(const std::vector<ResultRow>& rows) {
    std::set<double> s_values;
    double d = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<double, double>> data;  // (s, boxdim_graph)
    for (const auto& row : rows) {
        if (!row.error.empty()) continue;
        if (!std::isfinite(row.boxdim_graph)) continue;
        if (std::isnan(d)) d = row.d;
        if (std::fabs(row.d - d) > 1e-9)
            throw std::invalid_argument("detect_transition: rows must share d");
        s_values.insert(row.s);
        data.emplace_back(row.s, row.boxdim_graph);
    }
    if (s_values.size() < 5)
        throw std::invalid_argument("detect_transition: need >= 5 distinct s values");
    const double s_min = *s_values.begin();
    const double s_max = *s_values.rbegin();
    if (!(s_min < d) || !(s_max > d))
        throw std::invalid_argument("detect_transition: s grid does not straddle the breakpoint");

    // One-parameter breakpoint family y(s) = H(sigma, s); dense grid search.
    const int steps = 2000;
    double best_sigma = s_min;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) {
        const double sigma = s_min + (s_max - s_min) * i / steps;
        if (!(sigma > 0.0)) continue;
        double sse = 0.0;
        for (const auto& [s, y] : data) {
            const double model = (s < sigma) ? sigma + 1.0 - s : sigma / s;
            sse += (y - model) * (y - model);
        }
        if (sse < best_sse) {
            best_sse = sse;
            best_sigma = sigma;
        }
    }
    return best_sigma;
}

namespace {

void append_number(std::string& out, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    out += buf;
}

}  // namespace

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    std::string text = "d,s,seed,boxdim_graph,corrdim_graph,H_theory,branch,j_lo,j_hi,residual\n";
    for (const auto& row : rows) {
        append_number(text, row.d);
        text += ',';
        append_number(text, row.s);
        text += ',';
        text += std::to_string(row.seed);
        text += ',';
        append_number(text, row.boxdim_graph);
        text += ',';
        append_number(text, row.corrdim_graph);
        text += ',';
        append_number(text, row.H_theory);
        text += ',';
        text += row.error.empty() ? row.branch : "error";
        text += ',';
        text += std::to_string(row.j_lo);
        text += ',';
        text += std::to_string(row.j_hi);
        text += ',';
        append_number(text, row.residual);
        text += '\n';
    }
    out << text;
}

void emit_csv_file(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    emit_csv(rows, out);
}

namespace {

struct PlotFrame {
    double s_lo, s_hi, y_lo, y_hi;
    static constexpr double width = 800.0, height = 600.0;
    static constexpr double ml = 70.0, mr = 25.0, mt = 40.0, mb = 55.0;

    double px(double s) const {
        return ml + (s - s_lo) / (s_hi - s_lo) * (width - ml - mr);
    }
    double py(double y) const {
        return height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb);
    }
};

void svg_number(std::string& out, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    out += buf;
}

}  // namespace

void emit_svg(const std::vector<ResultRow>& rows, std::ostream& out) {
    PlotFrame frame{0.0, 1.0, 0.0, 2.0};
    std::set<double> ds;
    bool any = false;
    for (const auto& row : rows) {
        if (!row.error.empty() || !std::isfinite(row.boxdim_graph)) continue;
        if (!any) {
            frame.s_lo = frame.s_hi = row.s;
            frame.y_lo = 0.0;
            frame.y_hi = row.boxdim_graph;
            any = true;
        }
        frame.s_lo = std::min(frame.s_lo, row.s);
        frame.s_hi = std::max(frame.s_hi, row.s);
        frame.y_hi = std::max({frame.y_hi, row.boxdim_graph, row.H_theory});
        ds.insert(row.d);
    }
    if (!any) {
        frame.s_lo = 0.0;
        frame.s_hi = 1.0;
        frame.y_hi = 2.0;
    }
    const double s_pad = std::max(0.05 * (frame.s_hi - frame.s_lo), 0.02);
    frame.s_lo -= s_pad;
    frame.s_hi += s_pad;
    frame.y_hi += 0.3;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    svg += "<text x=\"400\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
           "text-anchor=\"middle\">graph box dimension vs smoothness</text>\n";

    // axes
    svg += "<line x1=\"70.00\" y1=\"545.00\" x2=\"775.00\" y2=\"545.00\" stroke=\"black\"/>\n";
    svg += "<line x1=\"70.00\" y1=\"40.00\" x2=\"70.00\" y2=\"545.00\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 10; ++i) {
        const double s = frame.s_lo + (frame.s_hi - frame.s_lo) * i / 10.0;
        const double y = frame.y_lo + (frame.y_hi - frame.y_lo) * i / 10.0;
        svg += "<line x1=\"";
        svg_number(svg, frame.px(s));
        svg += "\" y1=\"545.00\" x2=\"";
        svg_number(svg, frame.px(s));
        svg += "\" y2=\"550.00\" stroke=\"black\"/>\n<text x=\"";
        svg_number(svg, frame.px(s));
        svg += "\" y=\"566.00\" font-family=\"sans-serif\" font-size=\"11\" "
               "text-anchor=\"middle\">";
        svg_number(svg, s);
        svg += "</text>\n<line x1=\"65.00\" y1=\"";
        svg_number(svg, frame.py(y));
        svg += "\" x2=\"70.00\" y2=\"";
        svg_number(svg, frame.py(y));
        svg += "\" stroke=\"black\"/>\n<text x=\"60.00\" y=\"";
        svg_number(svg, frame.py(y) + 4.0);
        svg += "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">";
        svg_number(svg, y);
        svg += "</text>\n";
    }
    svg += "<text x=\"422.00\" y=\"592.00\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\">s</text>\n";

    // theory curves H(d, .)
    for (double d : ds) {
        svg += "<polyline fill=\"none\" stroke=\"#cc3311\" stroke-width=\"1.5\" points=\"";
        const int samples = 200;
        for (int i = 0; i <= samples; ++i) {
            double s = frame.s_lo + (frame.s_hi - frame.s_lo) * i / samples;
            s = std::clamp(s, 1e-6, 1.0);
            const double h = std::min(d + 1.0 - s, d / s);
            svg_number(svg, frame.px(s));
            svg += ',';
            svg_number(svg, frame.py(h));
            svg += ' ';
        }
        svg += "\"/>\n";
    }

    // scatter
    for (const auto& row : rows) {
        if (!row.error.empty() || !std::isfinite(row.boxdim_graph)) continue;
        svg += "<circle cx=\"";
        svg_number(svg, frame.px(row.s));
        svg += "\" cy=\"";
        svg_number(svg, frame.py(row.boxdim_graph));
        svg += "\" r=\"4\" fill=\"#4477aa\" fill-opacity=\"0.8\"/>\n";
    }
    svg += "</svg>\n";
    out << svg;
}

void emit_svg_file(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_svg: cannot open " + path);
    emit_svg(rows, out);
}

namespace {

IfsSpec spec_from_json(const nlohmann::json& j) {
    IfsSpec spec;
    spec.ambient_dim = j.at("n").get<int>();
    spec.branch_count = j.at("m").get<int>();
    spec.ratio = j.at("r").get<double>();
    spec.translations = j.at("translations").get<std::vector<std::vector<double>>>();
    spec.validate();
    return spec;
}

ExperimentConfig config_from_json(const nlohmann::json& j, double s) {
    ExperimentConfig cfg;
    cfg.set_spec = spec_from_json(j.at("set"));
    const std::string kind = j.value("function_kind", std::string("weierstrass"));
    if (kind == "weierstrass")
        cfg.kind = FunctionKind::weierstrass;
    else if (kind == "besov-synth")
        cfg.kind = FunctionKind::besov_synth;
    else
        throw std::invalid_argument("config: unknown function_kind " + kind);
    cfg.s = s;
    cfg.rho = j.value("rho", 2.0);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.attractor_level = j.value("attractor_level", 10);
    if (j.contains("j_range")) {
        const auto r = j.at("j_range").get<std::vector<int>>();
        if (r.size() != 2) throw std::invalid_argument("config: j_range must be [lo, hi]");
        cfg.j_range = {r[0], r[1]};
    }
    if (j.contains("estimators")) {
        const auto& e = j.at("estimators");
        cfg.est_boxdim = e.value("boxdim", true);
        cfg.est_corrdim = e.value("corrdim", false);
        cfg.est_premeasure = e.value("premeasure", false);
    }
    cfg.boxdim_filled_columns = j.value("boxdim_filled_columns", false);
    cfg.threads = j.value("threads", 1);
    cfg.corr_pairs = j.value("corr_pairs", std::int64_t{200000});
    cfg.point_budget = j.value("point_budget", kDefaultPointBudget);
    return cfg;
}

}  // namespace

std::vector<ExperimentConfig> parse_sweep_config(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    std::vector<double> s_values;
    if (j.contains("s_values"))
        s_values = j.at("s_values").get<std::vector<double>>();
    else
        s_values.push_back(j.at("s").get<double>());
    std::vector<ExperimentConfig> grid;
    grid.reserve(s_values.size());
    for (double s : s_values) grid.push_back(config_from_json(j, s));
    return grid;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    return config_from_json(j, j.at("s").get<double>());
}

}  // namespace fracdim
