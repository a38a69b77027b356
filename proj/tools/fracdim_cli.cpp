// fracdim command line: set generation, dimension estimation, sweeps.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracdim/covering.hpp"
#include "fracdim/dimension.hpp"
#include "fracdim/functions.hpp"
#include "fracdim/geometry.hpp"
#include "fracdim/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

struct GlobalOpts {
    std::string config;
    std::string out;
    std::uint64_t seed = 1;
    int threads = 1;
};

fracdim::ExperimentConfig load_experiment(const GlobalOpts& g) {
    auto cfg = fracdim::parse_experiment_config(read_file(g.config));
    cfg.threads = g.threads;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracdim: box-counting and correlation dimension laboratory for "
                 "self-similar sets and rough functions on them"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config, "JSON config file");
    app.add_option("--seed", g.seed, "master seed (default 1)");
    app.add_option("--out", g.out, "output file path");
    app.add_option("--threads", g.threads, "worker threads for the counting kernels");
    app.fallthrough();

    // gen-set
    auto* gen = app.add_subcommand("gen-set", "sample an IFS attractor to CSV");
    int gen_level = 8;
    gen->add_option("--level", gen_level, "generation depth (m^level points)");

    // boxdim
    auto* box = app.add_subcommand("boxdim", "box-counting dimension of an IFS attractor");
    int box_level = 10;
    int box_jmin = 1, box_jmax = -1;
    box->add_option("--level", box_level, "attractor level");
    box->add_option("--jmin", box_jmin, "coarsest dyadic level");
    box->add_option("--jmax", box_jmax, "finest dyadic level (default: from resolution)");

    // corrdim
    auto* corr = app.add_subcommand("corrdim", "correlation-integral lower bound");
    std::vector<int> corr_levels{10, 12, 14};
    double corr_tmin = 0.05, corr_tmax = 0.95, corr_tstep = 0.05;
    std::int64_t corr_pairs = 200000;
    corr->add_option("--levels", corr_levels, "attractor levels (increasing resolutions)");
    corr->add_option("--tmin", corr_tmin, "smallest exponent t");
    corr->add_option("--tmax", corr_tmax, "largest exponent t");
    corr->add_option("--tstep", corr_tstep, "t grid step");
    corr->add_option("--pairs", corr_pairs, "sampled pairs per curve");

    // graphdim
    auto* graph = app.add_subcommand("graphdim", "box dimension of a function graph over the set");

    // premeasure
    auto* pre =
        app.add_subcommand("premeasure", "pre-measure upper bounds for a synthesized series");
    double pre_t = -1.0;
    int pre_j1min = 3, pre_j1max = 8, pre_window = 4;
    pre->add_option("--t", pre_t, "exponent t (default d+1-s+0.1)");
    pre->add_option("--j1min", pre_j1min, "first covering scale");
    pre->add_option("--j1max", pre_j1max, "last covering scale");
    pre->add_option("--j2-window", pre_window, "j2 = j1 + window");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run a (d, s, seed) sweep and emit CSV/SVG");
    std::string sweep_svg;
    sweep->add_option("--svg", sweep_svg, "also write an SVG scatter plot");

    // transition
    auto* trans = app.add_subcommand("transition", "locate the phase-transition breakpoint in s");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto spec = fracdim::parse_ifs_spec(read_file(g.config));
            const auto mu = fracdim::generate_attractor(spec, gen_level);
            if (g.out.empty()) {
                fracdim::write_attractor_csv(mu, std::cout);
            } else {
                auto out = open_out(g.out);
                fracdim::write_attractor_csv(mu, out);
            }
            return 0;
        }

        if (box->parsed()) {
            const auto spec = fracdim::parse_ifs_spec(read_file(g.config));
            const auto mu = fracdim::generate_attractor(spec, box_level);
            if (box_jmax < 0)
                box_jmax = static_cast<int>(std::floor(-std::log2(4.0 * mu.resolution)));
            const auto tally = fracdim::tally_boxes(mu, box_jmin, box_jmax, g.threads);
            const auto range = fracdim::default_fit_range(tally, mu.resolution);
            const auto est = fracdim::fit_dimension(tally, range);
            std::printf("boxdim slope=%.6g intercept=%.6g residual=%.6g j=[%d,%d] valid=%d\n",
                        est.slope, est.intercept, est.residual_rms, range.first, range.second,
                        est.valid ? 1 : 0);
            if (!g.out.empty()) {
                auto out = open_out(g.out);
                fracdim::write_tally_csv(tally, out);
            }
            return 0;
        }

        if (corr->parsed()) {
            const auto spec = fracdim::parse_ifs_spec(read_file(g.config));
            std::vector<double> ts;
            for (double t = corr_tmin; t <= corr_tmax + 1e-12; t += corr_tstep) ts.push_back(t);
            std::vector<fracdim::CorrelationCurve> curves;
            for (std::size_t i = 0; i < corr_levels.size(); ++i) {
                const auto mu = fracdim::generate_attractor(spec, corr_levels[i]);
                curves.push_back(
                    fracdim::correlation_integral(mu, ts, corr_pairs, g.seed + i, g.threads));
                std::printf("level %d: sum(t=%.3g)=%.6g .. sum(t=%.3g)=%.6g\n", corr_levels[i],
                            ts.front(), curves.back().sums.front(), ts.back(),
                            curves.back().sums.back());
            }
            const double t_star = fracdim::lower_bound_dimension(curves, corr_levels);
            std::printf("corrdim t_star=%.6g\n", t_star);
            if (!g.out.empty()) {
                auto out = open_out(g.out);
                fracdim::write_curve_csv(curves.back(), out);
            }
            return 0;
        }

        if (graph->parsed()) {
            auto cfg = load_experiment(g);
            cfg.seeds = {g.seed};
            const auto rows = fracdim::run_sweep({cfg});
            const auto& row = rows.front();
            if (!row.error.empty()) {
                std::fprintf(stderr, "error: %s\n", row.error.c_str());
                return 1;
            }
            std::printf("graphdim d=%.6g s=%.6g boxdim_graph=%.6g H_theory=%.6g branch=%s "
                        "j=[%d,%d] residual=%.6g\n",
                        row.d, row.s, row.boxdim_graph, row.H_theory, row.branch.c_str(),
                        row.j_lo, row.j_hi, row.residual);
            if (!g.out.empty()) fracdim::emit_csv_file(rows, g.out);
            return 0;
        }

        if (pre->parsed()) {
            const auto cfg = load_experiment(g);
            const double d = fracdim::ifs_dimension(cfg.set_spec);
            const auto series = fracdim::make_besov_coefficients(
                cfg.set_spec, cfg.s, pre_j1max + pre_window, fracdim::BesovMode::deterministic,
                g.seed, cfg.point_budget);
            const auto mu =
                fracdim::generate_attractor(cfg.set_spec, cfg.attractor_level, cfg.point_budget);
            const double t = pre_t > 0.0 ? pre_t : d + 1.0 - cfg.s + 0.1;
            std::vector<fracdim::PremeasureBound> bounds;
            for (int j1 = pre_j1min; j1 <= pre_j1max; ++j1) {
                bounds.push_back(
                    fracdim::premeasure_upper_bound(series, mu, t, j1, j1 + pre_window));
                const auto& b = bounds.back();
                std::printf("j1=%d j2=%d t=%.6g terms=(%.6g, %.6g, %.6g) total=%.6g tail=%.6g "
                            "normalized=%.6g\n",
                            b.j1, b.j2, b.t, b.geometry_term, b.oscillation_term,
                            b.coefficient_term, b.total, b.tail_sup_bound,
                            b.total * std::exp2(b.j1 * (t - d + cfg.s - 1.0)) / b.j1);
            }
            if (!g.out.empty()) {
                auto out = open_out(g.out);
                fracdim::write_premeasure_csv(bounds, out);
            }
            return 0;
        }

        if (sweep->parsed() || trans->parsed()) {
            auto grid = fracdim::parse_sweep_config(read_file(g.config));
            for (auto& cfg : grid) cfg.threads = g.threads;
            const auto rows = fracdim::run_sweep(grid);
            int failures = 0;
            for (const auto& row : rows) {
                if (!row.error.empty()) {
                    ++failures;
                    std::fprintf(stderr, "row (d=%.4g, s=%.4g, seed=%llu) failed: %s\n", row.d,
                                 row.s, static_cast<unsigned long long>(row.seed),
                                 row.error.c_str());
                }
            }
            if (!g.out.empty()) fracdim::emit_csv_file(rows, g.out);
            if (sweep->parsed()) {
                if (g.out.empty()) fracdim::emit_csv(rows, std::cout);
                if (!sweep_svg.empty()) fracdim::emit_svg_file(rows, sweep_svg);
                std::fprintf(stderr, "sweep: %zu rows, %d failed\n", rows.size(), failures);
            } else {
                const double s_star = fracdim::detect_transition(rows);
                std::printf("transition s_star=%.6g\n", s_star);
            }
            return failures == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
