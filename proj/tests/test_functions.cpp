#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracdim/functions.hpp"
#include "fracdim/geometry.hpp"
#include "fracdim/rng.hpp"
#include "oracles.hpp"

using namespace fracdim;

namespace {

IfsSpec cantor_spec() {
    return {1, 2, 1.0 / 3.0, {{0.0}, {2.0 / 3.0}}};
}

WeierstrassParams make_params(double s, double rho, int n, int J, std::uint64_t seed) {
    WeierstrassParams params;
    params.s = s;
    params.rho = rho;
    params.truncation = J;
    params.phases = random_phases(n, J, seed);
    return params;
}

WeierstrassParams zero_phase_params(double s, double rho, int J) {
    WeierstrassParams params;
    params.s = s;
    params.rho = rho;
    params.truncation = J;
    params.phases = {std::vector<double>(static_cast<std::size_t>(J), 0.0)};
    return params;
}

}  // namespace

TEST_CASE("weierstrass at x=0 with zero phases sums the geometric series") {
    // sum_j rho^{-js} = 1/(1 - rho^{-s}) = 1/(1 - 2^{-1/2})
    const double closed_form = 1.0 / (1.0 - std::pow(2.0, -0.5));
    const auto params = zero_phase_params(0.5, 2.0, 60);
    const auto [value, tail] = weierstrass_eval(params, std::vector<double>{0.0});
    // the bound is exactly tight here (all cosines equal 1), hence the epsilon
    CHECK(std::fabs(value - closed_form) <= tail + 1e-12);
    CHECK(closed_form == doctest::Approx(3.414213562).epsilon(1e-9));
    CHECK(std::fabs(value - closed_form) < 1e-8);
}

TEST_CASE("weierstrass tail bound formula and truncation contract") {
    SplitMix64 rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const double s = 0.3 + 0.5 * rng.next_double();
        const double rho = 1.5 + 2.0 * rng.next_double();
        const int J = 8 + static_cast<int>(rng.next_below(10));
        const auto phases = random_phases(1, 2 * J, trial);
        WeierstrassParams a{s, rho, phases, J};
        WeierstrassParams b{s, rho, phases, 2 * J};
        const std::vector<double> x{rng.next_double()};
        const auto [va, tail_a] = weierstrass_eval(a, x);
        const auto [vb, tail_b] = weierstrass_eval(b, x);
        CHECK(std::fabs(va - vb) <= tail_a + 1e-12);
        CHECK(tail_a == doctest::Approx(std::pow(rho, -J * s) / (1.0 - std::pow(rho, -s))));
    }
}

TEST_CASE("weierstrass parameter validation") {
    CHECK_THROWS_AS(weierstrass_eval(zero_phase_params(1.0, 2.0, 4), std::vector<double>{0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(weierstrass_eval(zero_phase_params(0.5, 0.9, 4), std::vector<double>{0.0}),
                    std::invalid_argument);
    auto p = zero_phase_params(0.5, 2.0, 4);
    CHECK_THROWS_AS(weierstrass_eval(p, std::vector<double>{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("weierstrass Holder ratio has a theta-independent constant") {
    // Max over pairs of |W(x)-W(y)| / |x-y|^s, one value per phase draw: the
    // spread across 20 draws stays within a narrow band.
    std::vector<double> cs;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto params = make_params(0.5, 2.0, 1, 40, seed);
        SplitMix64 rng(seed * 31 + 7);
        double c = 0.0;
        for (int pair = 0; pair < 10000; ++pair) {
            const double x = rng.next_double();
            const double y = rng.next_double();
            if (x == y) continue;
            const double wx = weierstrass_eval(params, std::vector<double>{x}).first;
            const double wy = weierstrass_eval(params, std::vector<double>{y}).first;
            c = std::max(c, std::fabs(wx - wy) / std::sqrt(std::fabs(x - y)));
        }
        cs.push_back(c);
    }
    const double lo = *std::min_element(cs.begin(), cs.end());
    const double hi = *std::max_element(cs.begin(), cs.end());
    CHECK(hi / lo < 2.0);
    CHECK(hi < 20.0);
}

TEST_CASE("random_phases determinism and spread") {
    const auto a = random_phases(3, 50, 42);
    const auto b = random_phases(3, 50, 42);
    CHECK(a == b);
    const auto c = random_phases(3, 50, 43);
    int differing = 0;
    int total = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            ++total;
            if (a[i][j] != c[i][j]) ++differing;
        }
    CHECK(differing >= total * 99 / 100);
    for (const auto& row : a)
        for (double v : row) {
            CHECK(v >= 0.0);
            CHECK(v < 6.283185307179587);
        }
}

TEST_CASE("random_phases uniformity within the chi-square 99% band") {
    constexpr int bins = 64;
    constexpr int draws = 100000;
    const auto phases = random_phases(1, draws, 2024);
    std::vector<int> counts(bins, 0);
    for (double v : phases[0])
        ++counts[static_cast<std::size_t>(v / 6.283185307179586477 * bins)];
    const double expected = static_cast<double>(draws) / bins;
    double stat = 0.0;
    for (int c : counts) stat += (c - expected) * (c - expected) / expected;
    CHECK(stat < oracles::chi2_99_df63);
}

TEST_CASE("estimate_holder_exponent degenerate and Lipschitz cases") {
    const auto pts = uniform_interval_cloud(2000);
    const auto constant = estimate_holder_exponent(
        [](std::span<const double>) { return 3.5; }, pts, 1);
    CHECK(constant.degenerate);
    CHECK(constant.s_hat == doctest::Approx(1.0));
    CHECK(constant.c_hat == doctest::Approx(0.0));

    const auto identity = estimate_holder_exponent(
        [](std::span<const double> x) { return x[0]; }, pts, 1);
    CHECK_FALSE(identity.degenerate);
    CHECK(identity.s_hat == doctest::Approx(1.0).epsilon(0.05));
    CHECK(identity.c_hat > 0.0);
    CHECK(identity.pair_count == 100000);
    CHECK(identity.scale_range.first > 0.0);
    CHECK(identity.scale_range.second <= 1.0);
}

TEST_CASE("estimate_holder_exponent recovers the Weierstrass exponent") {
    const auto pts = uniform_interval_cloud(4096);
    const auto params = make_params(0.5, 2.0, 1, 40, 9);
    const WeierstrassFunction f{params};
    const auto rep = estimate_holder_exponent(f, pts, 3, 100000);
    CHECK(rep.s_hat >= 0.45);
    CHECK(rep.s_hat <= 0.60);
}

TEST_CASE("estimate_holder_exponent input validation") {
    const auto small = uniform_interval_cloud(50);
    CHECK_THROWS_AS(
        estimate_holder_exponent([](std::span<const double> x) { return x[0]; }, small, 1),
        std::invalid_argument);
}

TEST_CASE("Holder witness: envelope constant covers all pairs at exponent s - 0.02") {
    const auto pts = uniform_interval_cloud(4096);
    for (double s : {0.3, 0.5, 0.7}) {
        const auto params = make_params(s, 2.0, 1, 40, 77);
        const WeierstrassFunction f{params};
        // the constant is a sup estimate: give it a dense pair sample so the
        // small-distance strata are populated
        const auto rep = estimate_holder_exponent(f, pts, 5, 1000000);
        std::vector<double> values(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) values[i] = f(pts.point(i));
        SplitMix64 rng(91);
        for (int pair = 0; pair < 20000; ++pair) {
            const auto a = static_cast<std::size_t>(rng.next_below(pts.size()));
            const auto b = static_cast<std::size_t>(rng.next_below(pts.size()));
            const double dist = std::fabs(pts.point(a)[0] - pts.point(b)[0]);
            if (dist < 1e-4 || dist > 1.0) continue;
            CHECK(std::fabs(values[a] - values[b]) <=
                  rep.c_hat * std::pow(dist, s - 0.02));
        }
    }
}

TEST_CASE("mother bump shape") {
    CHECK(mother_bump(std::vector<double>{0.0}) == doctest::Approx(1.0));
    CHECK(mother_bump(std::vector<double>{1.0}) == doctest::Approx(0.0));
    CHECK(mother_bump(std::vector<double>{-1.2}) == doctest::Approx(0.0));
    CHECK(mother_bump(std::vector<double>{0.5, 0.5}) ==
          doctest::Approx(std::pow(0.75, 3) * std::pow(0.75, 3)));
    // numeric gradient bound: max |psi'| over a fine grid matches the constant
    double max_grad = 0.0;
    for (int i = -999; i <= 999; ++i) {
        const double u = i / 1000.0;
        const double h = 1e-6;
        const double g = (mother_bump(std::vector<double>{u + h}) -
                          mother_bump(std::vector<double>{u - h})) /
                         (2 * h);
        max_grad = std::max(max_grad, std::fabs(g));
    }
    CHECK(max_grad <= kMotherGradBound1d + 1e-5);
    CHECK(max_grad == doctest::Approx(kMotherGradBound1d).epsilon(1e-3));
    // C^2 at the support boundary: value, first and second derivative vanish
    const double eps = 1e-4;
    CHECK(mother_bump(std::vector<double>{1.0 - eps}) < 1e-10);
}

TEST_CASE("besov_synthesize trivial series") {
    WaveletSeries zero;
    zero.ambient_dim = 1;
    zero.target_s = 0.5;
    zero.target_d = 1.0;
    CHECK(besov_synthesize(zero, std::vector<double>{0.3}) == 0.0);

    WaveletSeries single = zero;
    single.levels.push_back({1, {{0}}, {1.0}});
    for (double x : {-0.7, 0.0, 0.4, 0.99}) {
        CHECK(besov_synthesize(single, std::vector<double>{x}) ==
              doctest::Approx(mother_bump(std::vector<double>{x})));
    }
}

TEST_CASE("besov_synthesize is linear in the coefficients") {
    const auto spec = cantor_spec();
    const auto a = make_besov_coefficients(spec, 0.5, 6, BesovMode::signed_random, 3);
    const auto b = make_besov_coefficients(spec, 0.7, 6, BesovMode::signed_random, 4);
    const double alpha = 1.7, beta = -0.4;
    WaveletSeries combo = a;
    for (std::size_t l = 0; l < combo.levels.size(); ++l) {
        for (auto& v : combo.levels[l].lambdas) v *= alpha;
        // the two series share the active-cell layout (same spec, same levels)
        REQUIRE(combo.levels[l].cells == b.levels[l].cells);
        for (std::size_t k = 0; k < combo.levels[l].lambdas.size(); ++k)
            combo.levels[l].lambdas[k] += beta * b.levels[l].lambdas[k];
    }
    SplitMix64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> x{rng.next_double()};
        const double lhs = besov_synthesize(combo, x);
        const double rhs = alpha * besov_synthesize(a, x) + beta * besov_synthesize(b, x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("make_besov_coefficients level sums realize the critical quantity") {
    // full interval, d = 1, s = 0.5, one level: sum = 2^{-1(0.5-1)} = sqrt 2
    IfsSpec interval{1, 2, 0.5, {{0.0}, {0.5}}};
    const auto series = make_besov_coefficients(interval, 0.5, 1, BesovMode::deterministic, 1);
    CHECK(series.level_abs_sum(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    // the tracked quantity equals 1 on every level, for several targets
    for (double s : {0.3, 0.5, 0.9}) {
        const auto many = make_besov_coefficients(cantor_spec(), s, 8, BesovMode::deterministic, 1);
        for (int j = 1; j <= 8; ++j)
            CHECK(many.level_quantity(j) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("make_besov_coefficients active cell counts scale like 2^{jd}") {
    const double d = ifs_dimension(cantor_spec());
    const auto series = make_besov_coefficients(cantor_spec(), 0.5, 10, BesovMode::deterministic, 1);
    for (const auto& lvl : series.levels) {
        const double expected = std::exp2(lvl.j * d);
        const double count = static_cast<double>(lvl.lambdas.size());
        CHECK(count <= 4.0 * expected);
        CHECK(count >= expected / 4.0);
    }
}

TEST_CASE("make_besov_coefficients determinism and sign flips") {
    const auto a = make_besov_coefficients(cantor_spec(), 0.5, 6, BesovMode::deterministic, 1);
    const auto b = make_besov_coefficients(cantor_spec(), 0.5, 6, BesovMode::deterministic, 99);
    CHECK(to_json(a) == to_json(b));  // deterministic mode ignores the seed
    const auto c = make_besov_coefficients(cantor_spec(), 0.5, 6, BesovMode::signed_random, 5);
    const auto e = make_besov_coefficients(cantor_spec(), 0.5, 6, BesovMode::signed_random, 5);
    CHECK(to_json(c) == to_json(e));
    bool any_negative = false;
    for (const auto& lvl : c.levels)
        for (double l : lvl.lambdas) {
            CHECK(std::fabs(std::fabs(l) * lvl.lambdas.size() -
                            std::exp2(-lvl.j * (c.target_s - c.target_d))) < 1e-9);
            if (l < 0.0) any_negative = true;
        }
    CHECK(any_negative);
}

TEST_CASE("uniform bound and Cauchy convergence of partial sums for d < s") {
    const auto spec = cantor_spec();  // d = 0.6309 < s = 0.7
    const double s = 0.7;
    const auto series = make_besov_coefficients(spec, s, 10, BesovMode::signed_random, 12);
    const double d = series.target_d;
    double level_budget = 0.0;
    for (int j = 1; j <= 10; ++j) level_budget += std::exp2(-j * (s - d));
    SplitMix64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const std::vector<double> x{rng.next_double()};
        CHECK(std::fabs(besov_synthesize(series, x)) <= level_budget + 1e-12);
        // Cauchy tail: |h_{<J} - h_{<J'}| <= sum of level budgets between them
        const double h6 = besov_synthesize_below(series, x, 6);
        const double h9 = besov_synthesize_below(series, x, 9);
        double tail = 0.0;
        for (int j = 6; j <= 8; ++j) tail += std::exp2(-j * (s - d));
        CHECK(std::fabs(h9 - h6) <= tail + 1e-12);
    }
}

TEST_CASE("BesovEvaluator matches besov_synthesize") {
    const auto series = make_besov_coefficients(cantor_spec(), 0.5, 9, BesovMode::signed_random, 21);
    const BesovEvaluator fast(series);
    const BesovEvaluator partial(series, 5);
    SplitMix64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<double> x{rng.uniform(-0.2, 1.2)};
        CHECK(fast(x) == doctest::Approx(besov_synthesize(series, x)).epsilon(1e-12));
        CHECK(partial(x) == doctest::Approx(besov_synthesize_below(series, x, 5)).epsilon(1e-12));
    }
}

TEST_CASE("wavelet series JSON round trip") {
    const auto series = make_besov_coefficients(cantor_spec(), 0.4, 5, BesovMode::signed_random, 13);
    const auto parsed = parse_wavelet_series(to_json(series));
    CHECK(to_json(parsed) == to_json(series));
    CHECK_THROWS(parse_wavelet_series("{}"));
}
