#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nnad/detectors.hpp"
#include "nnad/error.hpp"
#include "nnad/rng.hpp"
#include "nnad/theory.hpp"

using namespace nnad;

namespace {

// Population DTM of U[0,1] at x in closed form: the ball mass is r + min(r, s) up to saturation,
// with s = min(x, 1 - x), so r_p = p/2 for p <= 2s and p - s beyond.
double uniform_dtm(double x, double m, double q) {
    const double s = std::min(x, 1.0 - x);
    if (std::isinf(q)) return m <= 2 * s ? m / 2 : m - s;
    double integral;
    if (m <= 2 * s) {
        integral = std::pow(m, q + 1) / (std::pow(2.0, q) * (q + 1));
    } else {
        integral = std::pow(2 * s, q + 1) / (std::pow(2.0, q) * (q + 1)) +
                   (std::pow(m - s, q + 1) - std::pow(s, q + 1)) / (q + 1);
    }
    return std::pow(integral / m, 1.0 / q);
}

}  // namespace

TEST_CASE("beta_n and alpha_n") {
    // Frozen from an independent double-precision evaluation of the formulas.
    CHECK(beta_n(1000, 2, 0.05) == doctest::Approx(0.3339334136851841).epsilon(1e-13));
    CHECK(alpha_n(2, 0.5) == doctest::Approx(4.078667960675236).epsilon(1e-13));
    CHECK(alpha_n(5000, 0.05) == alpha_n(5000, 0.05));
    const double near_one = beta_n(100, 1, 1.0 - 1e-12);
    CHECK(std::isfinite(near_one));
    CHECK(near_one > 0.0);
    double prev_beta = beta_n(1, 3, 0.1);
    for (std::size_t n = 2; n < 5000; ++n) {
        const double b = beta_n(n, 3, 0.1);
        REQUIRE(b < prev_beta);
        prev_beta = b;
    }
    for (double delta : {0.5, 0.05, 1e-6}) {
        double prev = alpha_n(2, delta);
        for (std::size_t n = 3; n <= 1000000; n += (n < 1000 ? 1 : n / 100)) {
            const double a = alpha_n(n, delta);
            REQUIRE(a < prev);
            prev = a;
        }
    }
    CHECK_THROWS_AS(alpha_n(1, 0.5), InvalidArgument);
    CHECK_THROWS_AS(beta_n(0, 1, 0.5), InvalidArgument);
    CHECK_THROWS_AS(beta_n(10, 1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(beta_n(10, 0, 0.5), InvalidArgument);
}

TEST_CASE("radius and dtm bounds") {
    CHECK(radius_bound(1000, 2, 0.05, 0.03, 1.0) == doctest::Approx(0.1693504886602058).epsilon(1e-12));
    CHECK(dtm_bound(1000, 2, 0.05, 0.03, 1.0) == doctest::Approx(0.1693504886602058).epsilon(1e-12));
    CHECK(radius_bound(1000, 2, 0.05, 0.03, 2.5) == doctest::Approx(2.5 * 0.1693504886602058).epsilon(1e-12));
    const double a = alpha_n(1000, 0.05);
    CHECK(radius_bound_sample(1000, 0.05, 0.03, 1.0) ==
          doctest::Approx(a * a + a * std::sqrt(29.0 / 999.0) + 1e-3).epsilon(1e-12));
    CHECK(dtm_bound_sample(1000, 0.05, 0.03, 1.0) == doctest::Approx(a * (a + std::sqrt(0.03))).epsilon(1e-12));
    CHECK_THROWS_AS(radius_bound(1000, 2, 0.05, 0.0305, 1.0), InvalidArgument);
    CHECK_THROWS_AS(radius_bound_sample(1000, 0.05, 0.0305, 1.0), InvalidArgument);
    // The sqrt(p) term vanishes relative to beta^2 as p -> 1/n.
    double prev_ratio = 2.0;
    for (std::size_t n : {100u, 10000u, 1000000u, 100000000u}) {
        const double b = beta_n(n, 1, 0.05);
        const double ratio = radius_bound(n, 1, 0.05, 1.0 / static_cast<double>(n), 1.0) / (b * b);
        CHECK(ratio < prev_ratio);
        prev_ratio = ratio;
    }
    CHECK(prev_ratio < 1.1);
    CHECK(dtm_bound(1000, 2, 0.05, 0.1, 1.0) > dtm_bound(1000, 2, 0.05, 0.03, 1.0));
    CHECK(calibrate_constant(2 * dtm_bound_sample(500, 0.05, 0.1, 1.0), 500, 0.05, 0.1) == doctest::Approx(2.0));
}

TEST_CASE("g0 threshold and full-support eta") {
    CHECK(g0_threshold(0.1, 0.05, 2.0, 0.0, 1.0, q_infinity) == doctest::Approx(0.052631578947368425).epsilon(1e-13));
    CHECK(full_support_eta(0.1, 0.05, 1.0, 1.0, 1.0, 0.0) == doctest::Approx(0.10526315789473685).epsilon(1e-13));
    CHECK(g0_threshold(0.1, 0.05, 2.0, 0.5, 1.0, 2.0) > g0_threshold(0.1, 0.05, 2.0, 0.0, 1.0, 2.0));
    CHECK(g0_threshold(0.1, 0.05, 1e6, 0.0, 1.0, 2.0) < 1e-5);
    CHECK(full_support_eta(0.1, 0.05, 2.0, 1.0, 2.0, 0.1) < full_support_eta(0.1, 0.05, 1.0, 1.0, 2.0, 0.1));
    CHECK_THROWS_WITH_AS(g0_threshold(0.05, 0.05, 2.0, 0.0, 1.0, 2.0), doctest::Contains("epsilon"), InvalidArgument);
    CHECK_THROWS_WITH_AS(g0_threshold(0.1, 0.05, 0.1, 1.0, 1.0, 2.0), doctest::Contains("separation"), InvalidArgument);
    CHECK_THROWS_AS(g0_threshold(0.1, 0.05, 0.5, 0.5, 1.0, q_infinity), InvalidArgument);
    CHECK_THROWS_AS(full_support_eta(0.04, 0.05, 1.0, 1.0, 2.0, 0.0), InvalidArgument);

    Rng rng(77);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double eps = rng.uniform(0.0, 0.3);
        const double m = eps + rng.uniform(0.01, 0.5);
        const double a0 = rng.uniform(0.1, 5.0);
        const double b = rng.uniform(0.5, 4.0);
        const double q = trial % 10 == 0 ? q_infinity : rng.uniform(1.0, 6.0);
        const double h = rng.uniform(0.0, 0.5);
        // The separation term is the difference of eta^q-scaled and h; when the level term
        // is tiny relative to h, one ulp in eta moves g0 by more than 1e-9, so those tuples are skipped.
        const double level_term = std::isinf(q) ? 1.0 : b / (b + q) * std::pow(m / (a0 * (1.0 - eps)), q / b);
        if (!std::isinf(q) && (level_term + h) / level_term * q > 1e5) continue;
        ++checked;
        const double eta = full_support_eta(m, eps, a0, b, q, h);
        REQUIRE(g0_threshold(m, eps, eta, h, b, q) == doctest::Approx(a0).epsilon(1e-9));
    }
    CHECK(checked >= 700);
}

TEST_CASE("population radius") {
    const auto u = ReferenceDistribution::uniform_interval(0.0, 1.0);
    const std::vector<double> mid{0.5}, left{0.0}, outside{1.5};
    CHECK(population_radius(u, mid, 0.2) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(population_radius(u, left, 0.2) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(population_radius(u, outside, 0.2) == doctest::Approx(0.7).epsilon(1e-12));
    const auto pm = ReferenceDistribution::point_mass({3.0, 4.0});
    const std::vector<double> at{3.0, 4.0}, origin{0.0, 0.0};
    CHECK(population_radius(pm, at, 1.0) == 0.0);
    CHECK(population_radius(pm, origin, 0.5) == doctest::Approx(5.0).epsilon(1e-12));

    // Unit disk: the centered ball of radius r has mass r^2.
    const auto disk = ReferenceDistribution::uniform_ball({0.0, 0.0}, 1.0);
    CHECK(population_radius(disk, origin, 0.25) == doctest::Approx(0.5).epsilon(1e-10));
    // Unit 3-ball: the ball of radius 1 around a boundary point holds 5/16 of the mass (lens volume).
    const auto ball3 = ReferenceDistribution::uniform_ball({0.0, 0.0, 0.0}, 1.0);
    const std::vector<double> pole{0.0, 0.0, 1.0};
    CHECK(ball3.ball_mass(pole, 1.0) == doctest::Approx(5.0 / 16.0).epsilon(1e-12));

    const auto mix = ReferenceDistribution::huber_mixture(u, ReferenceDistribution::point_mass({2.0}), 0.1);
    const std::vector<double> two{2.0};
    CHECK(population_radius(mix, two, 0.1) == 0.0);
    CHECK(population_radius(mix, two, 0.19) == doctest::Approx(1.1).epsilon(1e-10));
    CHECK_THROWS_AS(population_radius(u, mid, 0.0), InvalidArgument);
}

TEST_CASE("population dtm") {
    const auto u = ReferenceDistribution::uniform_interval(0.0, 1.0);
    const std::vector<double> mid{0.5};
    CHECK(population_dtm(u, mid, 0.2, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(population_dtm(u, mid, 0.2, q_infinity) == doctest::Approx(0.1).epsilon(1e-12));
    const auto pm = ReferenceDistribution::point_mass({1.0});
    const std::vector<double> one{1.0};
    for (double q : {1.0, 2.0, q_infinity}) CHECK(population_dtm(pm, one, 0.3, q) == 0.0);
    for (double x : {0.0, 0.01, 0.05, 0.3, 0.5, 0.97}) {
        for (double q : {1.0, 2.0, 3.5}) {
            const std::vector<double> p{x};
            CHECK(population_dtm(u, p, 0.1, q) == doctest::Approx(uniform_dtm(x, 0.1, q)).epsilon(1e-9));
        }
    }
    // A mixture whose radius jumps at the atom's mass.
    const auto mix = ReferenceDistribution::huber_mixture(u, ReferenceDistribution::point_mass({3.0}), 0.05);
    const std::vector<double> atom{3.0};
    // r_p = 0 for p <= 0.05, else 2 + (p - 0.05)/0.95 (one-sided from the right end of [0,1]).
    const double expected = (0.05 * 0.0 + (std::pow(2.0 + 0.05 / 0.95, 3) - 8.0) * 0.95 / 3.0) / 0.1;
    CHECK(population_dtm(mix, atom, 0.1, 2.0) == doctest::Approx(std::sqrt(expected)).epsilon(1e-9));
}

TEST_CASE("inverse level takes the infimum of the preimage") {
    CHECK(inverse_level([](double) { return 1.0; }, 0.5, 10.0) == 0.0);
    CHECK(std::isinf(inverse_level([](double) { return 1.0; }, 2.0, 10.0)));
    CHECK(inverse_level([](double z) { return std::min(z, 1.0); }, 0.25, 10.0) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("separation check") {
    const double m = 0.1, eps = 0.05, q = 2.0;
    const double eta_star = full_support_eta(m, eps, 1.0, 1.0, q, 0.0);
    auto setup_for = [&](double eta, double h) {
        SeparationSetup s{ReferenceDistribution::uniform_interval(0.0, 1.0),
                          ReferenceDistribution::point_mass({1.0 + eta}), eps, m, q, h, 1.0,
                          [](double) { return 1.0; }};
        return s;
    };
    auto candidates_for = [](double eta) {
        std::vector<std::vector<double>> c;
        for (int i = 0; i <= 200; ++i) c.push_back({i / 200.0});
        c.push_back({1.0 + eta});
        return c;
    };
    const auto good = separation_check(setup_for(1.5 * eta_star, 0.0), candidates_for(1.5 * eta_star));
    CHECK(good.holds);
    CHECK(good.full_support_holds);
    CHECK(good.zone_count == 201);
    CHECK(good.eta == doctest::Approx(1.5 * eta_star));

    const auto touching = separation_check(setup_for(0.0, 0.0), candidates_for(0.0));
    CHECK_FALSE(touching.holds);
    CHECK(touching.anomaly_count == 0);

    const auto huge_h = separation_check(setup_for(1.0, 100.0), candidates_for(1.0));
    CHECK_FALSE(huge_h.holds);
    CHECK_FALSE(huge_h.note.empty());
}

TEST_CASE("theory report") {
    TheoryInputs in;
    in.n = 1000;
    in.d = 2;
    in.m = 0.03;
    const auto report = compute_theory_report(in);
    CHECK(report.k == 30);
    CHECK(*report.find("beta_n")->value == doctest::Approx(0.3339334136851841));
    CHECK_FALSE(report.find("g0")->value.has_value());
    CHECK(report.find("g0")->reason.find("eta") != std::string::npos);
    in.epsilon = 0.05;
    const auto contaminated = compute_theory_report(in);
    CHECK_FALSE(contaminated.find("full_support_eta")->value.has_value());
    CHECK(contaminated.find("full_support_eta")->reason.find("epsilon") != std::string::npos);
    in.epsilon = 0.01;
    in.eta = 3.0;
    CHECK(compute_theory_report(in).find("g0")->value.has_value());
}

TEST_CASE("empirical dtm stays within the calibrated sample bound") {
    // Calibrate C on the smallest sample size, then check larger samples against it.
    const double m = 0.05, delta = 0.05, q = 2.0;
    auto deviation = [&](std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform();
        const Dataset data(v, 1);
        const auto report = score_dataset(data, {Method::dtm, q, std::nullopt, m});
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(report.scores[i] - uniform_dtm(v[i], m, q)));
        return worst;
    };
    double c_star = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) c_star = std::max(c_star, calibrate_constant(deviation(500, 1000 + s), 500, delta, m));
    int ok = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const std::size_t n = 2000;
        if (deviation(n, s) <= dtm_bound_sample(n, delta, m, c_star)) ++ok;
    }
    CHECK(ok >= 95);
}
