#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "interweave/channel.hpp"
#include "interweave/errors.hpp"
#include "interweave/ratemodel.hpp"

using namespace interweave;
using Catch::Approx;

namespace {

CapacityConstants symmetric_0db() {
    return capacity_constants({0.5, 1.0, 1.0, 1.0}, FadingKind::rayleigh_unit);
}

// A scenario where interference is expensive for the PU (A_p - B_p - B_c > 0).
CapacityConstants strong_pu() {
    return capacity_constants(SystemParams::from_db(0.5, 40.0, 20.0), FadingKind::rayleigh_unit);
}

} // namespace

TEST_CASE("slot class probabilities") {
    const auto q = q_distribution(0.5, {0.3, 0.2});
    CHECK(q.q1 == Approx(0.4));
    CHECK(q.q2 == Approx(0.15));
    CHECK(q.q3 == Approx(0.1));
    CHECK(q.q4 == Approx(0.35));
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        CHECK(q_distribution(u(gen), {u(gen), u(gen)}).total() == Approx(1.0).margin(1e-15));
    }
    CHECK_THROWS_AS(q_distribution(0.5, {1.2, 0.0}), DomainError);
    CHECK_THROWS_AS(q_distribution(-0.1, {0.2, 0.0}), DomainError);
}

TEST_CASE("non-ideal capacities at the symmetric example") {
    const auto k = symmetric_0db();
    const auto c = nonideal_capacities(k, 0.4, {0.2, 0.3});
    CHECK(c.c_p_prime == Approx(0.475521).margin(5e-7));
    CHECK(c.c_c_prime == Approx(0.303452).margin(5e-7));
    CHECK(c.eta_hat == Approx(1.509028).margin(5e-7));
    CHECK(c.eta_defined);
    CHECK(eta_hat(k, 0.4, {0.2, 0.3}) == c.eta_hat);

    const auto at_one = nonideal_capacities(k, 1.0, {0.0, 0.0});
    CHECK_FALSE(at_one.eta_defined);
    CHECK(std::isinf(at_one.eta_hat));
    CHECK(at_one.c_c_prime == k.a_c);
    CHECK(at_one.c_p_prime == 0.0);
}

TEST_CASE("ideal eta and its slope") {
    const auto k = strong_pu();
    CHECK(eta_ideal(k, 0.0) == 1.0);
    CHECK(eta_ideal(k, 0.5) == Approx(1.0 + k.c_c_ideal / k.c_p_ideal));
    CHECK(std::isinf(eta_ideal_or_infinity(k, 1.0)));
    CHECK_THROWS_AS(eta_ideal(k, 1.0), DomainError);
    double prev = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double p = 0.98 * i / 49.0;
        const double e = eta_ideal(k, p);
        CHECK(e > prev);
        CHECK(eta_ideal_slope(k, p) > 0.0);
        prev = e;
    }
    const double h = 1e-6;
    CHECK(eta_ideal_slope(k, 0.3) ==
          Approx((eta_ideal(k, 0.3 + h) - eta_ideal(k, 0.3 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("eta_hat reduces to eta_ideal without detection errors") {
    for (const auto& k : {symmetric_0db(), strong_pu()}) {
        for (int i = 0; i < 50; ++i) {
            const double p = 0.98 * i / 49.0;
            CHECK(eta_hat(k, p, {0.0, 0.0}) == eta_ideal(k, p));
            CHECK(eta_hat(k, p, {0.0, 1.0}) == Approx(1.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("eta_hat partials against centered differences") {
    const auto k = strong_pu();
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const double h = 1e-5;
    for (int i = 0; i < 50; ++i) {
        const double p = u(gen), fa = u(gen), md = u(gen);
        const auto d = eta_hat_partials(k, p, {fa, md});
        const double fd_p = (eta_hat(k, p + h, {fa, md}) - eta_hat(k, p - h, {fa, md})) / (2 * h);
        const double fd_md = (eta_hat(k, p, {fa, md + h}) - eta_hat(k, p, {fa, md - h})) / (2 * h);
        const double fd_fa = (eta_hat(k, p, {fa + h, md}) - eta_hat(k, p, {fa - h, md})) / (2 * h);
        CHECK(d.d_dp == Approx(fd_p).epsilon(1e-6));
        CHECK(d.d_dpmd == Approx(fd_md).epsilon(1e-6));
        CHECK(d.d_dpfa == Approx(fd_fa).epsilon(1e-6));
        CHECK(d.d_dp > 0.0);
        CHECK(d.d_dpmd < 0.0);
        CHECK(d.d_dpfa == eta_hat_partials(k, 0.5, {0.5, 0.5}).d_dpfa);
    }
}

TEST_CASE("ideal region is the triangle") {
    const auto k = symmetric_0db();
    const auto r = ideal_rate_region(k, 0.25);
    REQUIRE(r.vertices.size() == 3);
    CHECK(r.max_r_c() == Approx(0.25 * k.c_c_ideal));
    CHECK(r.max_r_p() == Approx(0.75 * k.c_p_ideal));
    CHECK(r.area() == Approx(0.5 * 0.25 * k.c_c_ideal * 0.75 * k.c_p_ideal));
    CHECK(ideal_rate_region(k, 0.0).degenerate());
    CHECK(ideal_rate_region(k, 1.0).degenerate());
    CHECK(ideal_rate_region(k, 0.0).vertices.size() == 2);
}

TEST_CASE("non-ideal region without errors has the ideal vertices") {
    const auto k = strong_pu();
    for (double p : {0.1, 0.5, 0.9}) {
        const auto ideal = ideal_rate_region(k, p);
        const auto non = nonideal_rate_region(k, p, {0.0, 0.0});
        CHECK(non.vertices == ideal.vertices);
        CHECK(non.kind == RegionKind::non_ideal);
    }
}

TEST_CASE("p_fa moves only the R_p cut when p_md is fixed") {
    const auto k = strong_pu();
    const auto a = nonideal_rate_region(k, 0.5, {0.1, 0.2});
    const auto b = nonideal_rate_region(k, 0.5, {0.4, 0.2});
    CHECK(a.max_r_p() > b.max_r_p());
    // B_c is tiny here, so the R_c cut barely moves.
    CHECK(std::abs(a.max_r_c() - b.max_r_c()) < 0.01 * a.max_r_c());
    const auto c = nonideal_rate_region(k, 0.5, {0.1, 0.6});
    CHECK(c.max_r_p() == a.max_r_p());
    CHECK(c.max_r_c() < a.max_r_c());
}

TEST_CASE("containment in the ideal triangle holds exactly when the interference terms are small") {
    // The non-ideal R_c cut (1-p) p_fa B_c + p (1-p_md) A_c exceeds p A_c
    // once (1-p) p_fa B_c > p p_md A_c, and the flat-top corner leaves the
    // triangle once (1-p) p_fa B_c / (p A_c) + C2 / A_p > 1.
    const auto k = symmetric_0db();
    int checked = 0;
    for (int a = 0; a <= 10; ++a) {
        for (int b = 0; b <= 10; ++b) {
            for (int c = 0; c <= 10; ++c) {
                const double p = a / 10.0, fa = b / 10.0, md = c / 10.0;
                const auto ideal = ideal_rate_region(k, p);
                const auto non = nonideal_rate_region(k, p, {fa, md});
                const double w = (1 - p) * fa * k.b_c;
                const double c2 = (1 - fa) * k.a_p + fa * k.b_p;
                bool expect_inside = w + p * (1 - md) * k.a_c <= p * k.a_c + 1e-12;
                if (p > 0.0 && p < 1.0) {
                    expect_inside = expect_inside && w / (p * k.a_c) + c2 / k.a_p <= 1.0 + 1e-12;
                }
                if (p == 0.0) expect_inside = fa == 0.0 || k.b_c == 0.0;
                if (p == 1.0) expect_inside = true;
                INFO("p " << p << " fa " << fa << " md " << md);
                CHECK(uncontained_vertices(non, ideal, 1e-12).empty() == expect_inside);
                ++checked;
            }
        }
    }
    CHECK(checked == 1331);
    // The documented counterexample: all errors on the false-alarm side.
    CHECK_FALSE(uncontained_vertices(nonideal_rate_region(k, 0.5, {1.0, 0.0}),
                                     ideal_rate_region(k, 0.5))
                    .empty());
}

TEST_CASE("polygon containment") {
    RateRegionPolygon sq;
    sq.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(sq.area() == 1.0);
    CHECK(sq.contains({0.5, 0.5}));
    CHECK(sq.contains({1.0, 0.5}));
    CHECK_FALSE(sq.contains({1.0 + 1e-9, 0.5}));
    RateRegionPolygon seg;
    seg.vertices = {{0, 0}, {0, 2}};
    CHECK(seg.degenerate());
    CHECK(seg.contains({0, 1.5}));
    CHECK_FALSE(seg.contains({0.1, 1.0}));
}

TEST_CASE("sum capacity matches C_c' + C_p'") {
    const auto k = strong_pu();
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double p = u(gen);
        const DetectionErrorPair e{u(gen), u(gen)};
        CHECK(sum_capacity(k, p, e) == Approx(nonideal_capacities(k, p, e).sum).epsilon(1e-13));
    }
}

TEST_CASE("optimal occupancy against brute force") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> db(-10.0, 40.0);
    for (int i = 0; i < 100; ++i) {
        const auto k = capacity_constants(SystemParams::from_db(0.5, db(gen), db(gen) + 10.0),
                                          FadingKind::rayleigh_unit);
        const DetectionErrorPair e{u(gen), u(gen)};
        const auto opt = optimal_occupancy(k, e);
        double best = -1.0, best_p = -1.0;
        for (int j = 0; j <= 1000; ++j) {
            const double p = j / 1000.0;
            const double s = sum_capacity(k, p, e);
            if (s > best) {
                best = s;
                best_p = p;
            }
        }
        if (opt.p_star) {
            CHECK(*opt.p_star == best_p);
        } else {
            CHECK(std::abs(opt.m_value) <= kOccupancyTieEps);
        }
    }
}

TEST_CASE("sum capacity maximizer over detection errors") {
    // p_md = 0 is always best. p_fa = 0 is best exactly when
    // A_p - B_p - B_c >= 0; otherwise false alarms raise the sum rate.
    for (const auto& k : {symmetric_0db(), strong_pu()}) {
        const double net = k.a_p - k.b_p - k.b_c;
        for (double p : {0.2, 0.5, 0.8}) {
            double best = -1.0;
            DetectionErrorPair arg;
            for (int i = 0; i <= 20; ++i) {
                for (int j = 0; j <= 20; ++j) {
                    const DetectionErrorPair e{i / 20.0, j / 20.0};
                    const double s = sum_capacity(k, p, e);
                    if (s > best) {
                        best = s;
                        arg = e;
                    }
                }
            }
            CHECK(arg.p_md == 0.0);
            CHECK(arg.p_fa == (net >= 0.0 ? 0.0 : 1.0));
        }
    }
    CHECK(symmetric_0db().a_p - symmetric_0db().b_p - symmetric_0db().b_c < 0.0);
    CHECK(strong_pu().a_p - strong_pu().b_p - strong_pu().b_c > 0.0);
}
