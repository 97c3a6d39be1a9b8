#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "randamp/bell.hpp"
#include "randamp/box.hpp"
#include "randamp/sv_source.hpp"

using namespace randamp;

TEST_CASE("indicator on pinned inputs") {
    // even parity, constrained setting 0001 -> fires
    CHECK(bell_indicator(Outcome::from_bits(0, 0, 0, 0),
                         Setting::from_bits(0, 0, 0, 1)) == 1);
    // setting 0000 is unconstrained
    for (int x = 0; x < 16; ++x)
        CHECK(bell_indicator(Outcome(x), Setting(0)) == 0);
    // odd parity, constrained setting 0111 -> fires
    CHECK(bell_indicator(Outcome::from_bits(1, 0, 0, 0),
                         Setting::from_bits(0, 1, 1, 1)) == 1);
}

TEST_CASE("indicator table has exactly 64 ones") {
    const auto& tab = bell_indicator_table();
    int ones = 0;
    for (int u = 0; u < 16; ++u)
        for (int x = 0; x < 16; ++x) {
            CHECK(tab[u][x] == bell_indicator(Outcome(x), Setting(u)));
            ones += tab[u][x];
        }
    CHECK(ones == 64);
}

TEST_CASE("bell_value on reference boxes") {
    CHECK(bell_value(uniform_box()) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(bell_value(quantum_ideal_box()) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("weighted value: uniform weights recover bell_value/16") {
    std::array<double, 16> nu{};
    nu.fill(1.0 / 16);
    const auto u = uniform_box();
    CHECK(weighted_bell_value(u, nu) ==
          doctest::Approx(bell_value(u) / 16).epsilon(1e-12));

    std::array<double, 16> point{};
    point[0] = 1.0;  // setting 0000 has no Bell constraint
    CHECK(weighted_bell_value(u, point) == doctest::Approx(0.0));

    std::array<double, 16> bad{};
    bad.fill(0.1);
    CHECK_THROWS(weighted_bell_value(u, bad));
}

TEST_CASE("weighted value stays in the SV band times bell_value") {
    const double eps = 0.1;
    const double lo = std::pow(0.5 - eps, 4), hi = std::pow(0.5 + eps, 4);
    SvSource src(eps, ConstantBiasStrategy{eps, 1}, 11);
    std::array<double, 16> nu{};
    const double p1 = 0.5 + eps;
    for (int u = 0; u < 16; ++u) {
        double p = 1.0;
        for (int b = 0; b < 4; ++b)
            p *= Setting(u).bit(b) ? p1 : 1.0 - p1;
        nu[u] = p;
    }
    for (double eta : {0.0, 0.3, 1.0}) {
        const auto box = noisy_box(quantum_ideal_box(), eta);
        const double w = weighted_bell_value(box, nu);
        CHECK(w >= lo * bell_value(box) - 1e-12);
        CHECK(w <= hi * bell_value(box) + 1e-12);
    }
    (void)src;
}

TEST_CASE("empirical stats exact counting") {
    std::vector<std::pair<Outcome, Setting>> rounds(100,
                                              {Outcome(0), Setting(0)});
    auto s = empirical_stats(rounds);
    CHECK(s.ones == 0);
    CHECK(s.value() == 0.0);
    CHECK(s.at_most(0.0));

    s = empirical_stats({{Outcome(0), Setting(1)}});
    CHECK(s.ones == 1);
    CHECK(s.value() == 1.0);
    CHECK_FALSE(s.at_most(0.5));
}

TEST_CASE("linear fraction: pinned cases and precondition") {
    const auto lf = linear_fraction(std::vector<double>(10, 0.0), 0.01);
    CHECK(lf.fraction == 1.0);
    CHECK(lf.threshold == doctest::Approx(0.1));

    // average exactly delta
    std::vector<double> means(100, 0.0);
    for (int i = 0; i < 10; ++i) means[i] = 0.1;
    const auto lf2 = linear_fraction(means, 0.01);
    CHECK(lf2.fraction >= 1.0 - 0.1 - 1e-12);

    CHECK_THROWS(linear_fraction({0.2, 0.0, 0.0, 0.0}, 0.04));
}

TEST_CASE("linear fraction property over random vectors") {
    std::uint64_t s = 12345;
    auto next = [&]() {
        s = split_seed(s, 1);
        return double(s % 1000003) / 1000003.0;
    };
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + int(split_seed(s, 2) % 64);
        std::vector<double> means(n);
        double sum = 0.0;
        for (auto& m : means) {
            m = next();
            sum += m;
        }
        const double delta = sum / n + next() * 0.5 + 1e-9;
        const auto lf = linear_fraction(means, delta);
        CHECK(lf.fraction >= 1.0 - std::sqrt(delta) - 1e-12);
        int count = 0;
        for (double m : means) count += m <= lf.threshold;
        CHECK(lf.fraction == doctest::Approx(double(count) / n));
    }
}
