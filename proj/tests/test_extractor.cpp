#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "randamp/extractor.hpp"
#include "randamp/sv_source.hpp"

using namespace randamp;

TEST_CASE("extract2 pinned behavior") {
    const auto zero = FieldElement::zero(8);
    const auto t = FieldElement(8, 0x5A);
    CHECK(extract2(zero, t, 3) == std::vector<std::uint8_t>{0, 0, 0});

    // n=4: 0001 * 0001 = 0001, low 2 bits (little-endian) are 1,0
    CHECK(extract2(FieldElement(4, 1), FieldElement(4, 1), 2) ==
          std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("extract3 pinned behavior") {
    const auto x = FieldElement(8, 0xC3), y = FieldElement(8, 0x17);
    CHECK(extract3(x, y, FieldElement::zero(8), 4) ==
          std::vector<std::uint8_t>{0, 0, 0, 0});
    const auto t = FieldElement(8, 0x2B);
    // argument order matters by construction; equality not required
    CHECK(extract3(x, y, t, 8) ==
          extract2(pack_bits(extract2(x, y, 8), 8), t, 8));
}

TEST_CASE("distance_from_uniform pinned values") {
    CHECK(distance_from_uniform({0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(distance_from_uniform({1.0, 0.0}) == doctest::Approx(1.0));
    CHECK(distance_from_uniform({0.75, 0.25}) == doctest::Approx(0.5));
    CHECK_THROWS(distance_from_uniform({0.7, 0.7}));
}

TEST_CASE("exact output distribution: point masses and unit shifts") {
    ExtractorSpec spec{ExtractorKind::two_source_multiply, 4, 4};
    // singleton supports -> point mass
    FlatSource a{4, {0x3}}, b{4, {0x5}};
    const auto dist = exact_output_distribution(spec, {a, b});
    CHECK(*std::max_element(dist.begin(), dist.end()) == doctest::Approx(1.0));

    // full support times a nonzero constant is a field permutation -> uniform
    FlatSource full{4, {}};
    for (std::uint64_t v = 0; v < 16; ++v) full.support.push_back(v);
    for (std::uint64_t c : {1, 7, 13}) {
        FlatSource unit{4, {c}};
        const auto d = exact_output_distribution(spec, {full, unit});
        CHECK(distance_from_uniform(d) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("flat source min-entropy and random supports") {
    FlatSource s = FlatSource::random(8, 6, 1234);
    CHECK(s.support.size() == 64);
    CHECK(s.min_entropy() == doctest::Approx(6.0));
    // deterministic given the seed
    CHECK(FlatSource::random(8, 6, 1234).support == s.support);
}

TEST_CASE("two-source distance bound over random flat pairs") {
    ExtractorSpec spec{ExtractorKind::two_source_multiply, 8, 1};
    std::uint64_t seed = 7;
    for (int trial = 0; trial < 40; ++trial) {
        const auto s1 = FlatSource::random(8, 6, split_seed(seed, 2 * trial));
        const auto s2 =
            FlatSource::random(8, 6, split_seed(seed, 2 * trial + 1));
        const auto d = exact_output_distribution(spec, {s1, s2});
        // 2^{(n - k1 - k2)/2} / 2 at n=8, k=6+6
        CHECK(distance_from_uniform(d) <= 0.125 + 1e-12);
    }
}

TEST_CASE("pack_bits truncates and zero-pads") {
    CHECK(pack_bits({1, 0, 1}, 8).low64() == 5);
    CHECK(pack_bits({1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, 4).low64() == 0xF);
    CHECK(pack_bits({}, 16).is_zero());
}

TEST_CASE("run_extractor dispatches on kind") {
    const auto x = FieldElement(8, 0x9D), t = FieldElement(8, 0x31);
    ExtractorSpec two{ExtractorKind::two_source_multiply, 8, 5};
    CHECK(run_extractor(two, {x, t}) == extract2(x, t, 5));
    ExtractorSpec three{ExtractorKind::three_source_composed, 8, 5};
    const auto y = FieldElement(8, 0x44);
    CHECK(run_extractor(three, {x, y, t}) == extract3(x, y, t, 5));
}
