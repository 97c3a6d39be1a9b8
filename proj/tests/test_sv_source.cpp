#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "randamp/box.hpp"
#include "randamp/sv_source.hpp"

using namespace randamp;

TEST_CASE("uniform strategy at eps=0 emits conditional 1/2 exactly") {
    SvSource src(0.0, UniformStrategy{}, 42);
    for (int i = 0; i < 100; ++i) {
        CHECK(src.next_p1() == 0.5);
        src.draw_bit();
    }
}

TEST_CASE("constant bias concentrates at 1/2+eps") {
    SvSource src(0.2, ConstantBiasStrategy{0.2, 1}, 9);
    int ones = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) ones += src.draw_bit();
    CHECK(double(ones) / n == doctest::Approx(0.7).epsilon(0.01));
}

TEST_CASE("every strategy's emitted law stays in the band") {
    const double eps = 0.15;
    const auto box = quantum_ideal_box();
    std::vector<SvStrategy> strategies{
        UniformStrategy{}, ConstantBiasStrategy{0.5, 0},  // clamped to eps
        GreedyAdversarialStrategy::against(box)};
    for (const auto& st : strategies) {
        SvSource src(eps, st, 3);
        for (int i = 0; i < 2000; ++i) {
            const double p = src.next_p1();
            CHECK(p >= 0.5 - eps - 1e-15);
            CHECK(p <= 0.5 + eps + 1e-15);
            src.draw_bit();
        }
        // also inside setting draws
        SvSource src2(eps, st, 4);
        for (int i = 0; i < 200; ++i) src2.draw_setting();
    }
}

TEST_CASE("setting distribution: uniform and biased product laws") {
    SvSource src(0.0, UniformStrategy{}, 5);
    std::array<int, 16> counts{};
    const int n = 160000;
    for (int i = 0; i < n; ++i) counts[src.draw_setting().idx]++;
    for (int u = 0; u < 16; ++u)
        CHECK(double(counts[u]) / n == doctest::Approx(1.0 / 16).epsilon(0.1));

    // bias 0.1 toward 0: P(0000) = 0.6^4
    SvSource biased(0.1, ConstantBiasStrategy{0.1, 0}, 6);
    int zeros = 0;
    for (int i = 0; i < n; ++i) zeros += biased.draw_setting().idx == 0;
    CHECK(double(zeros) / n == doctest::Approx(0.1296).epsilon(0.05));
}

TEST_CASE("block index: rejection sampling is uniform and frugal") {
    SvSource one(0.3, ConstantBiasStrategy{0.3, 1}, 7);
    CHECK(one.draw_block_index(1) == 0);
    CHECK(one.history().empty());  // zero bits consumed

    SvSource four(0.0, UniformStrategy{}, 8);
    std::array<int, 4> c4{};
    for (int i = 0; i < 400000; ++i) c4[four.draw_block_index(4)]++;
    for (int j = 0; j < 4; ++j)
        CHECK(double(c4[j]) / 400000 == doctest::Approx(0.25).epsilon(0.02));

    SvSource three(0.0, UniformStrategy{}, 9);
    std::array<int, 3> c3{};
    const int n = 1000000;
    for (int i = 0; i < n; ++i) c3[three.draw_block_index(3)]++;
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(double(c3[j]) / n - 1.0 / 3) < 0.01);
}

TEST_CASE("replay determinism and exhaustion") {
    std::vector<uint8_t> bits{1, 0, 1, 1, 0, 0, 1, 0};
    SvSource a(0.1, ReplayStrategy{bits}, 1), b(0.1, ReplayStrategy{bits}, 2);
    CHECK(a.draw_bits(8) == b.draw_bits(8));  // seed-independent replay
    CHECK_THROWS(a.draw_bit());

    // same seed + strategy => identical stream
    SvSource c(0.2, ConstantBiasStrategy{0.2, 1}, 77);
    SvSource d(0.2, ConstantBiasStrategy{0.2, 1}, 77);
    CHECK(c.draw_bits(512) == d.draw_bits(512));
}

TEST_CASE("stream audit verdicts") {
    // deterministic stream violates any eps < 1/2
    std::vector<uint8_t> zeros(4000, 0);
    auto rep = audit_stream(zeros, 0.3, 2);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_conditional_deviation == doctest::Approx(0.5));

    SvSource u(0.0, UniformStrategy{}, 10);
    CHECK(audit_stream(u.draw_bits(1000000), 0.05, 3).pass);

    SvSource biased(0.2, ConstantBiasStrategy{0.2, 1}, 11);
    CHECK_FALSE(audit_stream(biased.draw_bits(200000), 0.1, 1).pass);

    CHECK_THROWS(audit_stream({1, 0}, 0.1, 3));  // shorter than window+1
}

TEST_CASE("bit file round trip") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "randamp_bits.bin").string();
    SvSource src(0.0, UniformStrategy{}, 12);
    const auto bits = src.draw_bits(123);  // non multiple of 8: padded
    write_bits_file(path, bits);
    auto back = read_bits_file(path);
    REQUIRE(back.size() >= bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) CHECK(back[i] == bits[i]);
    std::remove(path.c_str());
}
