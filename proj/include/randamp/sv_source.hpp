#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "randamp/box.hpp"

namespace randamp {

// Strategies for the conditional bit law of an epsilon-SV source. Every
// built-in strategy emits conditional probabilities clamped to the band
// [1/2 - eps, 1/2 + eps] by construction.

struct UniformStrategy {};

struct ConstantBiasStrategy {
    double bias = 0.0;   // magnitude, clamped to eps
    int toward = 1;      // favored bit value
};

// Colludes with a known device box: while a setting is being drawn, each bit
// takes the band extreme that minimizes the expected Bell indicator of the
// round, with the remaining setting bits treated as uniform. Bits drawn
// outside a setting context use the full bias toward 1.
struct GreedyAdversarialStrategy {
    std::array<double, 16> indicator_mean_by_setting{};  // q[u] = E[B | u]

    static GreedyAdversarialStrategy against(const ConditionalBox& box);
};

struct ReplayStrategy {
    std::vector<uint8_t> bits;
};

using SvStrategy = std::variant<UniformStrategy, ConstantBiasStrategy,
                                GreedyAdversarialStrategy, ReplayStrategy>;

struct SvAuditReport {
    std::size_t n_bits = 0;
    double worst_conditional_deviation = 0.0;
    bool pass = false;
};

// Stateful epsilon-SV bit source. Deterministic given (seed, strategy,
// history). Single-threaded; run independent instances concurrently.
class SvSource {
  public:
    SvSource(double epsilon, SvStrategy strategy, std::uint64_t seed);

    double epsilon() const { return epsilon_; }
    const std::vector<uint8_t>& history() const { return history_; }

    // The conditional P(next bit = 1 | history); always inside the SV band.
    double next_p1() const;

    int draw_bit();
    std::vector<uint8_t> draw_bits(std::size_t count);
    Setting draw_setting();
    // ceil(log2(n_blocks))-bit codes with rejection resampling of
    // out-of-range values. n_blocks = 1 consumes no bits.
    int draw_block_index(int n_blocks);

  private:
    double epsilon_;
    SvStrategy strategy_;
    std::uint64_t rng_state_;
    std::vector<uint8_t> history_;
    std::size_t replay_pos_ = 0;
    // setting-draw context for the greedy strategy
    int setting_phase_ = -1;  // -1 outside draw_setting, else bits drawn so far
    int setting_prefix_ = 0;

    double uniform01();
};

// Empirical SV audit: conditional one-frequencies on all length-`window`
// histories with enough samples, each allowed a 3-sigma binomial margin.
SvAuditReport audit_stream(const std::vector<uint8_t>& bits, double epsilon,
                           int window, std::size_t min_count = 32);

// Raw bit files: 8 bits per byte, big-endian within each byte.
void write_bits_file(const std::string& path, const std::vector<uint8_t>& bits);
std::vector<uint8_t> read_bits_file(const std::string& path);

// splitmix64 step; used to derive independent stream seeds from one master.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace randamp
