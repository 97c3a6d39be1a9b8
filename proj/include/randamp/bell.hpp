#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "randamp/box.hpp"

namespace randamp {

// Settings with nontrivial Bell constraints: U0 demands even outcome parity,
// U1 odd outcome parity.
inline constexpr std::array<int, 4> kSettingsU0{1, 2, 4, 8};     // 0001..1000
inline constexpr std::array<int, 4> kSettingsU1{7, 11, 13, 14};  // 0111..1110

// B(x,u) = 1 iff (u in U0 and parity(x)=0) or (u in U1 and parity(x)=1).
int bell_indicator(Outcome x, Setting u);

// The full 16x16 indicator table, indexed [u][x]. Exactly 64 ones.
const std::array<std::array<int, 16>, 16>& bell_indicator_table();

// Sum_{x,u} B(x,u) p(x|u). In [0,16]; 0 at the no-signaling algebraic
// optimum, >= 2 for every local deterministic box.
double bell_value(const ConditionalBox& box);

// Sum_{x,u} nu(u) B(x,u) p(x|u) for a setting distribution nu. With nu
// uniform this equals bell_value(box)/16. Throws if nu is not a distribution.
double weighted_bell_value(const ConditionalBox& box,
                           const std::array<double, 16>& nu);

// Expected indicator per setting: q[u] = Sum_x B(x,u) p(x|u).
std::array<double, 16> indicator_means(const ConditionalBox& box);

// Empirical Bell average kept as an exact count/n pair so the accept
// comparison is free of rounding.
struct EmpiricalBellStats {
    std::uint64_t ones = 0;
    std::uint64_t n = 0;
    std::vector<uint8_t> indicators;

    double value() const { return n ? double(ones) / double(n) : 0.0; }
    // ones/n <= threshold, evaluated without forming the quotient
    bool at_most(double threshold) const {
        return double(ones) <= threshold * double(n);
    }
};

EmpiricalBellStats empirical_stats(
    const std::vector<std::pair<Outcome, Setting>>& rounds);

// Markov-type count behind the linear-fraction argument: given nonnegative
// per-round means with average <= delta, the fraction of entries <= sqrt(delta)
// is at least 1 - sqrt(delta). Throws if the average exceeds delta.
struct LinearFraction {
    double fraction;
    double threshold;  // sqrt(delta)
};
LinearFraction linear_fraction(const std::vector<double>& means, double delta);

}  // namespace randamp
