#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "randamp/box.hpp"

namespace randamp {

// P(|L_n - Lbar_n| >= s) <= 2 exp(-n s^2 / 2).
double azuma_bound(std::uint64_t n, double s);

enum class InfeasibleReason { none, gamma_ge_1, n_below_n0 };

// Full derived-parameter record for a protocol run. Every field is a pure
// function of (epsilon, delta, n, N, p_acc).
struct ProtocolParams {
    double epsilon = 0.0;
    double delta = 0.0;    // accept threshold on the empirical Bell average
    std::uint64_t n = 0;   // rounds per block
    std::uint64_t N = 1;   // blocks in device 2 (Protocol II)
    int m = 1;             // output bits, |S| = 2^m
    double p_acc = 1.0;    // acceptance probability supplied by the caller

    double delta_az = 0.0;  // n^{-1/4}
    double eps_az = 0.0;    // 2 exp(-delta_az^2 n / 4)
    double mu = 0.0;        // 1 - sqrt(delta + delta_az)
    double gamma = 0.0;
    double delta1 = 0.0;       // gamma^{mu n} + 2 eps_az (0 if underflowed)
    double log2_delta1 = 0.0;  // exact in log space
    double h = 0.0;            // min-entropy rate bound, see derive_params
    std::uint64_t n0 = 0;      // floor(1/delta^4)
    double eps_def = 0.0;      // de Finetti error at (n, N, epsilon)
    bool feasible = false;
    InfeasibleReason reason = InfeasibleReason::none;
};

ProtocolParams derive_params(double epsilon, double delta, std::uint64_t n,
                             std::uint64_t N = 1, double p_acc = 1.0,
                             int m = 1);

const char* reason_name(InfeasibleReason r);
std::string params_to_json(const ProtocolParams& p);

// Accumulated min-entropy lower bound -mu n log2(gamma) for a chain whose
// per-round conditional output probabilities are capped by gamma in at least
// mu*n rounds.
double min_entropy_accumulation(double gamma, double mu, std::uint64_t n);

// eta = sqrt(gamma^{mu n} + 2 eps_az), the acceptance-probability split point.
double eta_threshold(const ProtocolParams& params);

// Exact joint probability of an outcome/setting sequence under per-round
// conditional boxes that may depend on the full past. `box_at(i, xs, us)`
// must return the round-i box given the first i outcomes/settings.
double chain_rule_oracle(
    const std::function<ConditionalBox(std::size_t, const std::vector<Outcome>&,
                                       const std::vector<Setting>&)>& box_at,
    const std::vector<Outcome>& xs, const std::vector<Setting>& us);

// sqrt(2 ln2 * N^{log2(1+2eps)} * n * sigma_log / N). sigma_log = log2 of the
// per-round outcome alphabet (4 for this box family).
double definetti_bound(std::uint64_t n, std::uint64_t N, double epsilon,
                       double sigma_log);

// A pair of devices coupled through a shared hidden variable: device 1 and
// each block of device 2 respond independently given lambda. This keeps the
// conditional box given any observed past exactly computable by Bayes.
struct HiddenVarTwoDevice {
    std::vector<double> prior;                        // over lambda
    std::vector<ConditionalBox> device1;              // per lambda
    std::vector<std::vector<ConditionalBox>> device2; // [lambda][block]

    // device 1 copies lambda to its output; every block of device 2 does the
    // same. Maximally correlated across the devices.
    static HiddenVarTwoDevice fully_correlated(int n_blocks);
    // device 2 ignores lambda: the two devices are product.
    static HiddenVarTwoDevice product(int n_blocks);
};

class SvSource;

// Monte-Carlo estimate of the averaged trace distance on the left-hand side
// of the de Finetti bound, at one round per block (n = 1). The block index
// and all settings are drawn from `src`; the conditional joint given the
// sampled past is computed exactly.
struct BlockIndependenceEstimate {
    double mean_distance = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};
BlockIndependenceEstimate empirical_block_independence(
    const HiddenVarTwoDevice& device, int n_blocks, SvSource& src,
    std::uint64_t trials, std::uint64_t seed);

}  // namespace randamp
