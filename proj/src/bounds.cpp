#include "randamp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "randamp/lp.hpp"
#include "randamp/sv_source.hpp"

namespace randamp {

double azuma_bound(std::uint64_t n, double s) {
    if (n < 1) throw std::invalid_argument("azuma_bound: n < 1");
    if (!(s > 0.0)) return 2.0;
    return 2.0 * std::exp(-double(n) * s * s / 2.0);
}

namespace {

// log2(2^a + 2^b) without underflow
double log2_add_exp2(double a, double b) {
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log2(1.0 + std::exp2(lo - hi));
}

}  // namespace

ProtocolParams derive_params(double epsilon, double delta, std::uint64_t n,
                             std::uint64_t N, double p_acc, int m) {
    if (!(epsilon >= 0.0 && epsilon < 0.5))
        throw std::invalid_argument("derive_params: epsilon out of range");
    if (!(delta > 0.0)) throw std::invalid_argument("derive_params: delta <= 0");
    if (n < 1) throw std::invalid_argument("derive_params: n < 1");

    ProtocolParams p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.n = n;
    p.N = N;
    p.m = m;
    p.p_acc = p_acc;
    p.delta_az = std::pow(double(n), -0.25);
    p.eps_az = 2.0 * std::exp(-p.delta_az * p.delta_az * double(n) / 4.0);
    const double dtot = delta + p.delta_az;
    p.mu = 1.0 - std::sqrt(dtot);
    p.gamma = gamma_of(dtot, epsilon);

    // delta1 = gamma^{mu n} + 2 eps_az, tracked in log space; both terms are
    // on the 2^{-Omega(sqrt n)} scale at large n.
    const double log2_gamma_mun =
        p.mu * double(n) * std::log2(std::max(p.gamma, 1e-300));
    const double log2_two_eps_az =
        2.0 - std::sqrt(double(n)) / (4.0 * std::log(2.0));
    p.log2_delta1 = log2_add_exp2(log2_gamma_mun, log2_two_eps_az);
    p.delta1 = std::exp2(p.log2_delta1);
    p.h = 0.5 * (std::log2(std::max(p_acc, 1e-300)) - p.log2_delta1);

    const double n0_real = 1.0 / std::pow(delta, 4.0);
    p.n0 = n0_real > 1e18 ? std::uint64_t(1) << 62
                          : std::uint64_t(std::floor(n0_real));
    p.eps_def = definetti_bound(n, N, epsilon, 4.0);

    if (p.gamma >= 1.0) {
        p.feasible = false;
        p.reason = InfeasibleReason::gamma_ge_1;
    } else if (n < p.n0) {
        p.feasible = false;
        p.reason = InfeasibleReason::n_below_n0;
    } else {
        p.feasible = true;
        p.reason = InfeasibleReason::none;
    }
    return p;
}

const char* reason_name(InfeasibleReason r) {
    switch (r) {
        case InfeasibleReason::gamma_ge_1: return "gamma_ge_1";
        case InfeasibleReason::n_below_n0: return "n_below_n0";
        default: return "none";
    }
}

std::string params_to_json(const ProtocolParams& p) {
    nlohmann::json j{
        {"schema", "randamp.params/1"},
        {"epsilon", p.epsilon},
        {"delta", p.delta},
        {"n", p.n},
        {"N", p.N},
        {"m", p.m},
        {"p_acc", p.p_acc},
        {"delta_az", p.delta_az},
        {"eps_az", p.eps_az},
        {"mu", p.mu},
        {"gamma", p.gamma},
        {"delta1", p.delta1},
        {"log2_delta1", p.log2_delta1},
        {"h", p.h},
        {"n0", p.n0},
        {"eps_def", p.eps_def},
        {"feasible", p.feasible},
        {"reason", reason_name(p.reason)},
    };
    return j.dump();
}

double min_entropy_accumulation(double gamma, double mu, std::uint64_t n) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("min_entropy_accumulation: gamma not in (0,1]");
    if (!(mu >= 0.0 && mu <= 1.0))
        throw std::invalid_argument("min_entropy_accumulation: mu not in [0,1]");
    return -mu * double(n) * std::log2(gamma);
}

double eta_threshold(const ProtocolParams& params) {
    return std::exp2(0.5 * params.log2_delta1);
}

double chain_rule_oracle(
    const std::function<ConditionalBox(std::size_t, const std::vector<Outcome>&,
                                       const std::vector<Setting>&)>& box_at,
    const std::vector<Outcome>& xs, const std::vector<Setting>& us) {
    if (xs.size() != us.size())
        throw std::invalid_argument("chain_rule_oracle: length mismatch");
    double joint = 1.0;
    std::vector<Outcome> past_x;
    std::vector<Setting> past_u;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const ConditionalBox box = box_at(i, past_x, past_u);
        joint *= box.at(us[i], xs[i]);
        past_x.push_back(xs[i]);
        past_u.push_back(us[i]);
    }
    return joint;
}

double definetti_bound(std::uint64_t n, std::uint64_t N, double epsilon,
                       double sigma_log) {
    if (N < 1) throw std::invalid_argument("definetti_bound: N < 1");
    const double exponent = std::log2(1.0 + 2.0 * epsilon);
    return std::sqrt(2.0 * std::log(2.0) * std::pow(double(N), exponent) *
                     double(n) * sigma_log / double(N));
}

HiddenVarTwoDevice HiddenVarTwoDevice::fully_correlated(int n_blocks) {
    HiddenVarTwoDevice d;
    d.prior.assign(16, 1.0 / 16.0);
    for (int lambda = 0; lambda < 16; ++lambda) {
        ConditionalBox copy_box;
        for (int u = 0; u < 16; ++u) copy_box.at(u, lambda) = 1.0;
        d.device1.push_back(copy_box);
        d.device2.emplace_back(n_blocks, copy_box);
    }
    return d;
}

HiddenVarTwoDevice HiddenVarTwoDevice::product(int n_blocks) {
    HiddenVarTwoDevice d = fully_correlated(n_blocks);
    for (auto& blocks : d.device2)
        std::fill(blocks.begin(), blocks.end(), uniform_box());
    return d;
}

BlockIndependenceEstimate empirical_block_independence(
    const HiddenVarTwoDevice& device, int n_blocks, SvSource& src,
    std::uint64_t trials, std::uint64_t seed) {
    const int K = int(device.prior.size());
    if (K == 0 || int(device.device1.size()) != K ||
        int(device.device2.size()) != K)
        throw std::invalid_argument("empirical_block_independence: bad model");
    std::uint64_t rng = seed;
    auto unif = [&rng]() {
        rng += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = rng;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return double(z >> 11) * 0x1.0p-53;
    };

    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const int j = src.draw_block_index(n_blocks);
        const Setting u = src.draw_setting();
        std::vector<Setting> v(n_blocks);
        for (int l = 0; l < n_blocks; ++l) v[l] = src.draw_setting();

        // sample lambda and the outcomes of blocks before j
        double r = unif();
        int lambda = K - 1;
        for (int k = 0; k < K; ++k) {
            r -= device.prior[k];
            if (r <= 0.0) {
                lambda = k;
                break;
            }
        }
        std::vector<double> post(device.prior);
        for (int l = 0; l < j; ++l) {
            const ConditionalBox& b = device.device2[lambda][l];
            double rr = unif();
            int y = 15;
            for (int cand = 0; cand < 16; ++cand) {
                rr -= b.at(v[l].idx, cand);
                if (rr <= 0.0) {
                    y = cand;
                    break;
                }
            }
            for (int k = 0; k < K; ++k)
                post[k] *= device.device2[k][l].at(v[l].idx, y);
        }
        double z = 0.0;
        for (double w : post) z += w;
        if (z <= 0.0) continue;  // sampled past has probability 0 under model
        for (double& w : post) w /= z;

        // exact conditional joint and marginals given the sampled past
        double joint[16][16] = {};
        double m1[16] = {}, m2[16] = {};
        for (int k = 0; k < K; ++k) {
            if (post[k] == 0.0) continue;
            for (int x = 0; x < 16; ++x) {
                const double px = device.device1[k].at(u.idx, x);
                if (px == 0.0) continue;
                m1[x] += post[k] * px;
                for (int y = 0; y < 16; ++y) {
                    const double py = device.device2[k][j].at(v[j].idx, y);
                    if (py != 0.0) joint[x][y] += post[k] * px * py;
                }
            }
            for (int y = 0; y < 16; ++y)
                m2[y] += post[k] * device.device2[k][j].at(v[j].idx, y);
        }
        double dist = 0.0;
        for (int x = 0; x < 16; ++x)
            for (int y = 0; y < 16; ++y)
                dist += std::abs(joint[x][y] - m1[x] * m2[y]);
        sum += dist;
        sum_sq += dist * dist;
    }
    BlockIndependenceEstimate est;
    est.trials = trials;
    est.mean_distance = sum / double(trials);
    const double var =
        std::max(0.0, sum_sq / double(trials) -
                          est.mean_distance * est.mean_distance);
    est.std_error = std::sqrt(var / double(trials));
    return est;
}

}  // namespace randamp
