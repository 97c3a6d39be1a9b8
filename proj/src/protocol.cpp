#include "randamp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace randamp {

namespace {

struct SplitMix {
    std::uint64_t state;

    explicit SplitMix(std::uint64_t seed) : state(seed) {}
    double uniform01() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return double(z >> 11) * 0x1.0p-53;
    }
};

int sample_row(const ConditionalBox& box, int u, double r) {
    double acc = 0.0;
    for (int x = 0; x < 16; ++x) {
        acc += box.at(u, x);
        if (r < acc) return x;
    }
    return 15;
}

// Runs one block of n rounds against the device, settings drawn from src.
// With max_ones >= 0 the block stops once the indicator count exceeds it:
// past that point rejection at threshold max_ones/n is already certain and
// the remaining rounds cannot influence the accept decision or the output.
BlockRecord run_block(const DeviceModel& device, std::size_t block,
                      std::uint64_t n, SvSource& src, SplitMix& rng,
                      const std::vector<Setting>* fixed_settings,
                      std::int64_t max_ones = -1) {
    BlockRecord rec;
    rec.settings.reserve(n);
    rec.outcomes.reserve(n);
    const bool iid = device.is_iid();
    const ConditionalBox iid_box = iid ? device.iid_box() : ConditionalBox{};
    std::vector<std::pair<Outcome, Setting>> rounds;
    rounds.reserve(n);
    std::int64_t ones = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const Setting u =
            fixed_settings ? (*fixed_settings)[i] : src.draw_setting();
        const ConditionalBox& box =
            iid ? iid_box : device.box_for(block, rec.outcomes, rec.settings);
        const Outcome x(sample_row(box, u.idx, rng.uniform01()));
        rec.settings.push_back(u);
        rec.outcomes.push_back(x);
        rounds.emplace_back(x, u);
        if (max_ones >= 0) {
            ones += bell_indicator(x, u);
            if (ones > max_ones) break;
        }
    }
    rec.stats = empirical_stats(rounds);
    return rec;
}

std::vector<std::uint8_t> pack_outcomes(const std::vector<Outcome>& xs) {
    std::vector<std::uint8_t> bits;
    bits.reserve(xs.size() * 4);
    for (Outcome x : xs)
        for (int party = 0; party < 4; ++party)
            bits.push_back(static_cast<std::uint8_t>(x.bit(party)));
    return bits;
}

std::string bits_to_hex(const std::vector<std::uint8_t>& bits) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    int nibble = 0, fill = 0;
    for (std::uint8_t b : bits) {
        nibble = (nibble << 1) | (b & 1);
        if (++fill == 4) {
            out.push_back(digits[nibble]);
            nibble = fill = 0;
        }
    }
    if (fill) out.push_back(digits[nibble << (4 - fill)]);
    return out;
}

}  // namespace

DeviceModel DeviceModel::iid(ConditionalBox box) {
    DeviceModel d;
    d.kind_ = Kind::iid;
    d.boxes_.push_back(std::move(box));
    return d;
}

DeviceModel DeviceModel::block_iid(std::vector<ConditionalBox> boxes) {
    if (boxes.empty())
        throw std::invalid_argument("block_iid: need at least one box");
    DeviceModel d;
    d.kind_ = Kind::block_iid;
    d.boxes_ = std::move(boxes);
    return d;
}

DeviceModel DeviceModel::adaptive(AdaptiveRule rule) {
    DeviceModel d;
    d.kind_ = Kind::adaptive;
    d.rule_ = std::move(rule);
    return d;
}

ConditionalBox DeviceModel::box_for(std::size_t block,
                                    const std::vector<Outcome>& past_x,
                                    const std::vector<Setting>& past_u) const {
    switch (kind_) {
        case Kind::iid: return boxes_[0];
        case Kind::block_iid: return boxes_.at(block);
        case Kind::adaptive: return rule_(past_x, past_u);
    }
    throw std::logic_error("unreachable");
}

Transcript run_protocol1(const ProtocolParams& params,
                         const DeviceModel& device, SvSource& src,
                         const ExtractorSpec& ext, std::uint64_t device_seed) {
    SplitMix rng(device_seed);
    Transcript t;
    t.protocol = 1;
    t.device1 = run_block(device, 0, params.n, src, rng, nullptr);
    t.accepted = t.device1.stats.at_most(params.delta);
    if (t.accepted) {
        t.seed_bits = src.draw_bits(std::size_t(ext.n));
        const FieldElement xw = pack_bits(pack_outcomes(t.device1.outcomes),
                                          ext.n);
        const FieldElement tw = pack_bits(t.seed_bits, ext.n);
        t.output = extract2(xw, tw, ext.m);
    }
    return t;
}

Transcript run_protocol2(const ProtocolParams& params,
                         const DeviceModel& device1,
                         const DeviceModel& device2, SvSource& src,
                         const ExtractorSpec& ext, std::uint64_t device_seed) {
    const int N = int(params.N);
    SplitMix rng(device_seed);
    Transcript t;
    t.protocol = 2;
    t.device1 = run_block(device1, 0, params.n, src, rng, nullptr);
    // settings for every block are drawn from the source up front; outcomes
    // of unchosen blocks are only generated for adaptive devices
    std::vector<std::vector<Setting>> block_settings(N);
    for (int l = 0; l < N; ++l) {
        block_settings[l].reserve(params.n);
        for (std::uint64_t i = 0; i < params.n; ++i)
            block_settings[l].push_back(src.draw_setting());
    }
    t.chosen_block = src.draw_block_index(N);
    t.device2_blocks.resize(N);
    const bool lazy = device2.is_iid() || device2.n_blocks() >= std::size_t(N);
    for (int l = 0; l < N; ++l) {
        if (lazy && l != t.chosen_block) {
            t.device2_blocks[l].settings = block_settings[l];
            continue;
        }
        t.device2_blocks[l] = run_block(device2, std::size_t(l), params.n, src,
                                        rng, &block_settings[l]);
    }
    if (!lazy) {
        // adaptive: blocks were generated in order above
    } else if (t.device2_blocks[t.chosen_block].outcomes.empty()) {
        t.device2_blocks[t.chosen_block] =
            run_block(device2, std::size_t(t.chosen_block), params.n, src, rng,
                      &block_settings[t.chosen_block]);
    }
    const auto& chosen = t.device2_blocks[t.chosen_block];
    t.accepted = t.device1.stats.at_most(params.delta) &&
                 chosen.stats.at_most(params.delta);
    t.eps_def = definetti_bound(params.n, params.N, params.epsilon, 4.0);
    if (t.accepted) {
        t.seed_bits = src.draw_bits(std::size_t(ext.n));
        const FieldElement xw =
            pack_bits(pack_outcomes(t.device1.outcomes), ext.n);
        const FieldElement yw = pack_bits(pack_outcomes(chosen.outcomes), ext.n);
        const FieldElement tw = pack_bits(t.seed_bits, ext.n);
        t.output = extract3(xw, yw, tw, ext.m);
    }
    return t;
}

ExperimentReport soundness_experiment(const ProtocolParams& params,
                                      const DeviceModel& device,
                                      const SourceFactory& make_source,
                                      const ExtractorSpec& ext,
                                      std::uint64_t trials,
                                      std::uint64_t master_seed, int jobs,
                                      bool stop_on_certain_reject) {
    ExperimentReport rep;
    rep.trials = trials;
    const std::int64_t max_ones =
        stop_on_certain_reject
            ? std::int64_t(std::floor(params.delta * double(params.n)))
            : -1;
    std::vector<Transcript> results(trials);
    auto worker = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            SvSource src = make_source(split_seed(master_seed, 2 * trial));
            SplitMix rng(split_seed(master_seed, 2 * trial + 1));
            Transcript t;
            t.protocol = 1;
            t.device1 =
                run_block(device, 0, params.n, src, rng, nullptr, max_ones);
            t.accepted = t.device1.stats.at_most(params.delta) &&
                         t.device1.stats.n == params.n;
            if (t.accepted) {
                t.seed_bits = src.draw_bits(std::size_t(ext.n));
                const FieldElement xw =
                    pack_bits(pack_outcomes(t.device1.outcomes), ext.n);
                const FieldElement tw = pack_bits(t.seed_bits, ext.n);
                t.output = extract2(xw, tw, ext.m);
            }
            results[trial] = std::move(t);
        }
    };
    if (jobs <= 1) {
        worker(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (trials + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            const std::uint64_t b = std::min<std::uint64_t>(j * chunk, trials);
            const std::uint64_t e =
                std::min<std::uint64_t>((j + 1) * chunk, trials);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }
    const bool histogram = ext.m <= 12;
    if (histogram)
        rep.output_distribution.assign(std::size_t(1) << ext.m, 0.0);
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        const Transcript& t = results[trial];
        if (t.accepted) {
            ++rep.accepts;
            if (histogram) {
                std::size_t idx = 0;
                for (int i = ext.m - 1; i >= 0; --i)
                    idx = (idx << 1) | t.output[i];
                rep.output_distribution[idx] += 1.0;
            }
        }
        rep.csv_rows.push_back(std::to_string(trial) + "," +
                               (t.accepted ? "1" : "0") + "," +
                               std::to_string(t.device1.stats.value()) + ",," +
                               bits_to_hex(t.output));
    }
    rep.accept_rate = double(rep.accepts) / double(trials);
    if (rep.accepts > 0 && histogram) {
        for (double& v : rep.output_distribution) v /= double(rep.accepts);
        rep.output_distance = distance_from_uniform(rep.output_distribution);
    }
    rep.product = rep.accept_rate * rep.output_distance;
    return rep;
}

std::array<double, 16> stationary_setting_distribution(
    const SvStrategy& strategy, double epsilon) {
    std::array<double, 16> nu{};
    if (std::holds_alternative<UniformStrategy>(strategy)) {
        nu.fill(1.0 / 16.0);
        return nu;
    }
    if (std::holds_alternative<ConstantBiasStrategy>(strategy)) {
        const auto& c = std::get<ConstantBiasStrategy>(strategy);
        const double b = std::min(std::abs(c.bias), epsilon);
        const double p1 = c.toward ? 0.5 + b : 0.5 - b;
        for (int u = 0; u < 16; ++u) {
            double prob = 1.0;
            for (int k = 0; k < 4; ++k)
                prob *= ((u >> (3 - k)) & 1) ? p1 : (1.0 - p1);
            nu[u] = prob;
        }
        return nu;
    }
    if (std::holds_alternative<GreedyAdversarialStrategy>(strategy)) {
        const auto& g = std::get<GreedyAdversarialStrategy>(strategy);
        for (int u = 0; u < 16; ++u) {
            double prob = 1.0;
            int prefix = 0;
            for (int k = 0; k < 4; ++k) {
                double mean[2];
                for (int bit = 0; bit < 2; ++bit) {
                    const int free_bits = 3 - k;
                    const int p = (prefix << 1) | bit;
                    double acc = 0.0;
                    for (int rest = 0; rest < (1 << free_bits); ++rest)
                        acc += g.indicator_mean_by_setting[(p << free_bits) |
                                                           rest];
                    mean[bit] = acc / double(1 << free_bits);
                }
                double p1 = 0.5;
                if (mean[1] < mean[0]) p1 = 0.5 + epsilon;
                else if (mean[1] > mean[0]) p1 = 0.5 - epsilon;
                const int bit = (u >> (3 - k)) & 1;
                prob *= bit ? p1 : (1.0 - p1);
                prefix = (prefix << 1) | bit;
            }
            nu[u] = prob;
        }
        return nu;
    }
    throw std::invalid_argument(
        "stationary_setting_distribution: replay has no stationary law");
}

double iid_accept_rate(const ConditionalBox& box, const SvStrategy& strategy,
                       double epsilon, double delta, std::uint64_t n,
                       std::uint64_t trials, std::uint64_t seed) {
    const auto nu = stationary_setting_distribution(strategy, epsilon);
    const auto q = indicator_means(box);
    double p = 0.0;
    for (int u = 0; u < 16; ++u) p += nu[u] * q[u];
    p = std::clamp(p, 0.0, 1.0);
    std::mt19937_64 rng(seed);
    std::binomial_distribution<std::uint64_t> binom(n, p);
    std::uint64_t accepts = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const std::uint64_t ones = binom(rng);
        if (double(ones) <= delta * double(n)) ++accepts;
    }
    return double(accepts) / double(trials);
}

ComposableDistance toy_composable_distance(const ToyJoint& joint) {
    const std::size_t W = joint.p.size();
    if (W == 0) throw std::invalid_argument("toy joint: empty");
    const std::size_t S = joint.p[0].size();
    const std::size_t Z = joint.p[0][0].size();
    const std::size_t E = joint.p[0][0][0].size();
    ComposableDistance d;
    // exact: sum over (s,e) of max over w of sum over z
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t e = 0; e < E; ++e) {
            double best = 0.0;
            for (std::size_t w = 0; w < W; ++w) {
                double acc = 0.0;
                for (std::size_t z = 0; z < Z; ++z) {
                    double marg = 0.0;
                    for (std::size_t s2 = 0; s2 < S; ++s2)
                        marg += joint.p[w][s2][z][e];
                    acc += std::abs(joint.p[w][s][z][e] - marg / double(S));
                }
                best = std::max(best, acc);
            }
            d.exact += best;
        }
    }
    // relaxed: |S| * sum over e of max over w of sum over (z,s)
    for (std::size_t e = 0; e < E; ++e) {
        double best = 0.0;
        for (std::size_t w = 0; w < W; ++w) {
            double acc = 0.0;
            for (std::size_t z = 0; z < Z; ++z) {
                double marg = 0.0;
                for (std::size_t s2 = 0; s2 < S; ++s2)
                    marg += joint.p[w][s2][z][e];
                for (std::size_t s = 0; s < S; ++s)
                    acc += std::abs(joint.p[w][s][z][e] - marg / double(S));
            }
            best = std::max(best, acc);
        }
        d.relaxed += double(S) * best;
    }
    return d;
}

std::string transcript_to_json(const Transcript& t) {
    nlohmann::json rounds = nlohmann::json::array();
    for (std::size_t i = 0; i < t.device1.settings.size(); ++i)
        rounds.push_back({{"u", t.device1.settings[i].idx},
                          {"x", t.device1.outcomes[i].idx}});
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& blk : t.device2_blocks) {
        nlohmann::json b = nlohmann::json::array();
        for (std::size_t i = 0; i < blk.outcomes.size(); ++i)
            b.push_back({{"u", blk.settings[i].idx}, {"x", blk.outcomes[i].idx}});
        blocks.push_back(b);
    }
    nlohmann::json j{
        {"schema", "randamp.transcript/1"},
        {"protocol", t.protocol},
        {"rounds", rounds},
        {"L", t.device1.stats.value()},
        {"accepted", t.accepted},
        {"t_hex", bits_to_hex(t.seed_bits)},
        {"s_hex", bits_to_hex(t.output)},
    };
    if (t.protocol == 2) {
        j["blocks"] = blocks;
        j["j"] = t.chosen_block;
        j["Lj"] = t.device2_blocks[t.chosen_block].stats.value();
        j["eps_def"] = t.eps_def;
    }
    return j.dump();
}

}  // namespace randamp
