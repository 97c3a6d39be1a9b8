#include "randamp/sv_source.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "randamp/bell.hpp"

namespace randamp {

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + stream * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

GreedyAdversarialStrategy GreedyAdversarialStrategy::against(
    const ConditionalBox& box) {
    GreedyAdversarialStrategy s;
    s.indicator_mean_by_setting = indicator_means(box);
    return s;
}

SvSource::SvSource(double epsilon, SvStrategy strategy, std::uint64_t seed)
    : epsilon_(epsilon), strategy_(std::move(strategy)), rng_state_(seed) {
    if (!(epsilon >= 0.0 && epsilon < 0.5))
        throw std::invalid_argument("SvSource: epsilon must be in [0, 1/2)");
}

double SvSource::uniform01() {
    rng_state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = rng_state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return double(z >> 11) * 0x1.0p-53;
}

double SvSource::next_p1() const {
    double p1 = 0.5;
    if (std::holds_alternative<ConstantBiasStrategy>(strategy_)) {
        const auto& s = std::get<ConstantBiasStrategy>(strategy_);
        const double b = std::min(std::abs(s.bias), epsilon_);
        p1 = s.toward ? 0.5 + b : 0.5 - b;
    } else if (std::holds_alternative<GreedyAdversarialStrategy>(strategy_)) {
        const auto& s = std::get<GreedyAdversarialStrategy>(strategy_);
        if (setting_phase_ >= 0) {
            // Mean indicator over settings extending prefix|bit, remaining
            // bits uniform.
            const int fixed = setting_phase_ + 1;
            double mean[2] = {0.0, 0.0};
            for (int bit = 0; bit < 2; ++bit) {
                const int prefix = (setting_prefix_ << 1) | bit;
                const int free_bits = 4 - fixed;
                double acc = 0.0;
                for (int rest = 0; rest < (1 << free_bits); ++rest)
                    acc += s.indicator_mean_by_setting[(prefix << free_bits) |
                                                       rest];
                mean[bit] = acc / double(1 << free_bits);
            }
            if (mean[1] < mean[0])
                p1 = 0.5 + epsilon_;
            else if (mean[1] > mean[0])
                p1 = 0.5 - epsilon_;
        } else {
            p1 = 0.5 + epsilon_;  // seed bits: any in-band law is allowed
        }
    } else if (std::holds_alternative<ReplayStrategy>(strategy_)) {
        const auto& s = std::get<ReplayStrategy>(strategy_);
        if (replay_pos_ >= s.bits.size())
            throw std::out_of_range("SvSource: replay stream exhausted");
        p1 = s.bits[replay_pos_] ? 1.0 : 0.0;  // audited, not assumed in-band
    }
    return p1;
}

int SvSource::draw_bit() {
    const double p1 = next_p1();
    int bit;
    if (std::holds_alternative<ReplayStrategy>(strategy_)) {
        bit = std::get<ReplayStrategy>(strategy_).bits[replay_pos_++];
    } else {
        bit = uniform01() < p1 ? 1 : 0;
    }
    history_.push_back(static_cast<uint8_t>(bit));
    if (setting_phase_ >= 0) {
        setting_prefix_ = (setting_prefix_ << 1) | bit;
        ++setting_phase_;
    }
    return bit;
}

std::vector<uint8_t> SvSource::draw_bits(std::size_t count) {
    std::vector<uint8_t> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(static_cast<uint8_t>(draw_bit()));
    return out;
}

Setting SvSource::draw_setting() {
    setting_phase_ = 0;
    setting_prefix_ = 0;
    for (int i = 0; i < 4; ++i) draw_bit();
    const Setting u(setting_prefix_);
    setting_phase_ = -1;
    setting_prefix_ = 0;
    return u;
}

int SvSource::draw_block_index(int n_blocks) {
    if (n_blocks < 1)
        throw std::invalid_argument("draw_block_index: n_blocks < 1");
    if (n_blocks == 1) return 0;
    int k = 0;
    while ((1 << k) < n_blocks) ++k;
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        int code = 0;
        for (int i = 0; i < k; ++i) code = (code << 1) | draw_bit();
        if (code < n_blocks) return code;
    }
    throw std::runtime_error("draw_block_index: rejection loop did not halt");
}

SvAuditReport audit_stream(const std::vector<uint8_t>& bits, double epsilon,
                           int window, std::size_t min_count) {
    if (window < 1) throw std::invalid_argument("audit_stream: window < 1");
    if (bits.size() < static_cast<std::size_t>(window) + 1)
        throw std::invalid_argument("audit_stream: stream shorter than window+1");
    const std::size_t patterns = std::size_t(1) << window;
    std::vector<std::uint64_t> count(patterns, 0), ones(patterns, 0);
    for (std::size_t i = window; i < bits.size(); ++i) {
        std::size_t pat = 0;
        for (int k = 0; k < window; ++k)
            pat = (pat << 1) | bits[i - window + k];
        ++count[pat];
        ones[pat] += bits[i];
    }
    SvAuditReport r;
    r.n_bits = bits.size();
    r.pass = true;
    for (std::size_t pat = 0; pat < patterns; ++pat) {
        if (count[pat] < min_count) continue;
        const double f = double(ones[pat]) / double(count[pat]);
        const double dev = std::abs(f - 0.5);
        r.worst_conditional_deviation =
            std::max(r.worst_conditional_deviation, dev);
        const double pq = std::max(f * (1.0 - f), 1.0 / double(count[pat]));
        const double margin = 3.0 * std::sqrt(pq / double(count[pat]));
        if (dev > epsilon + margin) r.pass = false;
    }
    return r;
}

void write_bits_file(const std::string& path, const std::vector<uint8_t>& bits) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    uint8_t byte = 0;
    int fill = 0;
    for (uint8_t b : bits) {
        byte = static_cast<uint8_t>((byte << 1) | (b & 1));
        if (++fill == 8) {
            f.put(static_cast<char>(byte));
            byte = 0;
            fill = 0;
        }
    }
    if (fill) f.put(static_cast<char>(byte << (8 - fill)));
}

std::vector<uint8_t> read_bits_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    std::vector<uint8_t> bits;
    char c;
    while (f.get(c)) {
        const uint8_t byte = static_cast<uint8_t>(c);
        for (int i = 7; i >= 0; --i) bits.push_back((byte >> i) & 1);
    }
    return bits;
}

}  // namespace randamp
