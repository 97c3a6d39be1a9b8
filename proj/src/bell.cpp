#include "randamp/bell.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace randamp {

int bell_indicator(Outcome x, Setting u) {
    const bool in_u0 =
        std::find(kSettingsU0.begin(), kSettingsU0.end(), u.idx) !=
        kSettingsU0.end();
    const bool in_u1 =
        std::find(kSettingsU1.begin(), kSettingsU1.end(), u.idx) !=
        kSettingsU1.end();
    if (in_u0) return x.parity() == 0;
    if (in_u1) return x.parity() == 1;
    return 0;
}

const std::array<std::array<int, 16>, 16>& bell_indicator_table() {
    static const auto table = [] {
        std::array<std::array<int, 16>, 16> t{};
        for (int u = 0; u < 16; ++u)
            for (int x = 0; x < 16; ++x)
                t[u][x] = bell_indicator(Outcome(x), Setting(u));
        return t;
    }();
    return table;
}

double bell_value(const ConditionalBox& box) {
    const auto& b = bell_indicator_table();
    double v = 0.0;
    for (int u = 0; u < 16; ++u)
        for (int x = 0; x < 16; ++x)
            if (b[u][x]) v += box.at(u, x);
    return v;
}

double weighted_bell_value(const ConditionalBox& box,
                           const std::array<double, 16>& nu) {
    double total = 0.0;
    for (double w : nu) {
        if (w < -1e-12) throw std::invalid_argument("weighted_bell_value: nu < 0");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("weighted_bell_value: nu does not sum to 1");
    const auto& b = bell_indicator_table();
    double v = 0.0;
    for (int u = 0; u < 16; ++u) {
        double row = 0.0;
        for (int x = 0; x < 16; ++x)
            if (b[u][x]) row += box.at(u, x);
        v += nu[u] * row;
    }
    return v;
}

std::array<double, 16> indicator_means(const ConditionalBox& box) {
    const auto& b = bell_indicator_table();
    std::array<double, 16> q{};
    for (int u = 0; u < 16; ++u)
        for (int x = 0; x < 16; ++x)
            if (b[u][x]) q[u] += box.at(u, x);
    return q;
}

EmpiricalBellStats empirical_stats(
    const std::vector<std::pair<Outcome, Setting>>& rounds) {
    if (rounds.empty()) throw std::invalid_argument("empirical_stats: no rounds");
    EmpiricalBellStats s;
    s.n = rounds.size();
    s.indicators.reserve(rounds.size());
    for (const auto& [x, u] : rounds) {
        const uint8_t b = static_cast<uint8_t>(bell_indicator(x, u));
        s.indicators.push_back(b);
        s.ones += b;
    }
    return s;
}

LinearFraction linear_fraction(const std::vector<double>& means, double delta) {
    if (means.empty()) throw std::invalid_argument("linear_fraction: empty");
    double sum = 0.0;
    for (double m : means) {
        if (m < 0.0) throw std::invalid_argument("linear_fraction: negative mean");
        sum += m;
    }
    if (sum > delta * double(means.size()) * (1.0 + 1e-12))
        throw std::invalid_argument("linear_fraction: average exceeds delta");
    const double threshold = std::sqrt(delta);
    std::size_t good = 0;
    for (double m : means)
        if (m <= threshold) ++good;
    return {double(good) / double(means.size()), threshold};
}

}  // namespace randamp
