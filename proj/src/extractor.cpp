#include "randamp/extractor.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "randamp/sv_source.hpp"

namespace randamp {

namespace {

std::vector<std::uint8_t> low_bits(const FieldElement& e, int m) {
    std::vector<std::uint8_t> out(m);
    for (int i = 0; i < m; ++i)
        out[i] = static_cast<std::uint8_t>((e.w[i >> 6] >> (i & 63)) & 1);
    return out;
}

}  // namespace

std::vector<std::uint8_t> extract2(const FieldElement& x,
                                   const FieldElement& t, int m) {
    if (m < 1 || m > x.n) throw std::invalid_argument("extract2: bad m");
    return low_bits(gf_mul(x, t), m);
}

std::vector<std::uint8_t> extract3(const FieldElement& x,
                                   const FieldElement& y,
                                   const FieldElement& t, int m) {
    if (m < 1 || m > x.n) throw std::invalid_argument("extract3: bad m");
    const FieldElement inner = gf_mul(x, y);  // extract2 with all n bits kept
    return low_bits(gf_mul(inner, t), m);
}

std::vector<std::uint8_t> run_extractor(const ExtractorSpec& spec,
                                        const std::vector<FieldElement>& srcs) {
    if (spec.kind == ExtractorKind::two_source_multiply) {
        if (srcs.size() != 2)
            throw std::invalid_argument("two-source extractor needs 2 inputs");
        return extract2(srcs[0], srcs[1], spec.m);
    }
    if (srcs.size() != 3)
        throw std::invalid_argument("three-source extractor needs 3 inputs");
    return extract3(srcs[0], srcs[1], srcs[2], spec.m);
}

double distance_from_uniform(const std::vector<double>& dist) {
    double total = 0.0;
    for (double p : dist) total += p;
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("distance_from_uniform: not a distribution");
    const double u = 1.0 / double(dist.size());
    double d = 0.0;
    for (double p : dist) d += std::abs(p - u);
    return d;
}

double FlatSource::min_entropy() const {
    return std::log2(double(support.size()));
}

FlatSource FlatSource::random(int n, int k_bits, std::uint64_t seed) {
    if (k_bits > n) throw std::invalid_argument("FlatSource: k > n");
    FlatSource s;
    s.n = n;
    const std::size_t size = std::size_t(1) << k_bits;
    std::unordered_set<std::uint64_t> seen;
    std::uint64_t ctr = 0;
    const std::uint64_t mask = n >= 64 ? ~0ULL : (1ULL << n) - 1;
    while (seen.size() < size) {
        const std::uint64_t v = split_seed(seed, ctr++) & mask;
        if (seen.insert(v).second) s.support.push_back(v);
    }
    return s;
}

std::vector<double> exact_output_distribution(
    const ExtractorSpec& spec, const std::vector<FlatSource>& sources) {
    const std::size_t expected =
        spec.kind == ExtractorKind::two_source_multiply ? 2 : 3;
    if (sources.size() != expected)
        throw std::invalid_argument("exact_output_distribution: source count");
    std::size_t combos = 1;
    for (const auto& s : sources) {
        if (s.support.empty())
            throw std::invalid_argument("exact_output_distribution: empty support");
        combos *= s.support.size();
    }
    if (combos > (std::size_t(1) << 24))
        throw std::invalid_argument("exact_output_distribution: too large");

    std::vector<double> hist(std::size_t(1) << spec.m, 0.0);
    auto out_index = [&](const std::vector<std::uint8_t>& bits) {
        std::size_t v = 0;
        for (int i = spec.m - 1; i >= 0; --i) v = (v << 1) | bits[i];
        return v;
    };
    const double weight = 1.0 / double(combos);
    if (expected == 2) {
        for (std::uint64_t a : sources[0].support) {
            const FieldElement x(spec.n, a);
            for (std::uint64_t b : sources[1].support) {
                hist[out_index(extract2(x, FieldElement(spec.n, b), spec.m))] +=
                    weight;
            }
        }
    } else {
        for (std::uint64_t a : sources[0].support) {
            const FieldElement x(spec.n, a);
            for (std::uint64_t b : sources[1].support) {
                const FieldElement inner = gf_mul(x, FieldElement(spec.n, b));
                for (std::uint64_t c : sources[2].support) {
                    const auto bits =
                        extract2(inner, FieldElement(spec.n, c), spec.m);
                    hist[out_index(bits)] += weight;
                }
            }
        }
    }
    return hist;
}

FieldElement pack_bits(const std::vector<std::uint8_t>& bits, int n) {
    return FieldElement::from_bits(n, bits);
}

}  // namespace randamp
