#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "randamp/gf2.hpp"

namespace randamp {

enum class ExtractorKind { two_source_multiply, three_source_composed };

struct ExtractorSpec {
    ExtractorKind kind = ExtractorKind::two_source_multiply;
    int n = 8;  // input bits per source
    int m = 1;  // output bits, m <= n
};

// Two-source extractor: the low m bits of the GF(2^n) product x*t.
std::vector<std::uint8_t> extract2(const FieldElement& x,
                                   const FieldElement& t, int m);

// Three-source composition: extract2(extract2(x, y, n), t, m).
std::vector<std::uint8_t> extract3(const FieldElement& x,
                                   const FieldElement& y,
                                   const FieldElement& t, int m);

std::vector<std::uint8_t> run_extractor(const ExtractorSpec& spec,
                                        const std::vector<FieldElement>& srcs);

// 1-norm distance Sum_s |p(s) - 2^-m| between a distribution over 2^m values
// and uniform. Throws if the table does not sum to 1 within 1e-9.
double distance_from_uniform(const std::vector<double>& dist);

// Uniform distribution over an explicit support of n-bit strings;
// min-entropy log2(|support|).
struct FlatSource {
    int n = 8;
    std::vector<std::uint64_t> support;

    double min_entropy() const;
    static FlatSource random(int n, int k_bits, std::uint64_t seed);
};

// Exact output distribution of the extractor under independent uniform draws
// from each source's support. The product of support sizes must be <= 2^24.
std::vector<double> exact_output_distribution(
    const ExtractorSpec& spec, const std::vector<FlatSource>& sources);

// Packs a bit sequence (one bit per byte) into an n-bit field element,
// truncating or zero-padding; bit i of the stream lands on coefficient i.
FieldElement pack_bits(const std::vector<std::uint8_t>& bits, int n);

}  // namespace randamp
