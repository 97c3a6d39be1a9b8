#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace randamp {

// GF(2^n) for n in {4, 8, 16, 32, 64, 128, 256}, little-endian bit order
// (coefficient of x^i at bit i of the word array). Reduction moduli are the
// standard low-weight irreducible polynomials:
//   n=4    x^4 + x + 1
//   n=8    x^8 + x^4 + x^3 + x + 1
//   n=16   x^16 + x^5 + x^3 + x + 1
//   n=32   x^32 + x^7 + x^3 + x^2 + 1
//   n=64   x^64 + x^4 + x^3 + x + 1
//   n=128  x^128 + x^7 + x^2 + x + 1
//   n=256  x^256 + x^10 + x^5 + x^2 + 1
struct FieldElement {
    int n = 8;
    std::array<std::uint64_t, 4> w{};  // up to 256 bits

    FieldElement() = default;
    FieldElement(int bits, std::uint64_t value);
    static FieldElement zero(int bits) { return FieldElement(bits, 0); }
    static FieldElement one(int bits) { return FieldElement(bits, 1); }
    static FieldElement from_bits(int bits, const std::vector<std::uint8_t>& b);

    std::uint64_t low64() const { return w[0]; }
    bool is_zero() const;
    bool operator==(const FieldElement& o) const = default;
};

bool gf_supported_width(int n);
// Reduction taps (modulus minus the x^n term), as a little-endian word array.
std::array<std::uint64_t, 4> gf_modulus_taps(int n);

FieldElement gf_add(const FieldElement& a, const FieldElement& b);
FieldElement gf_mul(const FieldElement& a, const FieldElement& b);
// a^e by square-and-multiply, e as a bit vector (little-endian).
FieldElement gf_pow2k(const FieldElement& a, int k);  // a^(2^k)

// True iff the configured modulus for width n is irreducible over GF(2);
// checked with x^(2^n) == x and x^(2^(n/p)) != x for prime divisors p of n.
bool gf_modulus_irreducible(int n);

}  // namespace randamp
