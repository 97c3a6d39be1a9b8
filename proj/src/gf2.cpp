#include "randamp/gf2.hpp"

#include <stdexcept>

namespace randamp {

namespace {

struct Wide {
    std::array<std::uint64_t, 8> w{};  // 512 bits

    bool bit(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
    void flip_from(const std::array<std::uint64_t, 4>& src, int shift) {
        // xor src << shift into this
        const int word = shift >> 6, off = shift & 63;
        for (int i = 0; i < 4; ++i) {
            if (src[i] == 0) continue;
            w[i + word] ^= src[i] << off;
            if (off && i + word + 1 < 8) w[i + word + 1] ^= src[i] >> (64 - off);
        }
    }
};

int highest_bit(const Wide& v, int from) {
    for (int i = from; i >= 0; --i)
        if (v.bit(i)) return i;
    return -1;
}

}  // namespace

bool gf_supported_width(int n) {
    return n == 4 || n == 8 || n == 16 || n == 32 || n == 64 || n == 128 ||
           n == 256;
}

std::array<std::uint64_t, 4> gf_modulus_taps(int n) {
    switch (n) {
        case 4: return {0x3, 0, 0, 0};  // x^4+x+1 -> taps x+1
        case 8: return {0x1B, 0, 0, 0};
        case 16: return {(1ULL << 5) | (1ULL << 3) | (1ULL << 1) | 1, 0, 0, 0};
        case 32: return {(1ULL << 7) | (1ULL << 3) | (1ULL << 2) | 1, 0, 0, 0};
        case 64: return {(1ULL << 4) | (1ULL << 3) | (1ULL << 1) | 1, 0, 0, 0};
        case 128: return {(1ULL << 7) | (1ULL << 2) | (1ULL << 1) | 1, 0, 0, 0};
        case 256: return {(1ULL << 10) | (1ULL << 5) | (1ULL << 2) | 1, 0, 0, 0};
        default: throw std::invalid_argument("gf: unsupported field width");
    }
}

FieldElement::FieldElement(int bits, std::uint64_t value) : n(bits) {
    if (!gf_supported_width(bits))
        throw std::invalid_argument("gf: unsupported field width");
    w[0] = value;
    if (bits < 64) w[0] &= (1ULL << bits) - 1;
}

FieldElement FieldElement::from_bits(int bits,
                                     const std::vector<std::uint8_t>& b) {
    FieldElement e(bits, 0);
    const std::size_t count = std::min<std::size_t>(b.size(), bits);
    for (std::size_t i = 0; i < count; ++i)
        if (b[i] & 1) e.w[i >> 6] |= 1ULL << (i & 63);
    return e;
}

bool FieldElement::is_zero() const {
    return w[0] == 0 && w[1] == 0 && w[2] == 0 && w[3] == 0;
}

FieldElement gf_add(const FieldElement& a, const FieldElement& b) {
    if (a.n != b.n) throw std::invalid_argument("gf_add: width mismatch");
    FieldElement c = a;
    for (int i = 0; i < 4; ++i) c.w[i] ^= b.w[i];
    return c;
}

FieldElement gf_mul(const FieldElement& a, const FieldElement& b) {
    if (a.n != b.n) throw std::invalid_argument("gf_mul: width mismatch");
    const int n = a.n;
    // carryless schoolbook product
    Wide prod;
    for (int i = 0; i < n; ++i)
        if ((a.w[i >> 6] >> (i & 63)) & 1) prod.flip_from(b.w, i);
    // reduce modulo x^n + taps
    const auto taps = gf_modulus_taps(n);
    for (int bit = highest_bit(prod, 2 * n - 1); bit >= n;
         bit = highest_bit(prod, bit)) {
        prod.w[bit >> 6] ^= 1ULL << (bit & 63);
        Wide t;
        t.flip_from(taps, bit - n);
        for (int i = 0; i < 8; ++i) prod.w[i] ^= t.w[i];
    }
    FieldElement c(n, 0);
    for (int i = 0; i < 4; ++i) c.w[i] = prod.w[i];
    if (n < 64) c.w[0] &= (1ULL << n) - 1;
    return c;
}

FieldElement gf_pow2k(const FieldElement& a, int k) {
    FieldElement r = a;
    for (int i = 0; i < k; ++i) r = gf_mul(r, r);
    return r;
}

bool gf_modulus_irreducible(int n) {
    // x^(2^n) == x (mod f) and x^(2^(n/p)) != x for every prime p | n.
    const FieldElement x(n, 2);
    if (!(gf_pow2k(x, n) == x)) return false;
    int m = n;
    std::vector<int> primes;
    for (int p = 2; p * p <= m; ++p)
        while (m % p == 0) {
            if (primes.empty() || primes.back() != p) primes.push_back(p);
            m /= p;
        }
    if (m > 1) primes.push_back(m);
    for (int p : primes)
        if (gf_pow2k(x, n / p) == x) return false;
    return true;
}

}  // namespace randamp
