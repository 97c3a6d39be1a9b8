#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace randamp {

// Four parties, one bit of input and one bit of output each.
// A setting/outcome is packed into a 4-bit index: party 1 is the most
// significant bit, party 4 the least (index = b1*8 + b2*4 + b3*2 + b4).
inline constexpr int kParties = 4;
inline constexpr int kNumSettings = 16;
inline constexpr int kNumOutcomes = 16;

struct Setting {
    uint8_t idx = 0;  // in [0,16)

    constexpr Setting() = default;
    constexpr explicit Setting(int index) : idx(static_cast<uint8_t>(index)) {}
    static constexpr Setting from_bits(int u1, int u2, int u3, int u4) {
        return Setting(u1 * 8 + u2 * 4 + u3 * 2 + u4);
    }
    // bit(0) = party 1's input, ..., bit(3) = party 4's input
    constexpr int bit(int party) const { return (idx >> (3 - party)) & 1; }
};

struct Outcome {
    uint8_t idx = 0;

    constexpr Outcome() = default;
    constexpr explicit Outcome(int index) : idx(static_cast<uint8_t>(index)) {}
    static constexpr Outcome from_bits(int x1, int x2, int x3, int x4) {
        return Outcome(x1 * 8 + x2 * 4 + x3 * 2 + x4);
    }
    constexpr int bit(int party) const { return (idx >> (3 - party)) & 1; }
    constexpr int parity() const {
        uint8_t v = idx;
        v ^= v >> 2;
        v ^= v >> 1;
        return v & 1;
    }
};

inline constexpr double kTolNumeric = 1e-12;  // construction tolerance
inline constexpr double kTolNoSignaling = 1e-9;

// P(x|u) for a four-partite binary-in/binary-out device, stored row-major:
// p[u*16 + x]. Entries are clamped to [0,1] on normalize().
struct ConditionalBox {
    std::array<double, 256> p{};

    double& at(int u, int x) { return p[u * 16 + x]; }
    double at(int u, int x) const { return p[u * 16 + x]; }
    double at(Setting u, Outcome x) const { return p[u.idx * 16 + x.idx]; }

    // Clamps entries to [0,1]; rows are expected to already sum to 1.
    void clamp();
};

struct BoxValidation {
    double max_normalization_residual = 0.0;
    double max_no_signaling_residual = 0.0;
    double min_entry = 0.0;
    bool pass = false;
};

// Checks normalization of every row and the 256 per-party no-signaling
// marginal equalities (4 parties x 8 co-settings x 8 co-outcomes).
BoxValidation validate_box(const ConditionalBox& box,
                           double tol_ns = kTolNoSignaling);

// The uniform box p(x|u) = 1/16.
ConditionalBox uniform_box();

// The box obtained by measuring the four-qubit state
// (|phi-> |phi~+> + |psi+> |psi~->)/sqrt(2) with X (u=0) or Z (u=1) on each
// qubit. Computed numerically from the state vector, not hardcoded.
ConditionalBox quantum_ideal_box();

// (1-eta) * base + eta * uniform. Throws std::invalid_argument if eta is
// outside [0,1].
ConditionalBox noisy_box(const ConditionalBox& base, double eta);

// A local deterministic strategy: per party, the response to input 0 and 1.
struct DeterministicStrategy {
    // response[party][input] in {0,1}
    std::array<std::array<int, 2>, 4> response{};

    ConditionalBox to_box() const;
};

// All 4^4 = 256 deterministic strategies with their induced boxes.
std::vector<std::pair<DeterministicStrategy, ConditionalBox>>
enumerate_deterministic_boxes();

// JSON (de)serialization, schema {"schema": ..., "p": [[...16...] x16]}.
std::string box_to_json(const ConditionalBox& box);
ConditionalBox box_from_json(const std::string& text);

}  // namespace randamp
