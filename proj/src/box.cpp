#include "randamp/box.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace randamp {

void ConditionalBox::clamp() {
    for (double& v : p) v = std::clamp(v, 0.0, 1.0);
}

BoxValidation validate_box(const ConditionalBox& box, double tol_ns) {
    BoxValidation r;
    r.min_entry = *std::min_element(box.p.begin(), box.p.end());
    for (int u = 0; u < 16; ++u) {
        double s = 0.0;
        for (int x = 0; x < 16; ++x) s += box.at(u, x);
        r.max_normalization_residual =
            std::max(r.max_normalization_residual, std::abs(s - 1.0));
    }
    // For party i, the marginal over the other parties' outcomes must not
    // depend on party i's input.
    for (int party = 0; party < 4; ++party) {
        const int shift = 3 - party;
        for (int urest = 0; urest < 16; ++urest) {
            if ((urest >> shift) & 1) continue;  // canonical co-setting
            const int u0 = urest;
            const int u1 = urest | (1 << shift);
            for (int xrest = 0; xrest < 16; ++xrest) {
                if ((xrest >> shift) & 1) continue;
                double m0 = 0.0, m1 = 0.0;
                for (int xi = 0; xi < 2; ++xi) {
                    const int x = xrest | (xi << shift);
                    m0 += box.at(u0, x);
                    m1 += box.at(u1, x);
                }
                r.max_no_signaling_residual =
                    std::max(r.max_no_signaling_residual, std::abs(m0 - m1));
            }
        }
    }
    r.pass = r.max_normalization_residual <= tol_ns &&
             r.max_no_signaling_residual <= tol_ns &&
             r.min_entry >= -kTolNumeric;
    return r;
}

ConditionalBox uniform_box() {
    ConditionalBox b;
    b.p.fill(1.0 / 16.0);
    return b;
}

namespace {

// 16-dim state vector of (|phi-> |phi~+> + |psi+> |psi~->)/sqrt(2),
// basis index x1*8 + x2*4 + x3*2 + x4. All amplitudes are real.
std::array<double, 16> state_vector() {
    const double s = 1.0 / std::sqrt(2.0);
    // Pair states on qubits (1,2).
    std::array<double, 4> phi_minus{s, 0, 0, -s};  // (|00> - |11>)/sqrt(2)
    std::array<double, 4> psi_plus{0, s, s, 0};    // (|01> + |10>)/sqrt(2)
    // Pair states on qubits (3,4): |0+>,|1-> etc. expanded in Z basis.
    std::array<double, 4> phi_tilde_plus{0.5, 0.5, 0.5, -0.5};
    std::array<double, 4> psi_tilde_minus{0.5, -0.5, -0.5, -0.5};
    std::array<double, 16> psi{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            psi[a * 4 + b] =
                s * (phi_minus[a] * phi_tilde_plus[b] +
                     psi_plus[a] * psi_tilde_minus[b]);
    return psi;
}

}  // namespace

ConditionalBox quantum_ideal_box() {
    const auto psi = state_vector();
    // Single-qubit basis vectors: basis[u][x] = <z|b_{u,x}> components.
    // u=0: X basis {|+>,|->}; u=1: Z basis {|0>,|1>}.
    const double s = 1.0 / std::sqrt(2.0);
    const double basis[2][2][2] = {{{s, s}, {s, -s}}, {{1, 0}, {0, 1}}};
    ConditionalBox box;
    for (int u = 0; u < 16; ++u) {
        Setting su(u);
        for (int x = 0; x < 16; ++x) {
            Outcome ox(x);
            double amp = 0.0;
            for (int z = 0; z < 16; ++z) {
                double w = psi[z];
                for (int party = 0; party < 4 && w != 0.0; ++party) {
                    const int zb = (z >> (3 - party)) & 1;
                    w *= basis[su.bit(party)][ox.bit(party)][zb];
                }
                amp += w;
            }
            box.at(u, x) = amp * amp;
        }
    }
    box.clamp();
    return box;
}

ConditionalBox noisy_box(const ConditionalBox& base, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("noisy_box: eta must be in [0,1]");
    ConditionalBox b;
    for (int i = 0; i < 256; ++i)
        b.p[i] = (1.0 - eta) * base.p[i] + eta / 16.0;
    return b;
}

ConditionalBox DeterministicStrategy::to_box() const {
    ConditionalBox b;
    for (int u = 0; u < 16; ++u) {
        Setting su(u);
        int x = 0;
        for (int party = 0; party < 4; ++party)
            x = x * 2 + response[party][su.bit(party)];
        b.at(u, x) = 1.0;
    }
    return b;
}

std::vector<std::pair<DeterministicStrategy, ConditionalBox>>
enumerate_deterministic_boxes() {
    std::vector<std::pair<DeterministicStrategy, ConditionalBox>> out;
    out.reserve(256);
    for (int code = 0; code < 256; ++code) {
        DeterministicStrategy s;
        int c = code;
        for (int party = 0; party < 4; ++party) {
            s.response[party][0] = c & 1;
            s.response[party][1] = (c >> 1) & 1;
            c >>= 2;
        }
        out.emplace_back(s, s.to_box());
    }
    return out;
}

std::string box_to_json(const ConditionalBox& box) {
    nlohmann::json rows = nlohmann::json::array();
    for (int u = 0; u < 16; ++u) {
        nlohmann::json row = nlohmann::json::array();
        for (int x = 0; x < 16; ++x) row.push_back(box.at(u, x));
        rows.push_back(row);
    }
    nlohmann::json j{{"schema", "randamp.box/1"}, {"p", rows}};
    return j.dump();
}

ConditionalBox box_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const auto& rows = j.at("p");
    if (rows.size() != 16) throw std::invalid_argument("box json: need 16 rows");
    ConditionalBox box;
    for (int u = 0; u < 16; ++u) {
        const auto& row = rows[u];
        if (row.size() != 16)
            throw std::invalid_argument("box json: need 16 entries per row");
        for (int x = 0; x < 16; ++x) box.at(u, x) = row[x].get<double>();
    }
    return box;
}

}  // namespace randamp
