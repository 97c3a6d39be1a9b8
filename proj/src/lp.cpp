#include "randamp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "randamp/bell.hpp"

namespace randamp {

namespace {

constexpr int kVars = 256;  // p(x|u), index u*16 + x
constexpr double kPivotTol = 1e-9;

// One equality row of the box polytope, dense over the 256 variables.
struct EqRow {
    std::vector<double> a;
    double rhs;
};

// 16 normalization rows followed by 256 no-signaling rows (party-major,
// then co-setting, then co-outcome). Total 272; rank 176.
const std::vector<EqRow>& equality_rows() {
    static const std::vector<EqRow> rows = [] {
        std::vector<EqRow> out;
        out.reserve(272);
        for (int u = 0; u < 16; ++u) {
            EqRow r{std::vector<double>(kVars, 0.0), 1.0};
            for (int x = 0; x < 16; ++x) r.a[u * 16 + x] = 1.0;
            out.push_back(std::move(r));
        }
        for (int party = 0; party < 4; ++party) {
            const int shift = 3 - party;
            for (int urest = 0; urest < 16; ++urest) {
                if ((urest >> shift) & 1) continue;
                const int u0 = urest;
                const int u1 = urest | (1 << shift);
                for (int xrest = 0; xrest < 16; ++xrest) {
                    if ((xrest >> shift) & 1) continue;
                    EqRow r{std::vector<double>(kVars, 0.0), 0.0};
                    for (int xi = 0; xi < 2; ++xi) {
                        const int x = xrest | (xi << shift);
                        r.a[u0 * 16 + x] += 1.0;
                        r.a[u1 * 16 + x] -= 1.0;
                    }
                    out.push_back(std::move(r));
                }
            }
        }
        return out;
    }();
    return rows;
}

// Indices of a maximal linearly independent subset of equality_rows(),
// found by Gaussian elimination with partial pivoting.
const std::vector<int>& independent_equality_rows() {
    static const std::vector<int> kept = [] {
        const auto& rows = equality_rows();
        std::vector<int> idx;
        std::vector<std::vector<double>> basisvecs;
        std::vector<int> pivots;
        for (int r = 0; r < int(rows.size()); ++r) {
            std::vector<double> v = rows[r].a;
            for (std::size_t k = 0; k < basisvecs.size(); ++k) {
                const double f = v[pivots[k]];
                if (f == 0.0) continue;
                for (int j = 0; j < kVars; ++j) v[j] -= f * basisvecs[k][j];
            }
            int piv = -1;
            double best = 1e-8;
            for (int j = 0; j < kVars; ++j)
                if (std::abs(v[j]) > best) {
                    best = std::abs(v[j]);
                    piv = j;
                }
            if (piv < 0) continue;
            const double d = v[piv];
            for (int j = 0; j < kVars; ++j) v[j] /= d;
            // keep reduced vectors fully eliminated against each other
            for (std::size_t k = 0; k < basisvecs.size(); ++k) {
                const double f = basisvecs[k][piv];
                if (f == 0.0) continue;
                for (int j = 0; j < kVars; ++j) basisvecs[k][j] -= f * v[j];
            }
            basisvecs.push_back(std::move(v));
            pivots.push_back(piv);
            idx.push_back(r);
        }
        return idx;
    }();
    return kept;
}

const std::array<double, 256>& bell_coeffs() {
    static const std::array<double, 256> b = [] {
        std::array<double, 256> out{};
        const auto& t = bell_indicator_table();
        for (int u = 0; u < 16; ++u)
            for (int x = 0; x < 16; ++x) out[u * 16 + x] = t[u][x];
        return out;
    }();
    return b;
}

}  // namespace

BoxPolytopeSolver::BoxPolytopeSolver(double delta) : delta_(delta) {
    if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
}

void BoxPolytopeSolver::build_tableau() {
    const auto& rows = equality_rows();
    const auto& kept = independent_equality_rows();
    const int R = int(kept.size());
    rows_ = R + 1;
    cols_ = kVars + 1 + R;  // structural, cap slack, artificials
    tab_.assign(std::size_t(rows_) * cols_, 0.0);
    rhs_.assign(rows_, 0.0);
    basis_.assign(rows_, -1);
    for (int i = 0; i < R; ++i) {
        const EqRow& er = rows[kept[i]];
        for (int j = 0; j < kVars; ++j) at(i, j) = er.a[j];
        at(i, kVars + 1 + i) = 1.0;
        rhs_[i] = er.rhs;
        basis_[i] = kVars + 1 + i;
    }
    const auto& b = bell_coeffs();
    for (int j = 0; j < kVars; ++j) at(R, j) = b[j];
    at(R, kVars) = 1.0;  // cap slack
    rhs_[R] = delta_;
    basis_[R] = kVars;
    have_basis_ = false;
}

void BoxPolytopeSolver::pivot(int row, int col) {
    const double d = at(row, col);
    const double inv = 1.0 / d;
    double* pr = &tab_[std::size_t(row) * cols_];
    for (int j = 0; j < cols_; ++j) pr[j] *= inv;
    rhs_[row] *= inv;
    for (int i = 0; i < rows_; ++i) {
        if (i == row) continue;
        const double f = at(i, col);
        if (f == 0.0) continue;
        double* ri = &tab_[std::size_t(i) * cols_];
        for (int j = 0; j < cols_; ++j) ri[j] -= f * pr[j];
        ri[col] = 0.0;
        rhs_[i] -= f * rhs_[row];
        if (rhs_[i] < 0.0 && rhs_[i] > -1e-12) rhs_[i] = 0.0;
    }
    basis_[row] = col;
}

void BoxPolytopeSolver::run(const std::vector<double>& cost,
                            bool artificial_ok) {
    const int art_begin = kVars + 1;
    // reduced costs r_j = c_B . col_j - c_j
    std::vector<double> red(cols_, 0.0);
    for (int j = 0; j < cols_; ++j) {
        double z = 0.0;
        for (int i = 0; i < rows_; ++i) {
            const double a = at(i, j);
            if (a != 0.0) z += cost[basis_[i]] * a;
        }
        red[j] = z - cost[j];
    }
    const int max_iter = 20000;
    const int bland_after = 4000;
    for (int iter = 0; iter < max_iter; ++iter) {
        int enter = -1;
        if (iter < bland_after) {
            double best = -kPivotTol;
            for (int j = 0; j < cols_; ++j) {
                if (!artificial_ok && j >= art_begin) continue;
                if (red[j] < best) {
                    best = red[j];
                    enter = j;
                }
            }
        } else {  // Bland's rule, guarantees termination
            for (int j = 0; j < cols_; ++j) {
                if (!artificial_ok && j >= art_begin) continue;
                if (red[j] < -kPivotTol) {
                    enter = j;
                    break;
                }
            }
        }
        if (enter < 0) return;  // optimal
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < rows_; ++i) {
            const double a = at(i, enter);
            if (a <= kPivotTol) continue;
            const double ratio = rhs_[i] / a;
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 &&
                 (leave < 0 || basis_[i] < basis_[leave]))) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave < 0) throw std::runtime_error("simplex: unbounded");
        pivot(leave, enter);
        // update reduced-cost row like any other tableau row
        const double f = red[enter];
        if (f != 0.0) {
            const double* pr = &tab_[std::size_t(leave) * cols_];
            for (int j = 0; j < cols_; ++j) red[j] -= f * pr[j];
            red[enter] = 0.0;
        }
    }
    throw std::runtime_error("simplex: iteration limit reached");
}

void BoxPolytopeSolver::phase1() {
    const int art_begin = kVars + 1;
    std::vector<double> cost(cols_, 0.0);
    for (int j = art_begin; j < cols_; ++j) cost[j] = -1.0;
    run(cost, true);
    double infeas = 0.0;
    for (int i = 0; i < rows_; ++i)
        if (basis_[i] >= art_begin) infeas += rhs_[i];
    if (infeas > 1e-8) throw std::runtime_error("simplex: phase-1 infeasible");
    // drive remaining degenerate artificials out of the basis
    for (int i = 0; i < rows_; ++i) {
        if (basis_[i] < art_begin) continue;
        for (int j = 0; j < art_begin; ++j) {
            if (std::abs(at(i, j)) > 1e-7) {
                pivot(i, j);
                break;
            }
        }
    }
    have_basis_ = true;
}

LpCertificate BoxPolytopeSolver::maximize_output(Outcome x_star,
                                                 Setting u_star) {
    if (tab_.empty()) build_tableau();
    if (!have_basis_) phase1();
    const int target_var = u_star.idx * 16 + x_star.idx;
    std::vector<double> cost(cols_, 0.0);
    cost[target_var] = 1.0;
    run(cost, false);

    LpCertificate cert;
    cert.target_x = x_star;
    cert.target_u = u_star;
    cert.delta = delta_;
    cert.primal_solution.assign(kVars, 0.0);
    for (int i = 0; i < rows_; ++i)
        if (basis_[i] < kVars) cert.primal_solution[basis_[i]] = rhs_[i];
    cert.primal_optimum = cert.primal_solution[target_var];

    // Duals: reduced costs of the unit columns of each row.
    std::vector<double> red(cols_, 0.0);
    for (int j = 0; j < cols_; ++j) {
        double z = 0.0;
        for (int i = 0; i < rows_; ++i) {
            const double a = at(i, j);
            if (a != 0.0) z += cost[basis_[i]] * a;
        }
        red[j] = z - cost[j];
    }
    const auto& kept = independent_equality_rows();
    const int R = int(kept.size());
    cert.lambda.assign(801, 0.0);
    for (int i = 0; i < R; ++i) {
        const double y = red[kVars + 1 + i];
        const int g = kept[i];
        cert.lambda[2 * g] = std::max(y, 0.0);
        cert.lambda[2 * g + 1] = std::max(-y, 0.0);
    }
    for (int j = 0; j < kVars; ++j)
        cert.lambda[544 + j] = std::max(red[j], 0.0);
    cert.lambda[800] = std::max(red[kVars], 0.0);

    const auto& rows = equality_rows();
    double dual_obj = cert.lambda[800] * delta_;
    for (int g = 0; g < int(rows.size()); ++g)
        dual_obj += rows[g].rhs * (cert.lambda[2 * g] - cert.lambda[2 * g + 1]);
    cert.dual_objective = dual_obj;
    cert.duality_gap = dual_obj - cert.primal_optimum;
    return cert;
}

LpCertificate max_output_probability(Outcome x_star, Setting u_star,
                                     double delta) {
    BoxPolytopeSolver solver(delta);
    return solver.maximize_output(x_star, u_star);
}

WorstTarget max_over_all_targets(double delta) {
    BoxPolytopeSolver solver(delta);
    WorstTarget worst;
    worst.per_target.assign(256, 0.0);
    worst.optimum = -1.0;
    for (int u = 0; u < 16; ++u) {
        for (int x = 0; x < 16; ++x) {
            auto cert = solver.maximize_output(Outcome(x), Setting(u));
            worst.per_target[u * 16 + x] = cert.primal_optimum;
            if (cert.primal_optimum > worst.optimum) {
                worst.optimum = cert.primal_optimum;
                worst.x = Outcome(x);
                worst.u = Setting(u);
            }
        }
    }
    return worst;
}

CertificateCheck verify_certificate(const LpCertificate& cert, double tol) {
    CertificateCheck chk;
    const auto& rows = equality_rows();
    const auto& bell = bell_coeffs();
    const auto& x = cert.primal_solution;

    // primal feasibility over the full "all-<=" system
    double worst_primal = 0.0;
    for (int g = 0; g < int(rows.size()); ++g) {
        double dot = 0.0;
        for (int j = 0; j < kVars; ++j) dot += rows[g].a[j] * x[j];
        worst_primal = std::max(worst_primal, std::abs(dot - rows[g].rhs));
    }
    for (int j = 0; j < kVars; ++j)
        worst_primal = std::max(worst_primal, -x[j]);
    double bp = 0.0;
    for (int j = 0; j < kVars; ++j) bp += bell[j] * x[j];
    worst_primal = std::max(worst_primal, bp - cert.delta);
    chk.primal_feasibility_residual = worst_primal;

    // dual feasibility A^T lambda = M, lambda >= 0
    const int target_var = cert.target_u.idx * 16 + cert.target_x.idx;
    double worst_dual = 0.0;
    for (int j = 0; j < kVars; ++j) {
        double v = 0.0;
        for (int g = 0; g < int(rows.size()); ++g) {
            const double yg = cert.lambda[2 * g] - cert.lambda[2 * g + 1];
            if (yg != 0.0) v += rows[g].a[j] * yg;
        }
        v -= cert.lambda[544 + j];
        v += bell[j] * cert.lambda[800];
        v -= (j == target_var) ? 1.0 : 0.0;
        worst_dual = std::max(worst_dual, std::abs(v));
    }
    chk.dual_feasibility_residual = worst_dual;
    chk.lambda_negativity =
        *std::min_element(cert.lambda.begin(), cert.lambda.end());
    chk.gap = cert.dual_objective - cert.primal_optimum;
    chk.pass = worst_primal <= 1e-9 && worst_dual <= 1e-7 &&
               chk.lambda_negativity >= -1e-12 && chk.gap >= -1e-9 &&
               chk.gap <= tol;
    return chk;
}

std::string certificate_to_json(const LpCertificate& cert) {
    nlohmann::json j{
        {"schema", "randamp.lp_certificate/1"},
        {"target", {{"x", cert.target_x.idx}, {"u", cert.target_u.idx}}},
        {"delta", cert.delta},
        {"primal", cert.primal_optimum},
        {"dual", cert.dual_objective},
        {"gap", cert.duality_gap},
        {"lambda", cert.lambda},
    };
    return j.dump();
}

double sv_output_bound(double delta, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 0.5))
        throw std::invalid_argument("sv_output_bound: epsilon out of range");
    if (delta < 0.0) throw std::invalid_argument("sv_output_bound: delta < 0");
    const double band = std::pow(0.5 - epsilon, 4);
    return std::min(1.0, (1.0 + 2.0 * delta / band) / 3.0);
}

double gamma_of(double delta_total, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 0.5))
        throw std::invalid_argument("gamma_of: epsilon out of range");
    if (delta_total < 0.0) throw std::invalid_argument("gamma_of: delta < 0");
    const double band = std::pow(0.5 - epsilon, 4);
    return (1.0 + 2.0 * std::sqrt(delta_total) / band) / 3.0;
}

double tradeoff_boundary(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 0.5))
        throw std::invalid_argument("tradeoff_boundary: epsilon out of range");
    return std::pow(0.5 - epsilon, 8) / 2.0;
}

}  // namespace randamp
