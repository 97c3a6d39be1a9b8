#pragma once

#include <string>
#include <vector>

#include "randamp/box.hpp"

namespace randamp {

// Linear program: maximize P(x*|u*) over 256-entry conditional boxes subject
// to normalization, no-signaling, positivity and a Bell-value cap B.P <= delta.
//
// The certificate's lambda vector is expressed in the "all-<=" row order
//   [0,32)    normalization pairs (sum <= 1, -sum <= -1), u-major
//   [32,544)  no-signaling pairs, same interleaving
//   [544,800) positivity rows -P(x|u) <= 0, variable-major
//   800       Bell cap row
// so that dual feasibility reads A^T lambda = M with lambda >= 0.
struct LpCertificate {
    Outcome target_x;
    Setting target_u;
    double delta = 0.0;
    double primal_optimum = 0.0;
    std::vector<double> primal_solution;  // 256 entries, row-major (u,x)
    std::vector<double> lambda;           // 801 entries
    double dual_objective = 0.0;
    double duality_gap = 0.0;  // dual - primal
};

// Result of re-checking a certificate by direct arithmetic on the constraint
// system, without trusting the solver that produced it.
struct CertificateCheck {
    double primal_feasibility_residual = 0.0;  // worst constraint violation
    double dual_feasibility_residual = 0.0;    // worst |A^T lambda - M| entry
    double lambda_negativity = 0.0;            // most negative lambda entry
    double gap = 0.0;
    bool pass = false;
};

// Dense two-phase simplex over the 256-variable box polytope. A solver
// instance caches its basis, so sweeping many objectives at a fixed delta
// reuses the previous optimal basis as a warm start.
class BoxPolytopeSolver {
  public:
    explicit BoxPolytopeSolver(double delta);

    LpCertificate maximize_output(Outcome x_star, Setting u_star);
    double delta() const { return delta_; }

  private:
    double delta_;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> tab_;  // rows_ x cols_
    std::vector<double> rhs_;
    std::vector<int> basis_;
    bool have_basis_ = false;

    double& at(int r, int c) { return tab_[std::size_t(r) * cols_ + c]; }
    void build_tableau();
    void pivot(int row, int col);
    // Runs simplex on the given cost vector (maximization); `artificial_ok`
    // allows artificial columns to enter (phase 1 only).
    void run(const std::vector<double>& cost, bool artificial_ok);
    void phase1();
};

LpCertificate max_output_probability(Outcome x_star, Setting u_star,
                                     double delta);

struct WorstTarget {
    Outcome x;
    Setting u;
    double optimum = 0.0;
    std::vector<double> per_target;  // 256 optima, index x*16+u? see impl
};
WorstTarget max_over_all_targets(double delta);

CertificateCheck verify_certificate(const LpCertificate& cert,
                                    double tol = 1e-7);

std::string certificate_to_json(const LpCertificate& cert);

// Closed-form bound P(x*|u*) <= (1/3)(1 + 2 delta / (1/2 - eps)^4) for a box
// whose SV-weighted Bell value is at most delta. Clamped to 1.
double sv_output_bound(double delta, double epsilon);

// Per-round output-probability bound gamma = (1/3)(1 + 2 sqrt(delta_total) /
// (1/2 - eps)^4) used by the min-entropy accumulation step.
double gamma_of(double delta_total, double epsilon);

// Largest accept threshold for which gamma_of(2*delta, eps) stays below 1:
// delta_max = (1/2 - eps)^8 / 2.
double tradeoff_boundary(double epsilon);

}  // namespace randamp
