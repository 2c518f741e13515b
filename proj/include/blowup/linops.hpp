#pragma once
// Constrained solves with the linearized operators L+-, the auxiliary
// function rho, and the constrained coercivity diagnostic.

#include "blowup/ground_state.hpp"

namespace blowup {

struct MinusSolve {
    RealFn f;                 // solution with gauge (f,Q)_2 = 0
    double mu = 0.0;          // compatibility multiplier (g,Q)/||Q||^2
    double residual = 0.0;    // || L- f - (g - mu Q) ||_2
};

class LinearizedPair {
public:
    LinearizedPair(const GroundStateBundle& bundle, double solve_tol = 1e-9);

    const GroundStateBundle& bundle() const { return *bundle_; }
    const RadialOperator& plus() const { return plus_; }
    const RadialOperator& minus() const { return minus_; }

    RealFn apply_plus(const RealFn& u) const { return plus_.apply(u); }
    RealFn apply_minus(const RealFn& u) const { return minus_.apply(u); }

    // L+ f = g (direct banded solve; the radial sector of L+ is invertible)
    RealFn solve_plus(const RealFn& g) const;
    // L- f = g with solvability (g,Q)=0 up to the reported multiplier;
    // strict = reject when |(g,Q)| exceeds tol * ||g|| ||Q||.
    MinusSolve solve_minus(const RealFn& g, bool strict = false, double tol = 1e-8) const;

    const RealFn& rho() const { return rho_; }          // L+ rho = |y|^2 Q
    double rho_pairing() const { return rho_pairing_; } // (Q, rho)_2
    double condition_plus() const { return cond_plus_; }

    struct IdentityResiduals {
        double lminus_q;        // ||L- Q||
        double lplus_lam_q;     // ||L+ (Lam Q) + 2Q||
        double lminus_y2q;      // ||L- (|y|^2 Q) + 4 Lam Q||
        double lplus_rho;       // ||L+ rho - |y|^2 Q||
        double q_rho_gap;       // |(Q,rho) - 1/2 || |y| Q ||^2| / (1/2 || |y| Q ||^2)
        double q_norm;
    };
    IdentityResiduals identity_residuals() const;

private:
    const GroundStateBundle* bundle_;
    RadialOperator plus_, minus_;
    BandedPair<double> plus_lu_;
    BandedPair<double> minus_pinned_lu_;   // L- with the max-|Q| row pinned
    int pin_row_ = 0;
    RealFn rho_;
    double rho_pairing_ = 0.0;
    double cond_plus_ = 0.0;
};

struct CoercivityReport {
    double mu_plus;        // min <L+ v,v>/||v||_H1^2 over v perp {Q, |y|^2 Q}
    double mu_minus;       // min <L- w,w>/||w||_H1^2 over w perp {rho}
    double mu;             // min of the two
    double mu_plus_unconstrained;   // without the |y|^2 Q constraint (goes negative)
};

CoercivityReport coercivity_mu(const LinearizedPair& ops, int max_iter = 400,
                               double tol = 1e-10);

// smallest Rayleigh quotient <H v, v>/<B v, v> with B = I - Lap (H1 metric),
// v kept orthogonal (in L2) to the given constraints; LOBPCG-style iteration.
double constrained_min_rayleigh(const RadialOperator& H,
                                const std::vector<RealFn>& constraints,
                                int max_iter = 400, double tol = 1e-10,
                                unsigned seed = 12345);

} // namespace blowup
