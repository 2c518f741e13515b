#pragma once
// Discrete radial Schrodinger operators H = -Lap + diag(V), symmetric with
// respect to the grid quadrature weights. The Laplacian is the staggered
// mimetic fourth-order flux form K = Dhat^T diag(c_N r_f^{N-1} h) Dhat with
// faces at j*h, even reflection at the origin and odd reflection at R_max.

#include "blowup/banded.hpp"
#include "blowup/grid.hpp"

namespace blowup {

// Symmetric K (positive form, K ~ -w*Lap): half-bandwidth 3.
struct StiffnessK {
    GridPtr grid;
    // kd[d][i] = K[i][i+d], d = 0..3 (upper symmetric storage)
    std::vector<double> kd[4];

    std::vector<double> apply(const std::vector<double>& u) const;
    std::vector<cplx> apply(const std::vector<cplx>& u) const;
};

StiffnessK build_stiffness(const RadialGrid& g);

struct RadialOperator {
    GridPtr grid;
    StiffnessK K;               // shared positive form
    std::vector<double> V;      // diagonal potential

    // H u = (K u)/w + V u
    RealFn apply(const RealFn& u) const;
    CplxFn apply(const CplxFn& u) const;

    // banded matrix of  alpha*I + beta*H  in non-symmetric row form
    template <class T>
    BandedPair<T> assemble(T alpha, T beta) const;

    // direct solve of H f = g with iterative refinement
    RealFn solve(const RealFn& g, int refine = 3) const;

    // rough 1-norm condition estimate (few Hager steps)
    double condition_estimate() const;
};

// -Lap u  computed through the shared stiffness form.
RealFn laplacian(const RealFn& u);
CplxFn laplacian(const CplxFn& u);

// quadratic form <K u, u> = ||grad u||^2 (discrete)
double grad_sq(const RealFn& u);
double grad_sq(const CplxFn& u);

} // namespace blowup
