#pragma once
// Ground state of -Lap Q + Q - Q^{1+4/N} = 0: shooting bracket plus a Newton
// polish of the discrete boundary value problem, with the derived constants.

#include "blowup/grid.hpp"
#include "blowup/operators.hpp"

namespace blowup {

struct GroundStateBundle {
    RealFn Q;
    double sigma = 0.0;        // the configured potential exponent
    double mass2 = 0.0;        // ||Q||_2^2
    double grad2 = 0.0;        // ||grad Q||_2^2
    double virial2 = 0.0;      // || |y| Q ||_2^2
    double virial4 = 0.0;      // || |y|^2 Q ||_2^2
    double inv_sigma2 = 0.0;   // || |y|^-sigma Q ||_2^2
    double gn_check = 0.0;     // Gagliardo-Nirenberg ratio at Q
    double residual = 0.0;     // discrete equation residual (L2)
    double q_origin = 0.0;     // even-extension interpolation of Q at r=0

    RadialOperator lin_plus() const;    // L+ = -Lap + 1 - (1+4/N) Q^{4/N}
    RadialOperator lin_minus() const;   // L- = -Lap + 1 - Q^{4/N}
};

GroundStateBundle solve_ground_state(GridPtr grid, double sigma, double tol = 1e-12);

// ratio ||u||_{2+4/N}^{2+4/N} / [ (1+2/N) (||u||_2/||Q||_2)^{4/N} ||grad u||_2^2 ]
double gagliardo_nirenberg_ratio(const CplxFn& u, const GroundStateBundle& bundle);
double gagliardo_nirenberg_ratio(const RealFn& u, const GroundStateBundle& bundle);

// E(u) = 1/2 ||grad u||^2 - (1/(2+4/N)) ||u||_{2+4/N}^{2+4/N} -+ 1/2 || |x|^-sigma u ||^2
// sign = +1 selects NLS+ (attractive potential, energy gets the minus sign);
// sigma = 0 drops the potential term.
double energy(const CplxFn& u, double sigma, int sign);
double energy(const RealFn& u, double sigma, int sign);

// Independent shooting oracle: integrates the radial ODE at step dr and
// returns ||Q||_2^2 by quadrature of the shooting profile (used by tests).
double shooting_mass2(int dim, double dr);

// Shooting bracket: number of far-field sign changes scanned over Q(0) in
// [lo, hi] at the given scan step (uniqueness diagnostic).
int shooting_bracket_count(int dim, double lo, double hi, double step);

} // namespace blowup
