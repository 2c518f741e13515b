#pragma once
// Recursive construction of the blow-up profile: the systems (S_{j,k}),
// assembly of P(s,y) and theta(s), and the equation residual Psi.

#include "blowup/linops.hpp"
#include "blowup/series.hpp"

#include <map>

namespace blowup {

struct ProfileIndexData {
    std::vector<double> Pp, Pm;       // P^+_{j,k}, P^-_{j,k}
    double beta = 0.0;                // beta_{j,k}
    double cplus = 0.0, cminus = 0.0; // origin-value shifts of Appendix-type
    double res_plus = 0.0;            // || L+ P+ - rhs ||
    double res_minus = 0.0;           // || L- P- - rhs ||
    double solvability = 0.0;         // multiplier of the minus solve
    double ptilde_plus_q = 0.0;       // (Ptilde+, Q) after beta selection
};

struct ProfileExpansion {
    GridPtr grid;
    int K = 2, Kprime = 1;
    double sigma = 0.3;
    double alpha = 1.4;               // 2 - 2 sigma
    std::map<std::pair<int, int>, ProfileIndexData> idx;
    RealFn Q;                         // ground state on the profile grid
    RealFn rho;                       // L+ rho = |y|^2 Q
    double q_mass2 = 0.0, virial2 = 0.0, inv_sigma2 = 0.0;
    double beta00_formula = 0.0;      // 4 sigma || |y|^-s Q ||^2 / || |y| Q ||^2

    int order() const { return K + Kprime; }
    double beta() const { return idx.at({0, 0}).beta; }
    bool contains(int j, int k) const { return idx.count({j, k}) > 0; }
};

// Solves the recursion (k ascending, then j ascending) over j + k <= K + K'.
// N in {1,2} only: the nonlinearity must be polynomial for the finite
// expansion to be exact.
ProfileExpansion build_expansion(const GroundStateBundle& bundle, double sigma,
                                 int K, int Kprime, double tol = 1e-7);

// P(lambda, b) on the expansion grid (gamma does not enter).
CplxFn assemble_P(const ProfileExpansion& exp, double lambda, double b);
// P interpolated onto another grid at y = r/scale... evaluated at radius y.
cplx assemble_P_at(const ProfileExpansion& exp, double lambda, double b, double y);
double assemble_theta(const ProfileExpansion& exp, double lambda, double b);
double assemble_Theta(const ProfileExpansion& exp, double lambda, double b);

struct PsiResult {
    CplxFn psi;
    double weighted_h1 = 0.0;   // || e^{eps' |y|} Psi ||_{H1}
};

// Residual of the profile equation with d/ds expanded through the chain rule;
// dgds defaults to the profile-equation normalization (gamma_s = 1).
// series_ord caps the lattice order of the evaluated remainder.
PsiResult residual_Psi(const ProfileExpansion& exp, double lambda, double b,
                       double dlds, double dbds, double dgds = 1.0,
                       double eps_weight = 0.1, int series_ord = 9);

// ||P_{lambda,b,gamma}||_2^2 and E(P_{lambda,b,gamma}) via the rescaled-variable
// expressions (gamma drops out of both).
std::pair<double, double> profile_mass_energy(const ProfileExpansion& exp,
                                              double lambda, double b, double gamma = 0.0);

// The full residual series of the ideal flow (lambda_s = -b lambda,
// b_s = -b^2 + theta), with the stored (0,0) ground-state slot removed.
// Exposed for the residual-order studies.
FormalSeries ideal_residual_series(const ProfileExpansion& exp, int ord);

} // namespace blowup
