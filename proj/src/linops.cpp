#include "blowup/linops.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace blowup {

LinearizedPair::LinearizedPair(const GroundStateBundle& bundle, double solve_tol)
    : bundle_(&bundle), plus_(bundle.lin_plus()), minus_(bundle.lin_minus()) {
    plus_lu_ = plus_.assemble<double>(0.0, 1.0);

    // pinned L-: replace the row at max |Q| by a Dirichlet pin; the dropped
    // equation is implied by solvability and its residual is monitored.
    const auto& Q = bundle.Q;
    pin_row_ = 0;
    for (int i = 1; i < Q.size(); ++i)
        if (std::abs(Q[i]) > std::abs(Q[pin_row_])) pin_row_ = i;
    minus_pinned_lu_.mat = Banded<double>(Q.size(), 3, 3);
    {
        const int M = Q.size();
        for (int d = 0; d < 4; ++d)
            for (int i = 0; i + d < M; ++i) {
                double k = minus_.K.kd[d][i];
                if (d == 0) {
                    minus_pinned_lu_.mat.at(i, i) = k / Q.grid->w[i] + minus_.V[i];
                } else {
                    minus_pinned_lu_.mat.at(i, i + d) += k / Q.grid->w[i];
                    minus_pinned_lu_.mat.at(i + d, i) += k / Q.grid->w[i + d];
                }
            }
        int i0 = pin_row_;
        for (int j = std::max(0, i0 - 3); j <= std::min(M - 1, i0 + 3); ++j)
            minus_pinned_lu_.mat.at(i0, j) = (j == i0) ? 1.0 : 0.0;
        minus_pinned_lu_.factor();
    }

    RealFn y2Q(Q.grid);
    for (int i = 0; i < Q.size(); ++i) y2Q[i] = Q.grid->r[i] * Q.grid->r[i] * Q[i];
    rho_ = solve_plus(y2Q);
    rho_pairing_ = inner(Q, rho_);
    double res = norm_l2(plus_.apply(rho_) - y2Q);
    if (res > solve_tol * std::max(1.0, norm_l2(y2Q)))
        throw std::runtime_error("rho solve residual above tolerance");
    cond_plus_ = plus_.condition_estimate();
}

RealFn LinearizedPair::solve_plus(const RealFn& g) const {
    RealFn f(g.grid);
    f.v = plus_lu_.solve_refined(g.v, 3);
    return f;
}

MinusSolve LinearizedPair::solve_minus(const RealFn& g, bool strict, double tol) const {
    const auto& Q = bundle_->Q;
    double qq = inner(Q, Q);
    double gq = inner(g, Q);
    if (strict && std::abs(gq) > tol * std::max(1e-300, norm_l2(g) * std::sqrt(qq)))
        throw std::invalid_argument("solve_minus: solvability (g,Q)=0 violated, (g,Q) = " +
                                    std::to_string(gq));
    MinusSolve out;
    out.mu = gq / qq;
    RealFn rhs = g;
    for (int i = 0; i < rhs.size(); ++i) rhs[i] -= out.mu * Q[i];
    std::vector<double> b = rhs.v;
    b[pin_row_] = 0.0;
    RealFn f(g.grid);
    f.v = minus_pinned_lu_.solve_refined(b, 3);
    // restore the (f,Q)=0 gauge (the pinned solve fixes a different representative)
    double c = inner(f, Q) / qq;
    for (int i = 0; i < f.size(); ++i) f[i] -= c * Q[i];
    out.residual = norm_l2(minus_.apply(f) - rhs);
    out.f = std::move(f);
    return out;
}

LinearizedPair::IdentityResiduals LinearizedPair::identity_residuals() const {
    const auto& Q = bundle_->Q;
    const auto g = Q.grid;
    RealFn lamQ = lambda_op(Q);
    RealFn y2Q(g), lhs(g);
    for (int i = 0; i < Q.size(); ++i) y2Q[i] = g->r[i] * g->r[i] * Q[i];

    IdentityResiduals out{};
    out.q_norm = norm_l2(Q);
    out.lminus_q = norm_l2(minus_.apply(Q));
    {
        RealFn t = plus_.apply(lamQ);
        for (int i = 0; i < t.size(); ++i) t[i] += 2.0 * Q[i];
        out.lplus_lam_q = norm_l2(t);
    }
    {
        RealFn t = minus_.apply(y2Q);
        for (int i = 0; i < t.size(); ++i) t[i] += 4.0 * lamQ[i];
        out.lminus_y2q = norm_l2(t);
    }
    out.lplus_rho = norm_l2(plus_.apply(rho_) - y2Q);
    double half_v2 = 0.5 * bundle_->virial2;
    out.q_rho_gap = std::abs(rho_pairing_ - half_v2) / half_v2;
    return out;
}

namespace {

// 3x3 symmetric eigensolve (cyclic Jacobi), returns eigenvalues ascending
// and the corresponding vectors as columns.
void jacobi3(double A[3][3], double eval[3], double evec[3][3]) {
    double V[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::abs(A[0][1]) + std::abs(A[0][2]) + std::abs(A[1][2]);
        if (off < 1e-300) break;
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(A[p][q]) < 1e-300) continue;
                double theta = (A[q][q] - A[p][p]) / (2 * A[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (int k = 0; k < 3; ++k) {
                    double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    double vkp = V[k][p], vkq = V[k][q];
                    V[k][p] = c * vkp - s * vkq;
                    V[k][q] = s * vkp + c * vkq;
                }
            }
    }
    int idx[3] = {0, 1, 2};
    std::sort(idx, idx + 3, [&](int a, int b) { return A[a][a] < A[b][b]; });
    for (int k = 0; k < 3; ++k) {
        eval[k] = A[idx[k]][idx[k]];
        for (int i = 0; i < 3; ++i) evec[i][k] = V[i][idx[k]];
    }
}

} // namespace

double constrained_min_rayleigh(const RadialOperator& H,
                                const std::vector<RealFn>& constraints,
                                int max_iter, double tol, unsigned seed) {
    const auto g = H.grid;
    const int M = g->size();

    // B = I - Lap: apply via the stiffness form; preconditioner = B^{-1}
    RadialOperator B{g, H.K, std::vector<double>(M, 1.0)};
    auto Blu = B.assemble<double>(0.0, 1.0);
    auto applyB = [&](const RealFn& u) { return B.apply(u); };

    // B-orthogonal projector onto {v : (v, c_k)_2 = 0}: representatives
    // g_k = B^{-1} c_k, Gram S_jk = (g_j, c_k)_2.
    const int nc = static_cast<int>(constraints.size());
    std::vector<RealFn> C(constraints.begin(), constraints.end());
    std::vector<RealFn> G;
    std::vector<double> S(nc * nc, 0.0), Sinv;
    for (int k = 0; k < nc; ++k) {
        RealFn gk(g);
        gk.v = Blu.solve_refined(C[k].v, 1);
        G.push_back(std::move(gk));
    }
    for (int j = 0; j < nc; ++j)
        for (int k = 0; k < nc; ++k) S[j * nc + k] = inner(G[j], C[k]);
    Sinv = S;
    if (nc == 1) {
        Sinv[0] = 1.0 / S[0];
    } else if (nc == 2) {
        double det = S[0] * S[3] - S[1] * S[2];
        Sinv = {S[3] / det, -S[1] / det, -S[2] / det, S[0] / det};
    }
    auto project = [&](RealFn& v) {
        if (nc == 0) return;
        double d[2] = {0, 0}, a[2] = {0, 0};
        for (int k = 0; k < nc; ++k) d[k] = inner(v, C[k]);
        for (int j = 0; j < nc; ++j)
            for (int k = 0; k < nc; ++k) a[j] += Sinv[j * nc + k] * d[k];
        for (int j = 0; j < nc; ++j)
            for (int i = 0; i < M; ++i) v[i] -= a[j] * G[j][i];
    };

    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    RealFn x(g);
    for (int i = 0; i < M; ++i) x[i] = nd(rng) * std::exp(-0.2 * g->r[i]);
    project(x);

    double theta = 0.0;
    RealFn p(g);   // previous update direction
    bool have_p = false;
    for (int it = 0; it < max_iter; ++it) {
        double xbx = inner(x, applyB(x));
        double nx = std::sqrt(std::max(xbx, 1e-300));
        for (int i = 0; i < M; ++i) x[i] /= nx;
        RealFn Hx = H.apply(x), Bx = applyB(x);
        theta = inner(x, Hx) / inner(x, Bx);
        RealFn rres(g);
        for (int i = 0; i < M; ++i) rres[i] = Hx[i] - theta * Bx[i];
        double rn = norm_l2(rres);
        if (rn < tol * std::max(1.0, std::abs(theta))) break;
        // precondition and project
        RealFn wdir(g);
        {
            std::vector<double> t(M);
            for (int i = 0; i < M; ++i) t[i] = rres[i];
            t = Blu.solve_refined(t, 1);
            wdir.grid = g; wdir.v = std::move(t);
        }
        project(wdir);

        // Rayleigh-Ritz on span{x, w, p}: B-orthonormalize the basis first
        std::vector<RealFn> basis;
        basis.push_back(x);
        basis.push_back(wdir);
        if (have_p) basis.push_back(p);
        std::vector<RealFn> ortho;
        for (auto& v : basis) {
            RealFn u2 = v;
            for (const auto& e : ortho) {
                double d = inner(u2, applyB(e));
                for (int i = 0; i < M; ++i) u2[i] -= d * e[i];
            }
            double n2 = inner(u2, applyB(u2));
            if (n2 > 1e-24) {
                double n = std::sqrt(n2);
                for (int i = 0; i < M; ++i) u2[i] /= n;
                ortho.push_back(std::move(u2));
            }
        }
        int nb = static_cast<int>(ortho.size());
        if (nb == 0) break;
        double Am[3][3] = {};
        std::vector<RealFn> Hb;
        for (auto& v : ortho) Hb.push_back(H.apply(v));
        for (int a = 0; a < nb; ++a)
            for (int b2 = 0; b2 < nb; ++b2) Am[a][b2] = inner(ortho[a], Hb[b2]);
        for (int a = 0; a < nb; ++a)
            for (int b2 = a + 1; b2 < nb; ++b2) {
                double m = 0.5 * (Am[a][b2] + Am[b2][a]);
                Am[a][b2] = Am[b2][a] = m;
            }
        for (int a = nb; a < 3; ++a) Am[a][a] = 1e12;
        double eval[3], evec[3][3];
        jacobi3(Am, eval, evec);
        RealFn xn(g), pn(g);
        for (int i = 0; i < M; ++i) {
            double xi = 0.0;
            for (int a = 0; a < nb; ++a) xi += evec[a][0] * ortho[a][i];
            double pi = xi - evec[0][0] * ortho[0][i];   // update minus x-component
            xn[i] = xi; pn[i] = pi;
        }
        project(xn);
        x = xn;
        if (norm_l2(pn) > 1e-14) { project(pn); p = pn; have_p = true; }
    }
    return theta;
}

CoercivityReport coercivity_mu(const LinearizedPair& ops, int max_iter, double tol) {
    const auto& b = ops.bundle();
    const auto g = b.Q.grid;
    RealFn y2Q(g);
    for (int i = 0; i < g->size(); ++i) y2Q[i] = g->r[i] * g->r[i] * b.Q[i];

    CoercivityReport rep{};
    rep.mu_plus = constrained_min_rayleigh(ops.plus(), {b.Q, y2Q}, max_iter, tol, 11);
    rep.mu_minus = constrained_min_rayleigh(ops.minus(), {ops.rho()}, max_iter, tol, 22);
    rep.mu = std::min(rep.mu_plus, rep.mu_minus);
    rep.mu_plus_unconstrained = constrained_min_rayleigh(ops.plus(), {}, max_iter, tol, 33);
    return rep;
}

} // namespace blowup
