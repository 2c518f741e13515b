#include "blowup/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blowup {

namespace {

struct ShootResult {
    std::vector<double> rs, us;
    int event = 0;   // -1 crossed zero (a too large), +1 regrew (a too small)
};

// u'' = -(N-1)/r u' + u - u^{1+4/N}, u(0)=a, u'(0)=0, RK4.
ShootResult shoot(int dim, double a, double dr, double rlim) {
    const double p = 1.0 + 4.0 / dim;
    auto rhs = [&](double r, double u, double v, double& du, double& dv) {
        du = v;
        double nl = (u >= 0) ? std::pow(u, p) : -std::pow(-u, p);
        dv = -(dim - 1) / r * v + u - nl;
    };
    ShootResult out;
    double r0 = 1e-6;
    double upp0 = (a - std::pow(a, p)) / dim;
    double u = a + 0.5 * upp0 * r0 * r0, v = upp0 * r0, r = r0;
    out.rs.push_back(r); out.us.push_back(u);
    while (r < rlim) {
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        rhs(r, u, v, k1u, k1v);
        rhs(r + dr / 2, u + dr / 2 * k1u, v + dr / 2 * k1v, k2u, k2v);
        rhs(r + dr / 2, u + dr / 2 * k2u, v + dr / 2 * k2v, k3u, k3v);
        rhs(r + dr, u + dr * k3u, v + dr * k3v, k4u, k4v);
        u += dr / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
        v += dr / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        r += dr;
        out.rs.push_back(r); out.us.push_back(u);
        if (u < 0) { out.event = -1; return out; }
        if (u > 1.5 * a) { out.event = +1; return out; }
    }
    out.event = (u > 0) ? +1 : -1;
    return out;
}

double shoot_bisect(int dim, double dr, double rlim) {
    // scan for the bracket
    double lo = 0.0, hi = 0.0;
    double prev_a = 0.0; int prev_e = 0;
    for (double a = 1.0; a < 8.0; a += 0.25) {
        int e = shoot(dim, a, dr, rlim).event;
        if (prev_e == +1 && e == -1) { lo = prev_a; hi = a; break; }
        prev_a = a; prev_e = e;
    }
    if (hi == 0.0) throw std::runtime_error("ground state: shooting bracket not found");
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (shoot(dim, mid, dr, rlim).event >= 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double interp_shoot(const ShootResult& s, double r) {
    if (r <= s.rs.front()) return s.us.front();
    if (r >= s.rs.back()) {
        // exponential tail continuation
        int n = static_cast<int>(s.rs.size());
        double u1 = std::max(s.us[n - 1], 1e-300);
        return u1 * std::exp(-(r - s.rs[n - 1]));
    }
    auto it = std::lower_bound(s.rs.begin(), s.rs.end(), r);
    size_t i = it - s.rs.begin();
    double t = (r - s.rs[i - 1]) / (s.rs[i] - s.rs[i - 1]);
    return (1 - t) * s.us[i - 1] + t * s.us[i];
}

} // namespace

GroundStateBundle solve_ground_state(GridPtr grid, double sigma, double tol) {
    const int dim = grid->dim;
    const int M = grid->size();
    const double p = 1.0 + 4.0 / dim;

    double a = shoot_bisect(dim, 1e-3, std::min(25.0, grid->rmax));
    ShootResult prof = shoot(dim, a, 1e-3, std::min(25.0, grid->rmax));

    RealFn Q(grid);
    for (int i = 0; i < M; ++i) Q[i] = std::max(0.0, interp_shoot(prof, grid->r[i]));

    const StiffnessK K = build_stiffness(*grid);
    RadialOperator lin{grid, K, std::vector<double>(M, 0.0)};

    // Newton on F(Q) = -Lap Q + Q - Q^p with Jacobian L+ = -Lap + 1 - p Q^{p-1}
    double resnorm = 0.0, best = 1e300;
    int stalled = 0;
    for (int it = 0; it < 60; ++it) {
        auto KQ = K.apply(Q.v);
        RealFn F(grid);
        for (int i = 0; i < M; ++i)
            F[i] = KQ[i] / grid->w[i] + Q[i] - std::pow(std::abs(Q[i]), p - 1) * Q[i];
        resnorm = norm_l2(F);
        if (resnorm < tol) break;
        if (resnorm > 0.5 * best) {         // roundoff floor reached
            if (++stalled >= 3) break;
        } else stalled = 0;
        best = std::min(best, resnorm);
        for (int i = 0; i < M; ++i) lin.V[i] = 1.0 - p * std::pow(std::abs(Q[i]), p - 1);
        auto bp = lin.assemble<double>(0.0, 1.0);
        auto dq = bp.solve_refined(F.v, 2);
        double step = 1.0;
        for (int ls = 0; ls < 8; ++ls) {
            RealFn Qn(grid);
            for (int i = 0; i < M; ++i) Qn[i] = Q[i] - step * dq[i];
            auto KQn = K.apply(Qn.v);
            RealFn Fn(grid);
            for (int i = 0; i < M; ++i)
                Fn[i] = KQn[i] / grid->w[i] + Qn[i] - std::pow(std::abs(Qn[i]), p - 1) * Qn[i];
            if (norm_l2(Fn) < resnorm || step < 1.0 / 128) { Q = Qn; break; }
            step *= 0.5;
        }
    }
    {
        auto KQ = K.apply(Q.v);
        RealFn F(grid);
        for (int i = 0; i < M; ++i)
            F[i] = KQ[i] / grid->w[i] + Q[i] - std::pow(std::abs(Q[i]), p - 1) * Q[i];
        resnorm = norm_l2(F);
    }
    // acceptance floor: backward-stable residual scale eps * ||L|| * ||Q||
    const double floor = 5e-15 / (grid->h * grid->h);
    if (!(resnorm < std::max(tol, floor))) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", resnorm);
        throw std::runtime_error(std::string("ground state: Newton did not converge, residual ") + buf);
    }

    GroundStateBundle b;
    b.Q = Q;
    b.sigma = sigma;
    b.residual = resnorm;
    b.mass2 = inner(Q, Q);
    b.grad2 = grad_sq(Q);
    b.virial2 = std::pow(norm_weighted(Q, 1.0), 2);
    b.virial4 = std::pow(norm_weighted(Q, 2.0), 2);
    b.inv_sigma2 = (sigma > 0) ? std::pow(norm_weighted(Q, -sigma), 2) : b.mass2;
    b.q_origin = (150.0 * Q[0] - 25.0 * Q[1] + 3.0 * Q[2]) / 128.0;
    b.gn_check = gagliardo_nirenberg_ratio(Q, b);
    return b;
}

RadialOperator GroundStateBundle::lin_plus() const {
    const auto g = Q.grid;
    const double p = 4.0 / g->dim;
    RadialOperator op{g, build_stiffness(*g), std::vector<double>(g->size())};
    for (int i = 0; i < g->size(); ++i)
        op.V[i] = 1.0 - (1.0 + p) * std::pow(std::abs(Q[i]), p);
    return op;
}

RadialOperator GroundStateBundle::lin_minus() const {
    const auto g = Q.grid;
    const double p = 4.0 / g->dim;
    RadialOperator op{g, build_stiffness(*g), std::vector<double>(g->size())};
    for (int i = 0; i < g->size(); ++i) op.V[i] = 1.0 - std::pow(std::abs(Q[i]), p);
    return op;
}

namespace {

double lp_norm_pow(const CplxFn& u, double pw) {
    long double s = 0;
    for (int i = 0; i < u.size(); ++i)
        s += (long double)u.grid->w[i] * std::pow(std::abs(u[i]), pw);
    return static_cast<double>(s);
}

} // namespace

double gagliardo_nirenberg_ratio(const CplxFn& u, const GroundStateBundle& bundle) {
    const double N = u.grid->dim;
    const double pw = 2.0 + 4.0 / N;
    double num = lp_norm_pow(u, pw);
    double m = inner(u, u);
    if (m <= 0) throw std::invalid_argument("gagliardo_nirenberg_ratio: zero input");
    double den = (1.0 + 2.0 / N) * std::pow(m / bundle.mass2, 2.0 / N) * grad_sq(u);
    return num / den;
}

double gagliardo_nirenberg_ratio(const RealFn& u, const GroundStateBundle& bundle) {
    return gagliardo_nirenberg_ratio(to_complex(u), bundle);
}

double energy(const CplxFn& u, double sigma, int sign) {
    const double N = u.grid->dim;
    const double pw = 2.0 + 4.0 / N;
    double e = 0.5 * grad_sq(u) - lp_norm_pow(u, pw) / pw;
    if (sigma > 0.0) {
        double ns = norm_weighted(u, -sigma);
        e -= 0.5 * sign * ns * ns;
    }
    return e;
}

double energy(const RealFn& u, double sigma, int sign) {
    return energy(to_complex(u), sigma, sign);
}

double shooting_mass2(int dim, double dr) {
    double a = shoot_bisect(dim, dr, 25.0);
    ShootResult s = shoot(dim, a, dr, 25.0);
    const double cN = sphere_area_constant(dim);
    long double m = 0;
    for (size_t i = 0; i + 1 < s.rs.size(); ++i) {
        double rm = 0.5 * (s.rs[i] + s.rs[i + 1]);
        double um = 0.5 * (s.us[i] + s.us[i + 1]);
        m += cN * std::pow(rm, dim - 1) * um * um * (s.rs[i + 1] - s.rs[i]);
    }
    return static_cast<double>(m);
}

int shooting_bracket_count(int dim, double lo, double hi, double step) {
    int count = 0, prev = 0;
    for (double a = lo; a <= hi; a += step) {
        int e = shoot(dim, a, 2e-3, 25.0).event;
        if (prev == +1 && e == -1) ++count;
        prev = e;
    }
    return count;
}

} // namespace blowup
