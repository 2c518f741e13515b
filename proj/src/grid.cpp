#include "blowup/grid.hpp"
#include "blowup/operators.hpp"

#include <algorithm>
#include <cassert>

namespace blowup {

double sphere_area_constant(int dim) {
    switch (dim) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
    }
    throw std::invalid_argument("dimension must be 1, 2 or 3");
}

namespace {

// Consistency calibration: rescale the first masses so the staggered rows
// reproduce Lap r^2 = 2N exactly (they are already exact on 1, r^4 there).
void calibrate_weights(RadialGrid& g) {
    StiffnessK K = build_stiffness(g);
    const int M = g.size();
    std::vector<double> u(M);
    for (int i = 0; i < M; ++i) u[i] = g.r[i] * g.r[i];
    std::vector<double> Ku = K.apply(u);
    const double tgt = 2.0 * g.dim;
    const int nfix = std::min(4, M);
    for (int i = 0; i < nfix; ++i) {
        double m = -Ku[i] / tgt;   // K ~ -w Lap
        if (m > 0.0) g.w[i] = m;
    }
}

} // namespace

GridPtr make_grid(int dim, double h, double rmax) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
    if (h <= 0 || rmax <= 2 * h) throw std::invalid_argument("bad grid parameters");
    auto g = std::make_shared<RadialGrid>();
    g->dim = dim;
    g->h = h;
    const int M = static_cast<int>(std::llround(rmax / h));
    g->rmax = M * h;
    g->r.resize(M);
    g->w_mid.resize(M);
    const double cN = sphere_area_constant(dim);
    for (int i = 0; i < M; ++i) {
        g->r[i] = (i + 0.5) * h;
        g->w_mid[i] = cN * std::pow(g->r[i], dim - 1) * h;
    }
    g->w = g->w_mid;
    calibrate_weights(*g);
    return g;
}

RealFn re_part(const CplxFn& u) {
    RealFn o(u.grid);
    for (int i = 0; i < u.size(); ++i) o[i] = u[i].real();
    return o;
}

RealFn im_part(const CplxFn& u) {
    RealFn o(u.grid);
    for (int i = 0; i < u.size(); ++i) o[i] = u[i].imag();
    return o;
}

CplxFn to_complex(const RealFn& u) {
    CplxFn o(u.grid);
    for (int i = 0; i < u.size(); ++i) o[i] = u[i];
    return o;
}

double inner(const RealFn& u, const RealFn& v) {
    u.check(v);
    long double s = 0;
    for (int i = 0; i < u.size(); ++i) s += (long double)u.grid->w[i] * u[i] * v[i];
    return static_cast<double>(s);
}

double inner(const CplxFn& u, const CplxFn& v) {
    u.check(v);
    long double s = 0;
    for (int i = 0; i < u.size(); ++i)
        s += (long double)u.grid->w[i] * (u[i].real() * v[i].real() + u[i].imag() * v[i].imag());
    return static_cast<double>(s);
}

double norm_l2(const RealFn& u) { return std::sqrt(std::max(0.0, inner(u, u))); }
double norm_l2(const CplxFn& u) { return std::sqrt(std::max(0.0, inner(u, u))); }

double norm_weighted(const RealFn& u, double p) {
    const auto& g = *u.grid;
    if (p < 0.0) {
        if (2.0 * (-p) >= g.dim)
            throw std::invalid_argument("norm_weighted: need sigma < dim/2");
        auto s = singular_masses(g, -2.0 * p);
        long double acc = 0;
        for (int i = 0; i < u.size(); ++i) acc += (long double)s[i] * u[i] * u[i];
        return std::sqrt(std::max(0.0L, acc));
    }
    long double acc = 0;
    for (int i = 0; i < u.size(); ++i) {
        double f = std::pow(g.r[i], p) * u[i];
        acc += (long double)g.w[i] * f * f;
    }
    return std::sqrt(static_cast<double>(acc));
}

double norm_weighted(const CplxFn& u, double p) {
    const auto& g = *u.grid;
    if (p < 0.0) {
        if (2.0 * (-p) >= g.dim)
            throw std::invalid_argument("norm_weighted: need sigma < dim/2");
        auto s = singular_masses(g, -2.0 * p);
        long double acc = 0;
        for (int i = 0; i < u.size(); ++i) acc += (long double)s[i] * std::norm(u[i]);
        return std::sqrt(std::max(0.0L, acc));
    }
    long double acc = 0;
    for (int i = 0; i < u.size(); ++i)
        acc += (long double)g.w[i] * std::pow(g.r[i], 2 * p) * std::norm(u[i]);
    return std::sqrt(static_cast<double>(acc));
}

double integrate_smooth(const RealFn& f) {
    const auto& g = *f.grid;
    const int M = f.size();
    if (M < 3) throw std::invalid_argument("integrate_smooth: grid too small");
    // midpoint rule on g = c_N r^{N-1} f plus Euler-Maclaurin endpoint terms
    // with one-sided quadratic derivative estimates
    std::vector<double> gg(M);
    const double cN = sphere_area_constant(g.dim);
    for (int i = 0; i < M; ++i) gg[i] = cN * std::pow(g.r[i], g.dim - 1) * f[i];
    long double s = 0;
    for (int i = 0; i < M; ++i) s += gg[i];
    double I = g.h * static_cast<double>(s);
    double d0 = (-2.0 * gg[0] + 3.0 * gg[1] - gg[2]) / g.h;
    double dR = (2.0 * gg[M - 1] - 3.0 * gg[M - 2] + gg[M - 3]) / g.h;
    return I + g.h * g.h / 24.0 * (dR - d0);
}

std::vector<double> singular_masses(const RadialGrid& g, double two_sigma) {
    const int M = g.size();
    const double nu = g.dim - 1 - two_sigma;
    const double cN = sphere_area_constant(g.dim);
    std::vector<double> s(M, 0.0);
    auto powint = [&](double a, double b, double p) {
        // int_a^b r^p dr (p > -1 here since nu > -1)
        return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
    };
    for (int i = 0; i < M; ++i) {
        double a = i * g.h, b = (i + 1) * g.h;
        int j0 = std::clamp(i - 1, 0, M - 3);
        double x1 = g.r[j0 + 1];
        // moments of (r - x1)^k against r^nu over the cell
        double m[3];
        for (int k = 0; k < 3; ++k) {
            double tot = 0.0, binom = 1.0;
            for (int l = 0; l <= k; ++l) {
                tot += binom * std::pow(-x1, k - l) * powint(a, b, nu + l);
                binom *= double(k - l) / double(l + 1);
            }
            m[k] = tot;
        }
        // Lagrange basis on the three nodes, expanded in powers of (r - x1)
        double t[3] = {g.r[j0] - x1, 0.0, g.r[j0 + 2] - x1};
        for (int jj = 0; jj < 3; ++jj) {
            // coefficients of L_jj(r) = prod_{k!=jj} (x - t[k])/(t[jj]-t[k])
            double den = 1.0, c0 = 1.0, c1 = 0.0, c2 = 0.0;
            // build polynomial prod (x - t[k]) incrementally
            double p0 = 1.0, p1 = 0.0, p2 = 0.0; // p(x) = p0 + p1 x + p2 x^2
            bool first = true;
            for (int k = 0; k < 3; ++k) {
                if (k == jj) continue;
                den *= (t[jj] - t[k]);
                if (first) { p0 = -t[k]; p1 = 1.0; p2 = 0.0; first = false; }
                else { p2 = p1; p1 = p0 - t[k] * p1; p0 = -t[k] * p0; }
            }
            c0 = p0 / den; c1 = p1 / den; c2 = p2 / den;
            s[j0 + jj] += cN * (c0 * m[0] + c1 * m[1] + c2 * m[2]);
        }
    }
    return s;
}

std::vector<double> potential_diag(const RadialGrid& g, double two_sigma) {
    auto s = singular_masses(g, two_sigma);
    for (int i = 0; i < g.size(); ++i) s[i] /= g.w[i];
    return s;
}

namespace {

// reflected index: even about 0 (ghost -k -> k-1), odd about R (ghost M-1+k -> M-k, sign -1)
inline std::pair<int, double> reflect(int i, int M) {
    if (i < 0) return {-i - 1, 1.0};
    if (i >= M) return {2 * M - 1 - i, -1.0};
    return {i, 1.0};
}

template <class T>
RadialFunction<T> deriv_impl(const RadialFunction<T>& u) {
    const auto& g = *u.grid;
    const int M = u.size();
    RadialFunction<T> d(u.grid);
    const double c = 1.0 / (12.0 * g.h);
    for (int i = 0; i < M; ++i) {
        T s{};
        constexpr int off[4] = {-2, -1, 1, 2};
        constexpr double cf[4] = {1.0, -8.0, 8.0, -1.0};
        for (int k = 0; k < 4; ++k) {
            auto [j, sg] = reflect(i + off[k], M);
            s += (cf[k] * sg) * u[j];
        }
        d[i] = s * c;
    }
    return d;
}

} // namespace

RealFn deriv(const RealFn& u) { return deriv_impl(u); }
CplxFn deriv(const CplxFn& u) { return deriv_impl(u); }

RealFn lambda_op(const RealFn& u) {
    RealFn d = deriv(u);
    const auto& g = *u.grid;
    for (int i = 0; i < u.size(); ++i) d[i] = 0.5 * g.dim * u[i] + g.r[i] * d[i];
    return d;
}

CplxFn lambda_op(const CplxFn& u) {
    CplxFn d = deriv(u);
    const auto& g = *u.grid;
    for (int i = 0; i < u.size(); ++i) d[i] = 0.5 * g.dim * u[i] + g.r[i] * d[i];
    return d;
}

double norm_h1(const RealFn& u) {
    return std::sqrt(std::max(0.0, inner(u, u) + grad_sq(u)));
}

double norm_h1(const CplxFn& u) {
    return std::sqrt(std::max(0.0, inner(u, u) + grad_sq(u)));
}

CplxFn nonlinearity(const CplxFn& u) {
    CplxFn o(u.grid);
    const double p = 4.0 / u.grid->dim;
    for (int i = 0; i < u.size(); ++i) {
        double a = std::abs(u[i]);
        o[i] = (a == 0.0) ? cplx(0.0) : std::pow(a, p) * u[i];
    }
    return o;
}

CplxFn potential_apply(const CplxFn& u, double sigma, int sign) {
    CplxFn o(u.grid);
    if (sigma == 0.0) {
        for (int i = 0; i < u.size(); ++i) o[i] = double(sign) * u[i];
        return o;
    }
    auto shat = potential_diag(*u.grid, 2.0 * sigma);
    for (int i = 0; i < u.size(); ++i) o[i] = double(sign) * shat[i] * u[i];
    return o;
}

double interp_even(const RealFn& u, double rr) {
    const auto& g = *u.grid;
    const int M = u.size();
    rr = std::abs(rr);
    if (rr >= g.rmax - 1.5 * g.h) return 0.0;
    // nodes j0..j0+3 around rr, with even ghosts below 0
    int j0 = static_cast<int>(std::floor(rr / g.h - 0.5)) - 1;
    double x[4], y[4];
    for (int k = 0; k < 4; ++k) {
        int j = j0 + k;
        if (j < 0) { x[k] = -((-j - 1) + 0.5) * g.h; y[k] = u[-j - 1]; }
        else { x[k] = (j + 0.5) * g.h; y[k] = u[std::min(j, M - 1)]; }
    }
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
        double l = 1.0;
        for (int m = 0; m < 4; ++m)
            if (m != k) l *= (rr - x[m]) / (x[k] - x[m]);
        s += l * y[k];
    }
    return s;
}

} // namespace blowup
