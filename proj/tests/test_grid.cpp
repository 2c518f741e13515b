#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blowup/grid.hpp"
#include "blowup/operators.hpp"

#include <cmath>

using namespace blowup;

namespace {

RealFn gaussian(GridPtr g, double a) {
    RealFn u(g);
    for (int i = 0; i < u.size(); ++i) u[i] = std::exp(-a * g->r[i] * g->r[i]);
    return u;
}

// int_0^inf e^{-2 a r^2} c_N r^{N-1} dr
double gaussian_mass2_exact(int N, double a) {
    double s2 = 2.0 * a;
    switch (N) {
        case 1: return 2.0 * 0.5 * std::sqrt(M_PI / s2);
        case 2: return 2.0 * M_PI * 0.5 / s2;
        case 3: return 4.0 * M_PI * 0.25 * std::sqrt(M_PI) * std::pow(s2, -1.5);
    }
    return 0.0;
}

} // namespace

TEST_CASE("quadrature exactness: gaussian vs closed form, M>=2000 R>=12") {
    for (int N : {1, 2, 3}) {
        auto g = make_grid(N, 12.0 / 2000, 12.0);
        RealFn f(g);
        for (int i = 0; i < f.size(); ++i) f[i] = std::exp(-g->r[i] * g->r[i]);
        double I = integrate_smooth(f);
        double exact = gaussian_mass2_exact(N, 0.5);
        CHECK(std::abs(I - exact) / exact < 1e-8);
    }
}

TEST_CASE("ball volume reproduced by the corrected quadrature") {
    for (int N : {1, 2, 3}) {
        auto g = make_grid(N, 0.01, 30.0);
        RealFn one(g, 1.0);
        double I = integrate_smooth(one);
        double R = g->rmax;
        double vol = (N == 1) ? 2 * R : (N == 2) ? M_PI * R * R : 4.0 * M_PI * R * R * R / 3.0;
        CHECK(std::abs(I - vol) / vol < 1e-10);
    }
}

TEST_CASE("weights positive, nodes exclude the origin") {
    for (int N : {1, 2, 3}) {
        auto g = make_grid(N, 0.02, 10.0);
        CHECK(g->r.front() > 0.0);
        for (double wi : g->w) CHECK(wi > 0.0);
    }
}

TEST_CASE("inner: symmetry, Re of purely imaginary, gaussian value") {
    auto g = make_grid(1, 0.005, 15.0);
    RealFn q = gaussian(g, 1.0);
    CplxFn u = to_complex(q), v(g);
    for (int i = 0; i < v.size(); ++i) v[i] = cplx(0.0, q[i]);
    CHECK(inner(u, v) == doctest::Approx(0.0).epsilon(1e-14));   // (Q, iQ) = 0
    // ||e^{-r^2}||_2^2 = sqrt(pi/2) for N = 1
    double m = inner(q, q);
    CHECK(m == doctest::Approx(std::sqrt(M_PI / 2)).epsilon(1e-8));
    RealFn w2 = gaussian(g, 0.7);
    CHECK(inner(q, w2) == doctest::Approx(inner(w2, q)).epsilon(1e-15));
}

TEST_CASE("norm of zero function") {
    auto g = make_grid(2, 0.01, 10.0);
    RealFn z(g);
    CHECK(norm_l2(z) == 0.0);
    CHECK(norm_h1(z) == 0.0);
    CHECK(norm_weighted(z, 1.0) == 0.0);
}

TEST_CASE("weighted(-sigma) norm finite and requires sigma < N/2") {
    auto g = make_grid(1, 0.005, 15.0);
    RealFn q = gaussian(g, 1.0);
    CHECK(norm_weighted(q, -0.3) > 0.0);
    CHECK(std::isfinite(norm_weighted(q, -0.3)));
    CHECK_THROWS(norm_weighted(q, -0.6));   // sigma = 0.6 >= N/2 = 0.5
}

TEST_CASE("singular product quadrature converges on r^{-2s} gaussian") {
    // exact: int_0^inf r^{-0.6} e^{-r^2} * 2 dr = Gamma(0.2) (t=r^2 substitution)
    double exact = std::tgamma(0.2);
    double prev = 0;
    for (double h : {4e-3, 2e-3}) {
        auto g = make_grid(1, h, 15.0);
        auto s = singular_masses(*g, 0.6);
        RealFn q = gaussian(g, 1.0);
        long double acc = 0;
        for (int i = 0; i < q.size(); ++i) acc += s[i] * q[i];
        prev = std::abs(static_cast<double>(acc) - exact) / exact;
        CHECK(prev < 2e-7);
    }
}

TEST_CASE("virial identities on gaussians") {
    // (|x|^{2p} w, Lam w) = -p || |x|^p w ||^2  for p = 1 and p = -sigma
    for (int N : {1, 2}) {
        auto g = make_grid(N, 0.004, 16.0);
        RealFn w = gaussian(g, 1.0);
        RealFn lw = lambda_op(w);
        {
            RealFn y2w(g);
            for (int i = 0; i < w.size(); ++i) y2w[i] = g->r[i] * g->r[i] * w[i];
            double lhs = inner(y2w, lw);
            double rhs = -std::pow(norm_weighted(w, 1.0), 2);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
        }
        {
            // (-Lap w, Lam w) = ||grad w||^2
            RealFn mlap = laplacian(w);
            for (auto& x : mlap.v) x = -x;
            CHECK(inner(mlap, lw) == doctest::Approx(grad_sq(w)).epsilon(1e-5));
        }
        {
            // (|w|^p w, Lam w) = (N p / (2(p+2))) ||w||_{p+2}^{p+2}, p = 4/N
            double p = 4.0 / N;
            RealFn fw(g);
            long double lp = 0;
            for (int i = 0; i < w.size(); ++i) {
                fw[i] = std::pow(std::abs(w[i]), p) * w[i];
                lp += g->w[i] * std::pow(std::abs(w[i]), p + 2);
            }
            double lhs = inner(fw, lw);
            double rhs = N * p / (2 * (p + 2)) * static_cast<double>(lp);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
        }
    }
}

TEST_CASE("lambda_op: (u, Lam u) = 0 and near-antisymmetry") {
    auto g = make_grid(2, 0.005, 14.0);
    RealFn u = gaussian(g, 1.0), v = gaussian(g, 0.6);
    CHECK(std::abs(inner(u, lambda_op(u))) < 1e-6 * inner(u, u));
    // Lambda is L2-antisymmetric: inner(Lam u, v) + inner(u, Lam v) -> 0
    auto defect = [](GridPtr gg) {
        RealFn a(gg), b(gg);
        for (int i = 0; i < a.size(); ++i) {
            a[i] = std::exp(-gg->r[i] * gg->r[i]);
            b[i] = std::exp(-0.6 * gg->r[i] * gg->r[i]);
        }
        return std::abs(inner(lambda_op(a), b) + inner(a, lambda_op(b)));
    };
    double d1 = defect(g);
    CHECK(d1 < 1e-6);
    double d2 = defect(make_grid(2, 0.0025, 14.0));
    CHECK(d2 < d1);   // shrinks under refinement
}

TEST_CASE("laplacian: constants, gaussian formula, order") {
    for (int N : {1, 2, 3}) {
        auto g = make_grid(N, 0.01, 20.0);
        RealFn c(g, 1.0);
        RealFn lc = laplacian(c);
        double m = 0;
        for (int i = 0; i < lc.size() - 4; ++i) m = std::max(m, std::abs(lc[i]));
        CHECK(m < 1e-9);

        // Lap e^{-r^2/2} = (r^2 - N) e^{-r^2/2}
        RealFn u = gaussian(g, 0.5), target(g);
        for (int i = 0; i < u.size(); ++i)
            target[i] = (g->r[i] * g->r[i] - N) * u[i];
        RealFn lu = laplacian(u);
        double err = 0;
        for (int i = 0; i < u.size(); ++i) err = std::max(err, std::abs(lu[i] - target[i]));
        CHECK(err < 5e-4);   // fourth-order stencil at h = 0.01

        auto g2 = make_grid(N, 0.005, 20.0);
        RealFn u2 = gaussian(g2, 0.5);
        RealFn lu2 = laplacian(u2);
        double err2 = 0;
        for (int i = 0; i < u2.size(); ++i)
            err2 = std::max(err2, std::abs(lu2[i] - (g2->r[i] * g2->r[i] - N) * u2[i]));
        CHECK(err2 < err / 3.5);   // at least second order observed
    }
}

TEST_CASE("self-adjointness of -Lap in the grid metric") {
    for (int N : {1, 2, 3}) {
        auto g = make_grid(N, 0.01, 20.0);
        RealFn u = gaussian(g, 1.0), v(g);
        for (int i = 0; i < v.size(); ++i)
            v[i] = g->r[i] * g->r[i] * std::exp(-0.7 * g->r[i] * g->r[i]);
        double a = inner(laplacian(u), v), b = inner(u, laplacian(v));
        CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
    }
}

TEST_CASE("nonlinearity and potential_apply pointwise") {
    auto g = make_grid(2, 0.01, 10.0);
    CplxFn z(g);
    CHECK(norm_l2(nonlinearity(z)) == 0.0);
    CplxFn u(g);
    for (auto& x : u.v) x = cplx(1.0, 1.0);
    CplxFn fu = nonlinearity(u);   // |u|^2 u = 2(1+i) for N=2
    CHECK(fu[5].real() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(fu[5].imag() == doctest::Approx(2.0).epsilon(1e-14));

    // potential at the node r = 1 is +-u(1): pick h so a node sits at 1
    auto g1 = make_grid(2, 1.0 / 99.5, 10.0 / 99.5 * 100);
    CplxFn u1(g1);
    for (auto& x : u1.v) x = cplx(1.0, 0.0);
    CplxFn pu = potential_apply(u1, 0.3, +1);
    CHECK(std::abs(g1->r[99] - 1.0) < 1e-12);
    CHECK(pu[99].real() == doctest::Approx(1.0).epsilon(1e-4));
    CplxFn mu = potential_apply(u1, 0.3, -1);
    CHECK(mu[99].real() == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("grid mismatch rejected") {
    auto g1 = make_grid(1, 0.01, 10.0), g2 = make_grid(1, 0.02, 10.0);
    RealFn a(g1), b(g2);
    CHECK_THROWS(inner(a, b));
}

TEST_CASE("interp_even reproduces smooth functions") {
    auto g = make_grid(2, 0.01, 12.0);
    RealFn u = gaussian(g, 1.0);
    for (double rr : {0.0, 0.003, 0.52, 3.7}) {
        CHECK(interp_even(u, rr) == doctest::Approx(std::exp(-rr * rr)).epsilon(1e-8));
    }
    CHECK(interp_even(u, 11.999) == 0.0);   // zero tail near rmax
}
