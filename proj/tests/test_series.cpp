#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blowup/series.hpp"

#include <random>

using namespace blowup;

namespace {

FormalSeries random_series(GridPtr g, int ord, unsigned seed, int terms = 5) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> ji(0, ord);
    std::normal_distribution<double> nd;
    FormalSeries s(g, ord);
    for (int t = 0; t < terms; ++t) {
        int j = ji(rng), k = ji(rng);
        if (j + k > ord) continue;
        std::vector<double> v(g->size());
        for (auto& x : v) x = nd(rng);
        if (ji(rng) % 2) s.add_re(j, k, v);
        else s.add_im(j, k, v);
    }
    return s;
}

double series_dist(const FormalSeries& a, const FormalSeries& b,
                   double la, double bb) {
    CplxFn ua = a.evaluate(la, bb), ub = b.evaluate(la, bb);
    return norm_l2(ua - ub);
}

} // namespace

TEST_CASE("multiplication is commutative and associative (truncation-consistent)") {
    auto g = make_grid(1, 0.2, 5.0);
    for (unsigned seed : {1u, 2u, 3u}) {
        auto A = random_series(g, 6, seed);
        auto B = random_series(g, 6, seed + 100);
        auto C = random_series(g, 6, seed + 200);
        CHECK(series_dist(mul(A, B), mul(B, A), 0.3, 0.2) < 1e-12);
        CHECK(series_dist(mul(mul(A, B), C), mul(A, mul(B, C)), 0.3, 0.2) < 1e-11);
    }
}

TEST_CASE("evaluation matches direct complex arithmetic") {
    auto g = make_grid(1, 0.2, 5.0);
    auto A = random_series(g, 6, 42);
    auto B = random_series(g, 6, 43);
    double la = 0.4, b = 0.3;
    CplxFn ua = A.evaluate(la, b), ub = B.evaluate(la, b);
    // pointwise product vs series product (high truncation: exact here since
    // term orders stay within 2*6 <= 12; use ord 12 copies)
    FormalSeries A2(g, 12), B2(g, 12);
    A.for_each([&](int j, int k, bool im, const std::vector<double>& v) {
        if (im) A2.add_im(j, k, v); else A2.add_re(j, k, v);
    });
    B.for_each([&](int j, int k, bool im, const std::vector<double>& v) {
        if (im) B2.add_im(j, k, v); else B2.add_re(j, k, v);
    });
    CplxFn uprod = mul(A2, B2).evaluate(la, b);
    double err = 0;
    for (int i = 0; i < uprod.size(); ++i)
        err = std::max(err, std::abs(uprod[i] - ua[i] * ub[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("conjugate flips the imaginary part of the evaluation") {
    auto g = make_grid(1, 0.2, 5.0);
    auto A = random_series(g, 5, 7);
    CplxFn u = A.evaluate(0.37, 0.21);
    CplxFn uc = A.conjugate().evaluate(0.37, 0.21);
    double err = 0;
    for (int i = 0; i < u.size(); ++i)
        err = std::max(err, std::abs(uc[i] - std::conj(u[i])));
    CHECK(err < 1e-14);
}

TEST_CASE("shift_k multiplies by lam^alpha") {
    auto g = make_grid(1, 0.2, 5.0);
    auto A = random_series(g, 4, 11);
    double la = 0.29, b = 0.4;
    CplxFn u = A.evaluate(la, b), us = A.shift_k(1).evaluate(la, b);
    double err = 0;
    for (int i = 0; i < u.size(); ++i)
        err = std::max(err, std::abs(us[i] - la * u[i]));
    CHECK(err < 1e-14);
}
