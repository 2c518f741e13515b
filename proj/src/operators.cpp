#include "blowup/operators.hpp"

#include <algorithm>
#include <cmath>

namespace blowup {

namespace {

inline std::pair<int, double> reflect(int i, int M) {
    if (i < 0) return {-i - 1, 1.0};
    if (i >= M) return {2 * M - 1 - i, -1.0};
    return {i, 1.0};
}

inline double face_rho(double x, int dim, double R) {
    if (x < 0) x = -x;
    if (x > R) x = 2 * R - x;
    return std::pow(x, dim - 1);
}

} // namespace

StiffnessK build_stiffness(const RadialGrid& g) {
    const int M = g.size();
    StiffnessK K;
    for (auto& d : K.kd) d.assign(M, 0.0);
    const double cN = sphere_area_constant(g.dim);
    const double R = g.rmax;
    // face j at x = j*h; Dhat stencil nodes j-2..j+1 with (1,-27,27,-1)/(24h)
    constexpr int off[4] = {-2, -1, 0, 1};
    constexpr double cf[4] = {1.0, -27.0, 27.0, -1.0};
    for (int j = 0; j <= M; ++j) {
        double rho = face_rho(j * g.h, g.dim, R);
        if (rho == 0.0) continue;
        double coef = cN * rho * g.h;
        int idx[4]; double cc[4];
        for (int k = 0; k < 4; ++k) {
            auto [jj, sg] = reflect(j + off[k], M);
            idx[k] = jj;
            cc[k] = sg * cf[k] / (24.0 * g.h);
        }
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                int i1 = idx[a], i2 = idx[b];
                if (i2 < i1 || i2 - i1 > 3) continue;
                K.kd[i2 - i1][i1] += coef * cc[a] * cc[b];
            }
    }
    return K;
}

std::vector<double> StiffnessK::apply(const std::vector<double>& u) const {
    const int M = static_cast<int>(u.size());
    std::vector<double> y(M, 0.0);
    for (int d = 0; d < 4; ++d)
        for (int i = 0; i + d < M; ++i) {
            y[i] += kd[d][i] * u[i + d];
            if (d > 0) y[i + d] += kd[d][i] * u[i];
        }
    return y;
}

std::vector<cplx> StiffnessK::apply(const std::vector<cplx>& u) const {
    const int M = static_cast<int>(u.size());
    std::vector<cplx> y(M, cplx{});
    for (int d = 0; d < 4; ++d)
        for (int i = 0; i + d < M; ++i) {
            y[i] += kd[d][i] * u[i + d];
            if (d > 0) y[i + d] += kd[d][i] * u[i];
        }
    return y;
}

namespace {

// one stiffness per grid instance; the cache holds shared ownership so a
// reused allocation address can never alias a dead grid
const StiffnessK& stiffness_for(const GridPtr& grid) {
    thread_local std::vector<std::pair<GridPtr, std::unique_ptr<StiffnessK>>> cache;
    for (auto& [p, K] : cache)
        if (p == grid) return *K;
    if (cache.size() > 8) cache.erase(cache.begin());
    cache.emplace_back(grid, std::make_unique<StiffnessK>(build_stiffness(*grid)));
    return *cache.back().second;
}

} // namespace

RealFn laplacian(const RealFn& u) {
    const auto& K = stiffness_for(u.grid);
    auto y = K.apply(u.v);
    RealFn o(u.grid);
    for (int i = 0; i < u.size(); ++i) o[i] = -y[i] / u.grid->w[i];
    return o;
}

CplxFn laplacian(const CplxFn& u) {
    const auto& K = stiffness_for(u.grid);
    auto y = K.apply(u.v);
    CplxFn o(u.grid);
    for (int i = 0; i < u.size(); ++i) o[i] = -y[i] / u.grid->w[i];
    return o;
}

double grad_sq(const RealFn& u) {
    const auto& K = stiffness_for(u.grid);
    auto y = K.apply(u.v);
    long double s = 0;
    for (int i = 0; i < u.size(); ++i) s += (long double)y[i] * u[i];
    return std::max(0.0, static_cast<double>(s));
}

double grad_sq(const CplxFn& u) {
    const auto& K = stiffness_for(u.grid);
    auto y = K.apply(u.v);
    long double s = 0;
    for (int i = 0; i < u.size(); ++i)
        s += (long double)(y[i].real() * u[i].real() + y[i].imag() * u[i].imag());
    return std::max(0.0, static_cast<double>(s));
}

RealFn RadialOperator::apply(const RealFn& u) const {
    auto y = K.apply(u.v);
    RealFn o(u.grid);
    for (int i = 0; i < u.size(); ++i) o[i] = y[i] / grid->w[i] + V[i] * u[i];
    return o;
}

CplxFn RadialOperator::apply(const CplxFn& u) const {
    auto y = K.apply(u.v);
    CplxFn o(u.grid);
    for (int i = 0; i < u.size(); ++i) o[i] = y[i] / grid->w[i] + V[i] * u[i];
    return o;
}

template <class T>
BandedPair<T> RadialOperator::assemble(T alpha, T beta) const {
    const int M = grid->size();
    BandedPair<T> bp;
    bp.mat = Banded<T>(M, 3, 3);
    for (int d = 0; d < 4; ++d)
        for (int i = 0; i + d < M; ++i) {
            double k = K.kd[d][i];
            if (d == 0) {
                bp.mat.at(i, i) = alpha + beta * T(k / grid->w[i] + V[i]);
            } else {
                bp.mat.at(i, i + d) += beta * T(k / grid->w[i]);
                bp.mat.at(i + d, i) += beta * T(k / grid->w[i + d]);
            }
        }
    bp.factor();
    return bp;
}

template BandedPair<double> RadialOperator::assemble<double>(double, double) const;
template BandedPair<cplx> RadialOperator::assemble<cplx>(cplx, cplx) const;

RealFn RadialOperator::solve(const RealFn& g, int refine) const {
    auto bp = assemble<double>(0.0, 1.0);
    RealFn o(g.grid);
    o.v = bp.solve_refined(g.v, refine);
    return o;
}

double RadialOperator::condition_estimate() const {
    // ||H||_1 * ||H^{-1}||_1 via one Hager-style step
    const int M = grid->size();
    double anorm = 0.0;
    for (int i = 0; i < M; ++i) {
        double s = std::abs(K.kd[0][i] / grid->w[i] + V[i]);
        for (int d = 1; d < 4; ++d) {
            if (i + d < M) s += std::abs(K.kd[d][i] / grid->w[i]);
            if (i - d >= 0) s += std::abs(K.kd[d][i - d] / grid->w[i]);
        }
        anorm = std::max(anorm, s);
    }
    auto bp = assemble<double>(0.0, 1.0);
    std::vector<double> x(M, 1.0 / M);
    x = bp.solve_refined(x, 1);
    double inv1 = 0.0;
    for (double xi : x) inv1 += std::abs(xi);
    return anorm * inv1;
}

} // namespace blowup
