#pragma once
// Radial grids on (0, R_max): cell-centered nodes r_i = (i+1/2)h, quadrature
// for the measure c_N r^{N-1} dr, and grid-function arithmetic.

#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace blowup {

using cplx = std::complex<double>;

double sphere_area_constant(int dim);   // c_1 = 2, c_2 = 2*pi, c_3 = 4*pi

struct RadialGrid {
    int dim = 1;                // N in {1,2,3}
    double h = 0.0;             // spacing
    double rmax = 0.0;          // truncation radius, rmax = M*h
    std::vector<double> r;      // nodes, r[i] = (i+1/2)h
    std::vector<double> w;      // quadrature masses (operator-consistent)
    std::vector<double> w_mid;  // plain midpoint masses c_N r^{N-1} h

    int size() const { return static_cast<int>(r.size()); }
    bool same(const RadialGrid& o) const {
        return dim == o.dim && size() == o.size() && h == o.h && rmax == o.rmax;
    }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Builds the grid; the first few masses are calibrated against the staggered
// Laplacian so that its rows stay consistent at the origin (see operators.cpp).
GridPtr make_grid(int dim, double h, double rmax);

template <class T>
struct RadialFunction {
    GridPtr grid;
    std::vector<T> v;

    RadialFunction() = default;
    RadialFunction(GridPtr g, T fill = T{}) : grid(std::move(g)), v(grid->size(), fill) {}
    RadialFunction(GridPtr g, std::vector<T> vals) : grid(std::move(g)), v(std::move(vals)) {
        if (static_cast<int>(v.size()) != grid->size())
            throw std::invalid_argument("RadialFunction: value/grid size mismatch");
    }
    int size() const { return static_cast<int>(v.size()); }
    T& operator[](int i) { return v[i]; }
    const T& operator[](int i) const { return v[i]; }

    RadialFunction& operator+=(const RadialFunction& o) {
        check(o); for (int i = 0; i < size(); ++i) v[i] += o.v[i]; return *this;
    }
    RadialFunction& operator-=(const RadialFunction& o) {
        check(o); for (int i = 0; i < size(); ++i) v[i] -= o.v[i]; return *this;
    }
    RadialFunction& operator*=(T s) { for (auto& x : v) x *= s; return *this; }
    void check(const RadialFunction& o) const {
        if (!grid || !o.grid || !grid->same(*o.grid))
            throw std::invalid_argument("RadialFunction: grid mismatch");
    }
};

using RealFn = RadialFunction<double>;
using CplxFn = RadialFunction<cplx>;

template <class T>
RadialFunction<T> operator+(RadialFunction<T> a, const RadialFunction<T>& b) { a += b; return a; }
template <class T>
RadialFunction<T> operator-(RadialFunction<T> a, const RadialFunction<T>& b) { a -= b; return a; }
template <class T>
RadialFunction<T> operator*(T s, RadialFunction<T> a) { a *= s; return a; }

RealFn re_part(const CplxFn& u);
RealFn im_part(const CplxFn& u);
CplxFn to_complex(const RealFn& u);

// (u,v)_2 = Re \int u conj(v) with the radial measure.
double inner(const RealFn& u, const RealFn& v);
double inner(const CplxFn& u, const CplxFn& v);

enum class NormKind { L2, H1, GradL2 };

double norm_l2(const RealFn& u);
double norm_l2(const CplxFn& u);
// || |y|^p u ||_2 ; for p = -sigma the singular product-integration weights
// are used (requires p > -dim/2).
double norm_weighted(const RealFn& u, double p);
double norm_weighted(const CplxFn& u, double p);

// Scalar integral of a smooth grid function with endpoint-corrected
// (fourth-order) quadrature; used for exactness checks, not as the metric.
double integrate_smooth(const RealFn& f);

// Product-integration masses s_j with sum_j s_j phi_j ~ int r^{-2sigma} phi dmu,
// quadratic interpolation per cell, exact power moments.
std::vector<double> singular_masses(const RadialGrid& g, double two_sigma);
// shat = s/w: diagonal representation of the potential r^{-2sigma} in the metric.
std::vector<double> potential_diag(const RadialGrid& g, double two_sigma);

// Fourth-order first derivative (even fold at 0, odd fold at R).
RealFn deriv(const RealFn& u);
CplxFn deriv(const CplxFn& u);

// Lambda u = (N/2) u + r du/dr.
RealFn lambda_op(const RealFn& u);
CplxFn lambda_op(const CplxFn& u);

double norm_h1(const RealFn& u);
double norm_h1(const CplxFn& u);

// f(z) = |z|^{4/N} z, pointwise.
CplxFn nonlinearity(const CplxFn& u);
// +- r^{-2sigma} u, pointwise with the product-integration potential diagonal.
CplxFn potential_apply(const CplxFn& u, double sigma, int sign);

// Cubic interpolation of a profile-grid function at arbitrary radius;
// even extension below the first node, zero beyond rmax.
double interp_even(const RealFn& u, double rr);

} // namespace blowup
