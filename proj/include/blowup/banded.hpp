#pragma once
// Banded LU with partial pivoting (LAPACK gbtrf-style storage), real and
// complex, plus iterative refinement with long-double residual accumulation.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace blowup {

template <class T>
struct Banded {
    int n = 0, kl = 0, ku = 0;
    // a[(ku + kl) + 1 + kl rows] x n, element (i,j) at a[idx(i,j)] for
    // max(0,j-ku) <= i <= min(n-1, j+kl); extra kl rows on top for fill-in.
    std::vector<T> a;
    std::vector<int> ipiv;
    bool factored = false;

    Banded() = default;
    Banded(int n_, int kl_, int ku_)
        : n(n_), kl(kl_), ku(ku_), a(static_cast<size_t>(2 * kl_ + ku_ + 1) * n_, T{}) {}

    int rows_per_col() const { return 2 * kl + ku + 1; }
    // row index within column storage: ku + kl + i - j
    T& at(int i, int j) { return a[static_cast<size_t>(j) * rows_per_col() + (ku + kl + i - j)]; }
    const T& at(int i, int j) const {
        return a[static_cast<size_t>(j) * rows_per_col() + (ku + kl + i - j)];
    }
    bool in_band(int i, int j) const { return i - j <= kl && j - i <= ku + kl; }

    void factor();                                  // in place, partial pivoting
    void solve(std::vector<T>& b) const;            // after factor()
    T det_sign_scale() const;                       // product of pivots (diagnostic)
};

template <class T>
void Banded<T>::factor() {
    ipiv.assign(n, 0);
    for (int j = 0; j < n; ++j) {
        int ilast = std::min(n - 1, j + kl);
        int ip = j;
        double amax = std::abs(at(j, j));
        for (int i = j + 1; i <= ilast; ++i) {
            double m = std::abs(at(i, j));
            if (m > amax) { amax = m; ip = i; }
        }
        ipiv[j] = ip;
        if (amax == 0.0) throw std::runtime_error("banded LU: zero pivot");
        int jlast = std::min(n - 1, j + kl + ku);
        if (ip != j)
            for (int c = j; c <= jlast; ++c) std::swap(at(j, c), at(ip, c));
        T piv = at(j, j);
        for (int i = j + 1; i <= ilast; ++i) {
            T m = at(i, j) / piv;
            at(i, j) = m;
            for (int c = j + 1; c <= jlast; ++c) at(i, c) -= m * at(j, c);
        }
    }
    factored = true;
}

template <class T>
void Banded<T>::solve(std::vector<T>& b) const {
    if (!factored) throw std::runtime_error("banded LU: not factored");
    for (int j = 0; j < n; ++j) {
        if (ipiv[j] != j) std::swap(b[j], b[ipiv[j]]);
        int ilast = std::min(n - 1, j + kl);
        for (int i = j + 1; i <= ilast; ++i) b[i] -= at(i, j) * b[j];
    }
    for (int j = n - 1; j >= 0; --j) {
        int jfirst = std::max(0, j - kl - ku);
        b[j] /= at(j, j);
        for (int i = jfirst; i < j; ++i) b[i] -= at(i, j) * b[j];
    }
}

template <class T>
T Banded<T>::det_sign_scale() const {
    T p = T{1};
    for (int j = 0; j < n; ++j) p *= at(j, j);
    return p;
}

// Matrix kept in unfactored band form for refinement/matvec.
template <class T>
struct BandedPair {
    Banded<T> mat;   // pristine copy
    Banded<T> lu;    // factored copy

    void factor() { lu = mat; lu.factor(); }

    std::vector<T> matvec(const std::vector<T>& x) const {
        std::vector<T> y(mat.n, T{});
        for (int i = 0; i < mat.n; ++i) {
            int j0 = std::max(0, i - mat.kl), j1 = std::min(mat.n - 1, i + mat.ku + mat.kl);
            T s{};
            for (int j = j0; j <= j1; ++j)
                if (mat.in_band(i, j)) s += mat.at(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    // Solve with iterative refinement; residuals accumulated in long double.
    std::vector<T> solve_refined(const std::vector<T>& b, int iters = 2) const {
        std::vector<T> x = b;
        lu.solve(x);
        for (int it = 0; it < iters; ++it) {
            std::vector<T> r(mat.n);
            for (int i = 0; i < mat.n; ++i) {
                int j0 = std::max(0, i - mat.kl), j1 = std::min(mat.n - 1, i + mat.ku + mat.kl);
                if constexpr (std::is_same_v<T, double>) {
                    long double s = b[i];
                    for (int j = j0; j <= j1; ++j)
                        if (mat.in_band(i, j)) s -= (long double)mat.at(i, j) * (long double)x[j];
                    r[i] = static_cast<double>(s);
                } else {
                    std::complex<long double> s(b[i].real(), b[i].imag());
                    for (int j = j0; j <= j1; ++j)
                        if (mat.in_band(i, j)) {
                            std::complex<long double> aa(mat.at(i, j).real(), mat.at(i, j).imag());
                            std::complex<long double> xx(x[j].real(), x[j].imag());
                            s -= aa * xx;
                        }
                    r[i] = T(static_cast<double>(s.real()), static_cast<double>(s.imag()));
                }
            }
            lu.solve(r);
            for (int i = 0; i < mat.n; ++i) x[i] += r[i];
        }
        return x;
    }
};

} // namespace blowup
