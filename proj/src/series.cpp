#include "blowup/series.hpp"

#include <functional>

namespace blowup {

void FormalSeries::add_re(int j, int k, const std::vector<double>& f, double c) {
    if (j + k > ord_ || j < 0 || k < 0) return;
    auto& s = re_slot(j, k);
    for (size_t i = 0; i < s.size(); ++i) s[i] += c * f[i];
}

void FormalSeries::add_im(int j, int k, const std::vector<double>& f, double c) {
    if (j + k > ord_ || j < 0 || k < 0) return;
    auto& s = im_slot(j, k);
    for (size_t i = 0; i < s.size(); ++i) s[i] += c * f[i];
}

FormalSeries& FormalSeries::operator+=(const FormalSeries& o) {
    o.for_each([&](int j, int k, bool imag, const std::vector<double>& v) {
        if (imag) add_im(j, k, v); else add_re(j, k, v);
    });
    return *this;
}

FormalSeries& FormalSeries::operator-=(const FormalSeries& o) {
    o.for_each([&](int j, int k, bool imag, const std::vector<double>& v) {
        if (imag) add_im(j, k, v, -1.0); else add_re(j, k, v, -1.0);
    });
    return *this;
}

void FormalSeries::scale(double c) {
    for (auto& e : re_) for (auto& x : e.v) x *= c;
    for (auto& e : im_) for (auto& x : e.v) x *= c;
}

FormalSeries FormalSeries::conjugate() const {
    FormalSeries o = *this;
    for (auto& e : o.im_) for (auto& x : e.v) x = -x;
    return o;
}

FormalSeries FormalSeries::shift_k(int dk) const {
    FormalSeries o(grid_, ord_);
    for_each([&](int j, int k, bool imag, const std::vector<double>& v) {
        if (imag) o.add_im(j, k + dk, v); else o.add_re(j, k + dk, v);
    });
    return o;
}

FormalSeries FormalSeries::mul_field(const std::vector<double>& f) const {
    FormalSeries o(grid_, ord_);
    for_each([&](int j, int k, bool imag, const std::vector<double>& v) {
        std::vector<double> t(v.size());
        for (size_t i = 0; i < v.size(); ++i) t[i] = f[i] * v[i];
        if (imag) o.add_im(j, k, t); else o.add_re(j, k, t);
    });
    return o;
}

FormalSeries FormalSeries::apply_linear(
    const std::function<std::vector<double>(const std::vector<double>&)>& op) const {
    FormalSeries o(grid_, ord_);
    for_each([&](int j, int k, bool imag, const std::vector<double>& v) {
        auto t = op(v);
        if (imag) o.add_im(j, k, t); else o.add_re(j, k, t);
    });
    return o;
}

FormalSeries mul(const FormalSeries& a, const FormalSeries& b) {
    FormalSeries o(a.grid_, std::max(a.ord_, b.ord_));
    const int M = a.grid_->size();
    std::vector<double> t(M);
    auto prod_into = [&](const std::vector<double>& x, const std::vector<double>& y)
        -> const std::vector<double>& {
        for (int i = 0; i < M; ++i) t[i] = x[i] * y[i];
        return t;
    };
    // (R1 + i b I1) b^{2j1} lam^{k1 a} * (R2 + i b I2) b^{2j2} lam^{k2 a}:
    //   R1 R2             -> re[j1+j2][k1+k2]
    //   - b^2 I1 I2       -> re[j1+j2+1][k1+k2]
    //   b (R1 I2 + I1 R2) -> im[j1+j2][k1+k2]
    for (const auto& ea : a.re_)
        for (const auto& eb : b.re_)
            o.add_re(ea.j + eb.j, ea.k + eb.k, prod_into(ea.v, eb.v));
    for (const auto& ea : a.im_)
        for (const auto& eb : b.im_)
            o.add_re(ea.j + eb.j + 1, ea.k + eb.k, prod_into(ea.v, eb.v), -1.0);
    for (const auto& ea : a.re_)
        for (const auto& eb : b.im_)
            o.add_im(ea.j + eb.j, ea.k + eb.k, prod_into(ea.v, eb.v));
    for (const auto& ea : a.im_)
        for (const auto& eb : b.re_)
            o.add_im(ea.j + eb.j, ea.k + eb.k, prod_into(ea.v, eb.v));
    return o;
}

CplxFn FormalSeries::evaluate(double lam_alpha, double b) const {
    CplxFn u(grid_);
    for_each([&](int j, int k, bool imag, const std::vector<double>& v) {
        double c = std::pow(b, 2 * j) * std::pow(lam_alpha, k);
        if (imag) {
            double cb = c * b;
            for (int i = 0; i < u.size(); ++i) u[i] += cplx(0.0, cb * v[i]);
        } else {
            for (int i = 0; i < u.size(); ++i) u[i] += cplx(c * v[i], 0.0);
        }
    });
    return u;
}

} // namespace blowup
