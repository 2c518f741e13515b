#pragma once
// Formal series on the (b, lambda^alpha) lattice used by the profile
// construction. An element represents
//   sum_{j,k >= 0, j+k <= ord}  b^{2j} lam^{k a} ( R_{j,k}(y) + i b I_{j,k}(y) )
// with real grid-function coefficients; products respect the parity
// structure (even powers of b real, odd imaginary) and truncate at ord.

#include "blowup/grid.hpp"

#include <functional>

namespace blowup {

struct SeriesIndex {
    int j = 0, k = 0;
};

class FormalSeries {
public:
    FormalSeries() = default;
    FormalSeries(GridPtr g, int ord) : grid_(std::move(g)), ord_(ord) {}

    int order() const { return ord_; }
    GridPtr grid() const { return grid_; }

    bool has_re(int j, int k) const { return find(re_, j, k) != nullptr; }
    bool has_im(int j, int k) const { return find(im_, j, k) != nullptr; }
    const std::vector<double>* re(int j, int k) const { return find(re_, j, k); }
    const std::vector<double>* im(int j, int k) const { return find(im_, j, k); }
    std::vector<double>& re_slot(int j, int k) { return slot(re_, j, k); }
    std::vector<double>& im_slot(int j, int k) { return slot(im_, j, k); }

    void add_re(int j, int k, const std::vector<double>& f, double c = 1.0);
    void add_im(int j, int k, const std::vector<double>& f, double c = 1.0);

    FormalSeries& operator+=(const FormalSeries& o);
    FormalSeries& operator-=(const FormalSeries& o);
    void scale(double c);

    FormalSeries conjugate() const;          // flips the imaginary slots
    FormalSeries shift_k(int dk) const;      // multiply by lam^{dk * alpha}
    FormalSeries mul_field(const std::vector<double>& f) const;   // pointwise
    FormalSeries apply_linear(const std::function<std::vector<double>(
                                  const std::vector<double>&)>& op) const;

    friend FormalSeries mul(const FormalSeries& a, const FormalSeries& b);

    // value at given (lambda^alpha, b)
    CplxFn evaluate(double lam_alpha, double b) const;

    // enumerate stored slots
    template <class F>
    void for_each(F&& f) const {
        for (const auto& e : re_) f(e.j, e.k, /*imag=*/false, e.v);
        for (const auto& e : im_) f(e.j, e.k, /*imag=*/true, e.v);
    }

private:
    struct Entry {
        int j, k;
        std::vector<double> v;
    };
    GridPtr grid_;
    int ord_ = 0;
    std::vector<Entry> re_, im_;

    static const std::vector<double>* find(const std::vector<Entry>& es, int j, int k) {
        for (const auto& e : es)
            if (e.j == j && e.k == k) return &e.v;
        return nullptr;
    }
    std::vector<double>& slot(std::vector<Entry>& es, int j, int k) {
        for (auto& e : es)
            if (e.j == j && e.k == k) return e.v;
        es.push_back({j, k, std::vector<double>(grid_->size(), 0.0)});
        return es.back().v;
    }
};

FormalSeries mul(const FormalSeries& a, const FormalSeries& b);

} // namespace blowup
