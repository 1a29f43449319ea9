#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "kvn/grid.hpp"

namespace kvn {

// Sampled phase-space function on a PhaseGrid, row-major over (j, k) = (q, p).
template <typename T>
struct Field {
    PhaseGrid grid;
    std::vector<T> v;

    Field() = default;
    explicit Field(const PhaseGrid& g, T fill = T{}) : grid(g), v(g.size(), fill) {}

    T& operator()(int j, int k) { return v[static_cast<size_t>(j) * grid.n_p + k]; }
    const T& operator()(int j, int k) const { return v[static_cast<size_t>(j) * grid.n_p + k]; }

    Field& operator+=(const Field& o) {
        check_same(o);
        for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        check_same(o);
        for (size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
        return *this;
    }
    Field& operator*=(T s) {
        for (auto& x : v) x *= s;
        return *this;
    }

    void check_same(const Field& o) const {
        if (!(grid == o.grid)) throw error(errc::grid_mismatch, "fields live on different grids");
    }
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

template <typename T>
Field<T> operator+(Field<T> a, const Field<T>& b) { return a += b; }
template <typename T>
Field<T> operator-(Field<T> a, const Field<T>& b) { return a -= b; }
template <typename T>
Field<T> operator*(Field<T> a, T s) { return a *= s; }

template <typename T, typename U>
auto hadamard(const Field<T>& a, const Field<U>& b) {
    a.check_same(Field<T>(b.grid));
    Field<decltype(T{} * U{})> out(a.grid);
    for (size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
    return out;
}

template <typename Fn>
auto sample(const PhaseGrid& g, Fn&& fn) {
    using T = std::decay_t<decltype(fn(0.0, 0.0))>;
    Field<T> f(g);
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) f(j, k) = fn(g.q(j), g.p(k));
    return f;
}

inline ComplexField to_complex(const RealField& f) {
    ComplexField out(f.grid);
    for (size_t i = 0; i < f.v.size(); ++i) out.v[i] = f.v[i];
    return out;
}

inline RealField real_part(const ComplexField& f) {
    RealField out(f.grid);
    for (size_t i = 0; i < f.v.size(); ++i) out.v[i] = f.v[i].real();
    return out;
}

inline double max_abs(const RealField& f) {
    double m = 0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}
inline double max_abs(const ComplexField& f) {
    double m = 0;
    for (const auto& x : f.v) m = std::max(m, std::abs(x));
    return m;
}

template <typename T>
double max_abs_trust(const Field<T>& f) {
    const TrustRegion tr = trust_region(f.grid);
    double m = 0;
    for (int j = tr.j_lo; j < tr.j_hi; ++j)
        for (int k = tr.k_lo; k < tr.k_hi; ++k) m = std::max(m, std::abs(f(j, k)));
    return m;
}

template <typename T>
bool all_finite(const Field<T>& f) {
    for (const auto& x : f.v) {
        if constexpr (std::is_same_v<T, double>) {
            if (!std::isfinite(x)) return false;
        } else {
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
        }
    }
    return true;
}

// Riemann quadrature; spectrally accurate for smooth periodic integrands.
inline double integrate(const RealField& f) {
    double s = 0;
    for (double x : f.v) s += x;
    return s * f.grid.cell();
}
inline cplx integrate(const ComplexField& f) {
    cplx s = 0;
    for (const auto& x : f.v) s += x;
    return s * f.grid.cell();
}

inline cplx inner(const ComplexField& a, const ComplexField& b) {
    a.check_same(b);
    cplx s = 0;
    for (size_t i = 0; i < a.v.size(); ++i) s += std::conj(a.v[i]) * b.v[i];
    return s * a.grid.cell();
}

inline double norm2(const ComplexField& a) {
    double s = 0;
    for (const auto& x : a.v) s += std::norm(x);
    return s * a.grid.cell();
}

}  // namespace kvn
