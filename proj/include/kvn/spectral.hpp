#pragma once

#include <vector>

#include "kvn/field.hpp"
#include "kvn/parallel.hpp"

namespace kvn {

// Unnormalized FFT of every line along `axis`; sign as in fft_pow2.
inline void fft_axis(ComplexField& f, Axis axis, int sign) {
    const int nq = f.grid.n_q, np = f.grid.n_p;
    if (axis == Axis::p) {
        parallel_for(nq, [&](int j) {
            fft_pow2(std::span<cplx>(f.v.data() + static_cast<size_t>(j) * np, np), sign);
        });
    } else {
        parallel_for(np, [&](int k) {
            std::vector<cplx> col(nq);
            for (int j = 0; j < nq; ++j) col[j] = f(j, k);
            fft_pow2(col, sign);
            for (int j = 0; j < nq; ++j) f(j, k) = col[j];
        });
    }
}

namespace detail {

// Multiply the spectrum along `axis` by (i k)^order with the Nyquist mode
// zeroed for odd orders (it has no well-defined derivative sign).
inline void apply_ik(ComplexField& fhat, Axis axis, int order) {
    const auto& g = fhat.grid;
    if (axis == Axis::q) {
        for (int j = 0; j < g.n_q; ++j) {
            cplx m = std::pow(cplx(0.0, g.kq(j)), order);
            if (order % 2 == 1 && j == g.n_q / 2) m = 0.0;
            for (int k = 0; k < g.n_p; ++k) fhat(j, k) *= m;
        }
    } else {
        for (int k = 0; k < g.n_p; ++k) {
            cplx m = std::pow(cplx(0.0, g.kp(k)), order);
            if (order % 2 == 1 && k == g.n_p / 2) m = 0.0;
            for (int j = 0; j < g.n_q; ++j) fhat(j, k) *= m;
        }
    }
}

}  // namespace detail

// Fourier-spectral partial derivative; exact for band-limited fields.
inline ComplexField spectral_derivative(const ComplexField& f, Axis axis, int order = 1) {
    ComplexField out = f;
    fft_axis(out, axis, -1);
    detail::apply_ik(out, axis, order);
    fft_axis(out, axis, +1);
    const double inv = 1.0 / (axis == Axis::q ? f.grid.n_q : f.grid.n_p);
    for (auto& x : out.v) x *= inv;
    return out;
}

inline RealField spectral_derivative(const RealField& f, Axis axis, int order = 1) {
    return real_part(spectral_derivative(to_complex(f), axis, order));
}

// {u, v} = d_q u d_p v - d_p u d_q v, via spectral derivatives.
template <typename T, typename U>
auto poisson_bracket(const Field<T>& u, const Field<U>& v) {
    if (!(u.grid == v.grid)) throw error(errc::grid_mismatch, "poisson_bracket operands");
    auto uq = spectral_derivative(u, Axis::q);
    auto up = spectral_derivative(u, Axis::p);
    auto vq = spectral_derivative(v, Axis::q);
    auto vp = spectral_derivative(v, Axis::p);
    return hadamard(uq, vp) - hadamard(up, vq);
}

// ---- coordinate fields -----------------------------------------------------

// Raw coordinate samples; sawtooth-discontinuous at the periodic seam.
inline RealField coordinate_field(const PhaseGrid& g, Axis axis) {
    return axis == Axis::q ? sample(g, [](double q, double) { return q; })
                           : sample(g, [](double, double p) { return p; });
}

namespace detail {

// Heat-kernel mollified sawtooth: multiply the coordinate spectrum by a
// Gaussian. Linear functions are invariant under symmetric mollification, so
// the result equals the coordinate away from the seam to within the kernel
// tail, while the seam jump is smoothed into a band-limited transition.
inline std::vector<double> mollified_axis(int n, double lo, double L, double delta_scale) {
    const double delta = delta_scale * L / (2.0 * std::sqrt(std::numbers::pi * n));
    std::vector<cplx> a(n);
    for (int j = 0; j < n; ++j) a[j] = lo + j * L / n;
    fft_pow2(a, -1);
    for (int j = 0; j < n; ++j) {
        int f = j < n / 2 ? j : j - n;
        double k = 2.0 * std::numbers::pi * f / L;
        double w = std::exp(-0.5 * k * k * delta * delta);
        a[j] *= (w < 1e-18 ? 0.0 : w);
    }
    fft_pow2(a, +1);
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = a[j].real() / n;
    return out;
}

}  // namespace detail

// Periodic surrogate of a coordinate: equals the coordinate on the trust
// region to ~1e-12 (n >= 64) and is smooth through the seam, so spectral
// differentiation of it and of its products is alias-free.
inline RealField periodic_coordinate(const PhaseGrid& g, Axis axis, double delta_scale = 1.25) {
    RealField f(g);
    if (axis == Axis::q) {
        auto col = detail::mollified_axis(g.n_q, g.q_min, g.Lq(), delta_scale);
        for (int j = 0; j < g.n_q; ++j)
            for (int k = 0; k < g.n_p; ++k) f(j, k) = col[j];
    } else {
        auto row = detail::mollified_axis(g.n_p, g.p_min, g.Lp(), delta_scale);
        for (int j = 0; j < g.n_q; ++j)
            for (int k = 0; k < g.n_p; ++k) f(j, k) = row[k];
    }
    return f;
}

}  // namespace kvn
