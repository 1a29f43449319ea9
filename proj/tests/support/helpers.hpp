#pragma once

#include <kvn/randomfields.hpp>
#include <kvn/states.hpp>

namespace kvn::testing {

inline PhaseGrid box16(int n, double hbar = 1.0) {
    return make_grid(n, n, -8.0, 8.0, -8.0, 8.0, hbar);
}

// 4th-order centered finite difference along an axis, periodic. Independent
// of the spectral path; used as the derivative oracle.
inline ComplexField fd4_derivative(const ComplexField& f, Axis axis) {
    const PhaseGrid& g = f.grid;
    ComplexField out(g);
    const int nq = g.n_q, np = g.n_p;
    if (axis == Axis::q) {
        const double h = g.dq();
        for (int j = 0; j < nq; ++j)
            for (int k = 0; k < np; ++k) {
                const auto v = [&](int jj) { return f(((jj) % nq + nq) % nq, k); };
                out(j, k) = (-v(j + 2) + 8.0 * v(j + 1) - 8.0 * v(j - 1) + v(j - 2)) /
                            (12.0 * h);
            }
    } else {
        const double h = g.dp();
        for (int j = 0; j < nq; ++j)
            for (int k = 0; k < np; ++k) {
                const auto v = [&](int kk) { return f(j, ((kk) % np + np) % np); };
                out(j, k) = (-v(k + 2) + 8.0 * v(k + 1) - 8.0 * v(k - 1) + v(k - 2)) /
                            (12.0 * h);
            }
    }
    return out;
}

inline double linf(const ComplexField& a, const ComplexField& b) {
    double m = 0;
    for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

inline double linf(const RealField& a, const RealField& b) {
    double m = 0;
    for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

inline double l2_distance(const RealField& a, const RealField& b) {
    double s = 0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        s += d * d;
    }
    return std::sqrt(s * a.grid.cell());
}

inline double l1_distance(const RealField& a, const RealField& b) {
    double s = 0;
    for (size_t i = 0; i < a.v.size(); ++i) s += std::abs(a.v[i] - b.v[i]);
    return s * a.grid.cell();
}

}  // namespace kvn::testing
