#pragma once

#include <vector>

#include "kvn/parallel.hpp"
#include "kvn/states.hpp"

namespace kvn {

// Doubled-phase-space Wigner field rho_W(q, p~, q~, p). The conjugate lattices
// carry half the spectral wavenumber spacing (p~ step = hbar*pi/Lq), which is
// what the even-parity offset transform natively produces with the same
// cardinality per axis as the source grid. Matrix elements are gathered with
// zero extension outside the box (states must decay at the seam), which keeps
// the marginal and normalization identities exact while excluding the
// antipodal ghost images a periodic gather would create.
struct WignerField {
    PhaseGrid grid;           // source phase-space grid (axes 0 and 3)
    std::vector<double> v;    // row-major over (j, m, r, k)
    double max_imag_residue = 0.0;

    int nq() const { return grid.n_q; }
    int np() const { return grid.n_p; }
    double dpt() const { return grid.hbar * std::numbers::pi / grid.Lq(); }
    double dqt() const { return grid.hbar * std::numbers::pi / grid.Lp(); }
    double ptilde(int m) const { return (m - nq() / 2) * dpt(); }
    double qtilde(int r) const { return (r - np() / 2) * dqt(); }
    double cell4() const { return grid.dq() * dpt() * dqt() * grid.dp(); }

    size_t idx(int j, int m, int r, int k) const {
        return ((static_cast<size_t>(j) * nq() + m) * np() + r) * np() + k;
    }
    double& at(int j, int m, int r, int k) { return v[idx(j, m, r, k)]; }
    double at(int j, int m, int r, int k) const { return v[idx(j, m, r, k)]; }

    double integral() const {
        double s = 0;
        for (double x : v) s += x;
        return s * cell4();
    }
    double min() const {
        double m = v.empty() ? 0.0 : v[0];
        for (double x : v) m = std::min(m, x);
        return m;
    }
    double max() const {
        double m = v.empty() ? 0.0 : v[0];
        for (double x : v) m = std::max(m, x);
        return m;
    }
};

struct PartialWignerField {
    int which = 1;             // 1: (q, p~), 2: (q~, p)
    int n_x = 0, n_c = 0;      // coordinate axis points, conjugate axis points
    double x_lo = 0, x_d = 0;  // coordinate lattice
    double c_d = 0;            // conjugate lattice step; values centered at -n_c/2
    std::vector<double> v;     // row-major (x, c) for which=1; (c, x) for which=2

    double& at(int a, int b) { return v[static_cast<size_t>(a) * (which == 1 ? n_c : n_x) + b]; }
    double at(int a, int b) const {
        return v[static_cast<size_t>(a) * (which == 1 ? n_c : n_x) + b];
    }
    double cell() const { return x_d * c_d; }
    double integral() const {
        double s = 0;
        for (double x : v) s += x;
        return s * cell();
    }
    double min() const {
        double m = v[0];
        for (double x : v) m = std::min(m, x);
        return m;
    }
    double max() const {
        double m = v[0];
        for (double x : v) m = std::max(m, x);
        return m;
    }
};

struct WignerOptions {
    bool allow_large = false;  // permit 64x64 source grids (134 MB 4D field)
};

namespace detail {

// Kernel accessor abstraction so the dense and rank-1 paths share one transform.
template <typename KernelFn>
WignerField wigner_transform_impl(const PhaseGrid& g, KernelFn&& kernel,
                                  const WignerOptions& opts) {
    if (g.size() > (opts.allow_large ? kDenseOperatorCap : 1024))
        throw error(errc::memory_guard,
                    "wigner grid too large (pass allow_large for 64x64)");
    const int nq = g.n_q, np = g.n_p;
    WignerField W;
    W.grid = g;
    W.v.assign(static_cast<size_t>(nq) * nq * np * np, 0.0);
    const double scale = 4.0 * g.cell() /
                         (2.0 * std::numbers::pi * g.hbar * 2.0 * std::numbers::pi * g.hbar);
    std::vector<double> imag_residues(nq, 0.0);

    parallel_for(nq, [&](int j) {
        std::vector<cplx> H(static_cast<size_t>(nq) * np);
        std::vector<cplx> line(std::max(nq, np));
        double resid = 0.0;
        const int sj = std::min(j, nq - 1 - j);  // offsets with both q-indices in range
        for (int k = 0; k < np; ++k) {
            std::fill(H.begin(), H.end(), cplx(0.0, 0.0));
            const int tk = std::min(k, np - 1 - k);
            for (int s = -sj; s <= sj; ++s) {
                const int sm = (s + nq) % nq;
                const double sgn_s = (sm & 1) ? -1.0 : 1.0;
                for (int t = -tk; t <= tk; ++t) {
                    const int tm = (t + np) % np;
                    const double sgn = sgn_s * ((tm & 1) ? -1.0 : 1.0);
                    H[static_cast<size_t>(sm) * np + tm] =
                        sgn * kernel(j - s, k - t, j + s, k + t);
                }
            }
            // sum_s H e^{+2pi i m s/nq} then sum_t e^{-2pi i r t/np}
            for (int t = 0; t < np; ++t) {
                for (int s = 0; s < nq; ++s) line[s] = H[static_cast<size_t>(s) * np + t];
                fft_pow2(std::span<cplx>(line.data(), nq), +1);
                for (int s = 0; s < nq; ++s) H[static_cast<size_t>(s) * np + t] = line[s];
            }
            for (int s = 0; s < nq; ++s) {
                fft_pow2(std::span<cplx>(H.data() + static_cast<size_t>(s) * np, np), -1);
            }
            for (int m = 0; m < nq; ++m)
                for (int r = 0; r < np; ++r) {
                    const cplx z = H[static_cast<size_t>(m) * np + r];
                    resid = std::max(resid, std::abs(z.imag()) * scale);
                    W.at(j, m, r, k) = z.real() * scale;
                }
        }
        imag_residues[j] = resid;
    });
    for (double r : imag_residues) W.max_imag_residue = std::max(W.max_imag_residue, r);
    return W;
}

}  // namespace detail

// Rank-1 fast path for pure states.
inline WignerField wigner_transform(const Amplitude& chi, WignerOptions opts = {}) {
    const PhaseGrid& g = chi.grid();
    const int nq = g.n_q, np = g.n_p;
    const auto& f = chi.values;
    auto kernel = [&](int ja, int ka, int jb, int kb) -> cplx {
        if (ja < 0 || ja >= nq || jb < 0 || jb >= nq || ka < 0 || ka >= np || kb < 0 ||
            kb >= np)
            return 0.0;
        return f(ja, ka) * std::conj(f(jb, kb));
    };
    return detail::wigner_transform_impl(g, kernel, opts);
}

inline WignerField wigner_transform(const StateOperator& rho, WignerOptions opts = {}) {
    const PhaseGrid& g = rho.grid;
    const int nq = g.n_q, np = g.n_p;
    auto kernel = [&](int ja, int ka, int jb, int kb) -> cplx {
        if (ja < 0 || ja >= nq || jb < 0 || jb >= nq || ka < 0 || ka >= np || kb < 0 ||
            kb >= np)
            return 0.0;
        return rho.m(rho.idx(ja, ka), rho.idx(jb, kb));
    };
    return detail::wigner_transform_impl(g, kernel, opts);
}

// Integrating out (q~, p~) recovers the Liouville distribution exactly.
inline LiouvilleDistribution qp_marginal(const WignerField& W) {
    RealField rho(W.grid);
    const double w = W.dpt() * W.dqt();
    for (int j = 0; j < W.nq(); ++j)
        for (int k = 0; k < W.np(); ++k) {
            double s = 0;
            for (int m = 0; m < W.nq(); ++m)
                for (int r = 0; r < W.np(); ++r) s += W.at(j, m, r, k);
            rho(j, k) = s * w;
        }
    return make_liouville(std::move(rho));
}

// 2D Wigner representation of a reduced state operator (already carries the
// 1/(2 pi hbar) quasi-probability normalization).
inline PartialWignerField partial_wigner(const ReducedStateOperator& red) {
    const int n = red.n();
    PartialWignerField out;
    out.which = red.which;
    out.n_x = n;
    out.n_c = n;
    out.x_lo = red.lo;
    out.x_d = red.d();
    const double L = red.hi - red.lo;
    out.c_d = red.hbar * std::numbers::pi / L;
    out.v.assign(static_cast<size_t>(n) * n, 0.0);
    const double scale = 2.0 * red.d() / (2.0 * std::numbers::pi * red.hbar);
    std::vector<cplx> H(n);
    for (int j = 0; j < n; ++j) {
        std::fill(H.begin(), H.end(), cplx(0, 0));
        const int sj = std::min(j, n - 1 - j);
        for (int s = -sj; s <= sj; ++s) {
            const int sm = (s + n) % n;
            const double sgn = (sm & 1) ? -1.0 : 1.0;
            H[sm] = sgn * red.m(j - s, j + s);
        }
        // which=1: e^{+i...} over offsets; which=2: conjugate phase.
        fft_pow2(H, red.which == 1 ? +1 : -1);
        for (int c = 0; c < n; ++c) {
            double val = H[c].real() * scale;
            if (red.which == 1)
                out.at(j, c) = val;  // (x=j, conj=c)
            else
                out.at(c, j) = val;  // (conj=c, x=j)
        }
    }
    return out;
}

// Marginal of the full W over one factor space; equals partial_wigner of the
// corresponding partial trace.
inline PartialWignerField space_marginal(const WignerField& W, int which) {
    PartialWignerField out;
    out.which = which;
    if (which == 1) {
        out.n_x = W.nq();
        out.n_c = W.nq();
        out.x_lo = W.grid.q_min;
        out.x_d = W.grid.dq();
        out.c_d = W.dpt();
        out.v.assign(static_cast<size_t>(W.nq()) * W.nq(), 0.0);
        const double w = W.dqt() * W.grid.dp();
        for (int j = 0; j < W.nq(); ++j)
            for (int m = 0; m < W.nq(); ++m) {
                double s = 0;
                for (int r = 0; r < W.np(); ++r)
                    for (int k = 0; k < W.np(); ++k) s += W.at(j, m, r, k);
                out.at(j, m) = s * w;
            }
    } else {
        out.n_x = W.np();
        out.n_c = W.np();
        out.x_lo = W.grid.p_min;
        out.x_d = W.grid.dp();
        out.c_d = W.dqt();
        out.v.assign(static_cast<size_t>(W.np()) * W.np(), 0.0);
        const double w = W.grid.dq() * W.dpt();
        for (int r = 0; r < W.np(); ++r)
            for (int k = 0; k < W.np(); ++k) {
                double s = 0;
                for (int j = 0; j < W.nq(); ++j)
                    for (int m = 0; m < W.nq(); ++m) s += W.at(j, m, r, k);
                out.at(r, k) = s * w;
            }
    }
    return out;
}

// Int (|W| - W)/2: zero iff W >= 0 almost everywhere.
inline double negativity_volume(const WignerField& W) {
    double s = 0;
    for (double x : W.v)
        if (x < 0) s -= x;
    return s * W.cell4();
}
inline double negativity_volume(const PartialWignerField& W) {
    double s = 0;
    for (double x : W.v)
        if (x < 0) s -= x;
    return s * W.cell();
}

// Int rho_W * R(q,p) over the doubled phase space, for a multiplicative symbol.
inline double integrate_against_qp_symbol(const WignerField& W, const RealField& rqp) {
    if (!(rqp.grid == W.grid)) throw error(errc::grid_mismatch, "wigner symbol grid");
    double s = 0;
    for (int j = 0; j < W.nq(); ++j)
        for (int m = 0; m < W.nq(); ++m)
            for (int r = 0; r < W.np(); ++r)
                for (int k = 0; k < W.np(); ++k) s += W.at(j, m, r, k) * rqp(j, k);
    return s * W.cell4();
}

inline double wigner_overlap(const WignerField& A, const WignerField& B) {
    if (!(A.grid == B.grid)) throw error(errc::grid_mismatch, "wigner overlap");
    double s = 0;
    for (size_t i = 0; i < A.v.size(); ++i) s += A.v[i] * B.v[i];
    return s * A.cell4();
}

// Both sides of (1/(2 pi hbar)^2) |<chi'|chi>|^2 = Int rho_W rho'_W.
struct OverlapIdentity {
    double lhs = 0, rhs = 0;
};

inline OverlapIdentity overlap_identity_check(const Amplitude& chi, const Amplitude& chi2,
                                              WignerOptions opts = {}) {
    const double hbar = chi.grid().hbar;
    OverlapIdentity out;
    double ov = std::abs(overlap(chi2, chi));
    out.lhs = ov * ov / std::pow(2.0 * std::numbers::pi * hbar, 2);
    out.rhs = wigner_overlap(wigner_transform(chi, opts), wigner_transform(chi2, opts));
    return out;
}

}  // namespace kvn
