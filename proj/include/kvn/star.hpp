#pragma once

#include <array>
#include <map>

#include "kvn/propagator.hpp"
#include "kvn/wigner.hpp"

namespace kvn {

// Polynomial on the doubled phase space, variables ordered (q, p~, q~, p).
struct Poly4 {
    std::map<std::array<int, 4>, cplx> terms;

    static Poly4 constant(cplx c) {
        Poly4 p;
        if (c != 0.0) p.terms[{0, 0, 0, 0}] = c;
        return p;
    }
    static Poly4 var(int axis) {
        Poly4 p;
        std::array<int, 4> e{0, 0, 0, 0};
        e[axis] = 1;
        p.terms[e] = 1.0;
        return p;
    }

    Poly4& prune() {
        for (auto it = terms.begin(); it != terms.end();)
            it = std::abs(it->second) == 0.0 ? terms.erase(it) : std::next(it);
        return *this;
    }
    bool empty() const { return terms.empty(); }
    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms) d = std::max(d, e[0] + e[1] + e[2] + e[3]);
        return d;
    }

    Poly4 operator+(const Poly4& o) const {
        Poly4 r = *this;
        for (const auto& [e, c] : o.terms) r.terms[e] += c;
        return r.prune();
    }
    Poly4 operator-(const Poly4& o) const {
        Poly4 r = *this;
        for (const auto& [e, c] : o.terms) r.terms[e] -= c;
        return r.prune();
    }
    Poly4 operator*(const Poly4& o) const {
        Poly4 r;
        for (const auto& [ea, ca] : terms)
            for (const auto& [eb, cb] : o.terms) {
                std::array<int, 4> e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2],
                                     ea[3] + eb[3]};
                r.terms[e] += ca * cb;
            }
        return r.prune();
    }
    Poly4 scaled(cplx s) const {
        Poly4 r = *this;
        for (auto& [e, c] : r.terms) c *= s;
        return r.prune();
    }
    Poly4 derivative(int axis) const {
        Poly4 r;
        for (const auto& [e, c] : terms) {
            if (e[axis] == 0) continue;
            std::array<int, 4> d = e;
            d[axis] -= 1;
            r.terms[d] += c * static_cast<double>(e[axis]);
        }
        return r;
    }
    cplx eval(double q, double pt, double qt, double p) const {
        cplx s = 0;
        for (const auto& [e, c] : terms)
            s += c * std::pow(q, e[0]) * std::pow(pt, e[1]) * std::pow(qt, e[2]) *
                 std::pow(p, e[3]);
        return s;
    }
};

namespace detail {

// Bidirectional derivative pairs of the doubled star kernel:
//   d_q (x) d_p~  -  d_p~ (x) d_q  +  d_q~ (x) d_p  -  d_p (x) d_q~
inline constexpr int kStarPairsLeft[4] = {0, 1, 2, 3};   // acts on f
inline constexpr int kStarPairsRight[4] = {1, 0, 3, 2};  // acts on g
inline constexpr double kStarPairSign[4] = {+1.0, -1.0, +1.0, -1.0};

inline double factorial(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

template <typename Visit>
void for_each_multiindex(int k, Visit&& visit) {
    for (int k1 = 0; k1 <= k; ++k1)
        for (int k2 = 0; k2 <= k - k1; ++k2)
            for (int k3 = 0; k3 <= k - k1 - k2; ++k3) visit(k1, k2, k3, k - k1 - k2 - k3);
}

}  // namespace detail

// Truncated Moyal star product; exact when order >= combined degree.
inline Poly4 star_product(const Poly4& f, const Poly4& g, int order, double hbar) {
    Poly4 acc;
    for (int k = 0; k <= order; ++k) {
        const cplx pref = std::pow(cplx(0.0, hbar / 2.0), k) / detail::factorial(k);
        detail::for_each_multiindex(k, [&](int k1, int k2, int k3, int k4) {
            const int ks[4] = {k1, k2, k3, k4};
            double mult = detail::factorial(k);
            double sign = 1.0;
            for (int i = 0; i < 4; ++i) {
                mult /= detail::factorial(ks[i]);
                if (ks[i] % 2 == 1 && detail::kStarPairSign[i] < 0) sign = -sign;
            }
            Poly4 fd = f, gd = g;
            for (int i = 0; i < 4; ++i)
                for (int rep = 0; rep < ks[i]; ++rep) {
                    fd = fd.derivative(detail::kStarPairsLeft[i]);
                    gd = gd.derivative(detail::kStarPairsRight[i]);
                }
            if (fd.empty() || gd.empty()) return;
            acc = acc + (fd * gd).scaled(pref * mult * sign);
        });
    }
    return acc;
}

// Wigner symbol of the tilde-Hamiltonian H~ = p~ K'(p) + U'(q) q~ for the
// polynomial kinds.
inline Poly4 htilde_symbol(const HamiltonianSpec& h) {
    const Poly4 q = Poly4::var(0), pt = Poly4::var(1), qt = Poly4::var(2), p = Poly4::var(3);
    switch (h.kind) {
        case HamiltonianSpec::Kind::free:
            return (pt * p).scaled(1.0 / h.mass);
        case HamiltonianSpec::Kind::harmonic:
            return (pt * p).scaled(1.0 / h.mass) +
                   (q * qt).scaled(h.mass * h.omega * h.omega);
        case HamiltonianSpec::Kind::custom:
            if (h.K.empty() && h.U.empty()) return {};  // H = 0
            throw error(errc::unsupported, "polynomial symbol needs free or harmonic H");
    }
    return {};
}

// ---- star-commutator action on a sampled Wigner field ----------------------

// Spectral derivative of the 4D field along one axis (all axes periodic).
inline WignerField wigner_axis_derivative(const WignerField& W, int axis, int order = 1) {
    WignerField out = W;
    const int dims[4] = {W.nq(), W.nq(), W.np(), W.np()};
    const double steps[4] = {W.grid.dq(), W.dpt(), W.dqt(), W.grid.dp()};
    const int n = dims[axis];
    const double period = n * steps[axis];
    size_t stride = 1;
    for (int a = axis + 1; a < 4; ++a) stride *= dims[a];
    size_t outer = 1;
    for (int a = 0; a < axis; ++a) outer *= dims[a];
    const size_t block = stride * n;

    std::vector<cplx> mult(n);
    for (int f = 0; f < n; ++f) {
        int fr = f < n / 2 ? f : f - n;
        cplx ik(0.0, 2.0 * std::numbers::pi * fr / period);
        mult[f] = std::pow(ik, order);
        if (order % 2 == 1 && f == n / 2) mult[f] = 0.0;
    }
    parallel_for(static_cast<int>(outer), [&](int o) {
        std::vector<cplx> line(n);
        for (size_t s = 0; s < stride; ++s) {
            const size_t base = static_cast<size_t>(o) * block + s;
            for (int i = 0; i < n; ++i) line[i] = out.v[base + i * stride];
            fft_pow2(line, -1);
            for (int i = 0; i < n; ++i) line[i] *= mult[i];
            fft_pow2(line, +1);
            for (int i = 0; i < n; ++i) out.v[base + i * stride] = line[i].real() / n;
        }
    });
    return out;
}

// Evaluate a real polynomial symbol on the doubled lattice.
inline WignerField evaluate_symbol(const Poly4& g, const WignerField& like) {
    WignerField out = like;
    std::fill(out.v.begin(), out.v.end(), 0.0);
    for (const auto& [e, c] : g.terms) {
        if (std::abs(c.imag()) > 1e-14 * (1.0 + std::abs(c)))
            throw error(errc::unsupported, "symbol must be real");
        std::vector<double> aq(like.nq()), apt(like.nq()), aqt(like.np()), ap(like.np());
        for (int j = 0; j < like.nq(); ++j) aq[j] = std::pow(like.grid.q(j), e[0]);
        for (int m = 0; m < like.nq(); ++m) apt[m] = std::pow(like.ptilde(m), e[1]);
        for (int r = 0; r < like.np(); ++r) aqt[r] = std::pow(like.qtilde(r), e[2]);
        for (int k = 0; k < like.np(); ++k) ap[k] = std::pow(like.grid.p(k), e[3]);
        const double cr = c.real();
        size_t i = 0;
        for (int j = 0; j < like.nq(); ++j)
            for (int m = 0; m < like.nq(); ++m)
                for (int r = 0; r < like.np(); ++r) {
                    const double pre = cr * aq[j] * apt[m] * aqt[r];
                    for (int k = 0; k < like.np(); ++k) out.v[i++] += pre * ap[k];
                }
    }
    return out;
}

// (1/i hbar)(W * g - g * W) for a real polynomial symbol g: the odd-k terms of
// the Moyal series, evaluated with spectral derivatives of W and symbolic
// derivatives of g. Exact (series terminates) once order covers deg(g).
inline WignerField star_commutator_field(const WignerField& W, const Poly4& g, int order) {
    const double hbar = W.grid.hbar;
    WignerField acc = W;
    std::fill(acc.v.begin(), acc.v.end(), 0.0);
    for (int k = 1; k <= order; k += 2) {
        const double parity = ((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
        const double ck =
            parity * std::pow(hbar, k - 1) * std::pow(2.0, 1 - k) / detail::factorial(k);
        detail::for_each_multiindex(k, [&](int k1, int k2, int k3, int k4) {
            const int ks[4] = {k1, k2, k3, k4};
            Poly4 gd = g;
            for (int i = 0; i < 4 && !gd.empty(); ++i)
                for (int rep = 0; rep < ks[i] && !gd.empty(); ++rep)
                    gd = gd.derivative(detail::kStarPairsRight[i]);
            if (gd.empty()) return;
            double mult = detail::factorial(k);
            double sign = 1.0;
            for (int i = 0; i < 4; ++i) {
                mult /= detail::factorial(ks[i]);
                if (ks[i] % 2 == 1 && detail::kStarPairSign[i] < 0) sign = -sign;
            }
            WignerField fd = W;
            const int axis_order[4] = {k1, k2, k3, k4};
            for (int i = 0; i < 4; ++i)
                if (axis_order[i] > 0)
                    fd = wigner_axis_derivative(fd, detail::kStarPairsLeft[i], axis_order[i]);
            WignerField ge = evaluate_symbol(gd, W);
            for (size_t i = 0; i < acc.v.size(); ++i)
                acc.v[i] += ck * mult * sign * fd.v[i] * ge.v[i];
        });
    }
    return acc;
}

// Max-norm (over the 4D trust region) of
//   d_t rho_W + (1/i hbar)(rho_W * H~_W - H~_W * rho_W)
// with d_t estimated by central difference of two one-step KvN evolutions.
inline double moyal_residual(const Amplitude& chi, const HamiltonianSpec& h, double dt,
                             int order = 0, WignerOptions opts = {}) {
    Poly4 sym = htilde_symbol(h);
    if (order <= 0) order = std::max(1, sym.degree() - 1);
    WignerField W0 = wigner_transform(chi, opts);
    WignerField Wp = wigner_transform(kvn_evolve(chi, h, dt, 1), opts);
    WignerField Wm = wigner_transform(kvn_evolve(chi, h, -dt, 1), opts);
    WignerField comm = star_commutator_field(W0, sym, order);
    const int nq = W0.nq(), np = W0.np();
    double res = 0;
    for (int j = nq / 4; j < 3 * nq / 4; ++j)
        for (int m = nq / 4; m < 3 * nq / 4; ++m)
            for (int r = np / 4; r < 3 * np / 4; ++r)
                for (int k = np / 4; k < 3 * np / 4; ++k) {
                    const size_t i = W0.idx(j, m, r, k);
                    res = std::max(res,
                                   std::abs((Wp.v[i] - Wm.v[i]) / (2.0 * dt) + comm.v[i]));
                }
    return res;
}

}  // namespace kvn
