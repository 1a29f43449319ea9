#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kvn/states.hpp"

namespace kvn {

// Separable Hamiltonian H = K(p) + U(q).
struct HamiltonianSpec {
    enum class Kind { free, harmonic, custom };
    Kind kind = Kind::free;
    double mass = 1.0;
    double omega = 1.0;
    // Tabulated K on the p axis and U on the q axis (kind == custom); both
    // must be smooth and periodic on their axes.
    std::vector<double> K, U;

    static HamiltonianSpec free_particle(double m = 1.0) {
        return HamiltonianSpec{Kind::free, m, 1.0, {}, {}};
    }
    static HamiltonianSpec harmonic(double m = 1.0, double w = 1.0) {
        return HamiltonianSpec{Kind::harmonic, m, w, {}, {}};
    }
    static HamiltonianSpec custom(std::vector<double> K_on_p, std::vector<double> U_on_q) {
        return HamiltonianSpec{Kind::custom, 1.0, 1.0, std::move(K_on_p), std::move(U_on_q)};
    }
    static HamiltonianSpec zero() { return custom({}, {}); }
};

namespace detail {

inline std::vector<double> axis_derivative(const std::vector<double>& table, double L) {
    const int n = static_cast<int>(table.size());
    std::vector<cplx> a(table.begin(), table.end());
    fft_pow2(a, -1);
    for (int j = 0; j < n; ++j) {
        int f = j < n / 2 ? j : j - n;
        if (j == n / 2) {
            a[j] = 0.0;
            continue;
        }
        a[j] *= cplx(0.0, 2.0 * std::numbers::pi * f / L);
    }
    fft_pow2(a, +1);
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = a[j].real() / n;
    return out;
}

}  // namespace detail

// K'(p) sampled on the p axis.
inline std::vector<double> kprime_on_axis(const HamiltonianSpec& h, const PhaseGrid& g) {
    std::vector<double> out(g.n_p, 0.0);
    switch (h.kind) {
        case HamiltonianSpec::Kind::free:
        case HamiltonianSpec::Kind::harmonic:
            for (int k = 0; k < g.n_p; ++k) out[k] = g.p(k) / h.mass;
            break;
        case HamiltonianSpec::Kind::custom:
            if (h.K.empty()) return out;
            if (static_cast<int>(h.K.size()) != g.n_p)
                throw error(errc::grid_mismatch, "K table length != n_p");
            out = detail::axis_derivative(h.K, g.Lp());
            break;
    }
    return out;
}

// U'(q) sampled on the q axis.
inline std::vector<double> uprime_on_axis(const HamiltonianSpec& h, const PhaseGrid& g) {
    std::vector<double> out(g.n_q, 0.0);
    switch (h.kind) {
        case HamiltonianSpec::Kind::free:
            break;
        case HamiltonianSpec::Kind::harmonic:
            for (int j = 0; j < g.n_q; ++j) out[j] = h.mass * h.omega * h.omega * g.q(j);
            break;
        case HamiltonianSpec::Kind::custom:
            if (h.U.empty()) return out;
            if (static_cast<int>(h.U.size()) != g.n_q)
                throw error(errc::grid_mismatch, "U table length != n_q");
            out = detail::axis_derivative(h.U, g.Lq());
            break;
    }
    return out;
}

// H sampled on the grid (raw coordinates; used multiplicatively).
inline RealField hamiltonian_field(const HamiltonianSpec& h, const PhaseGrid& g) {
    RealField f(g);
    switch (h.kind) {
        case HamiltonianSpec::Kind::free:
            for (int j = 0; j < g.n_q; ++j)
                for (int k = 0; k < g.n_p; ++k) f(j, k) = g.p(k) * g.p(k) / (2.0 * h.mass);
            break;
        case HamiltonianSpec::Kind::harmonic:
            for (int j = 0; j < g.n_q; ++j)
                for (int k = 0; k < g.n_p; ++k)
                    f(j, k) = g.p(k) * g.p(k) / (2.0 * h.mass) +
                              0.5 * h.mass * h.omega * h.omega * g.q(j) * g.q(j);
            break;
        case HamiltonianSpec::Kind::custom:
            for (int j = 0; j < g.n_q; ++j)
                for (int k = 0; k < g.n_p; ++k)
                    f(j, k) = (h.K.empty() ? 0.0 : h.K[k]) + (h.U.empty() ? 0.0 : h.U[j]);
            break;
    }
    return f;
}

// Tilde-Hamiltonian (Liouvillian) in the canonical representation, with the
// gradient fields taken from the separable structure.
inline TildeOperator liouvillian(const HamiltonianSpec& h, const PhaseGrid& g) {
    auto kp = kprime_on_axis(h, g);
    auto uq = uprime_on_axis(h, g);
    RealField gq(g), gp(g);
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) {
            gq(j, k) = uq[j];  // d_q H
            gp(j, k) = kp[k];  // d_p H
        }
    return TildeOperator(g, std::move(gq), std::move(gp), std::nullopt, "H~");
}

namespace detail {

// One Strang step of the transport e^{gamma {G,.}}: half q-advection by
// d_p G, full p-advection by -d_q G, half q-advection. Each sub-step is exact
// spectral advection. Throws when a sub-step displacement would exceed a
// quarter of the domain (anti-aliasing stability budget).
struct SplitAdvancer {
    PhaseGrid g;
    std::vector<double> kp;  // d_p G on the p axis
    std::vector<double> uq;  // d_q G on the q axis

    void check_budget(double dt) const {
        double mkp = 0, muq = 0;
        for (double x : kp) mkp = std::max(mkp, std::abs(x));
        for (double x : uq) muq = std::max(muq, std::abs(x));
        if (mkp * std::abs(dt) * 0.5 > 0.25 * g.Lq() ||
            muq * std::abs(dt) > 0.25 * g.Lp())
            throw error(errc::stability_budget_exceeded,
                        "per-step advection displacement exceeds a quarter box; "
                        "reduce dt or increase steps");
    }

    void half_drift(ComplexField& chi, double dt) const {
        fft_axis(chi, Axis::q, -1);
        for (int j = 0; j < g.n_q; ++j) {
            for (int k = 0; k < g.n_p; ++k) {
                double phase = -g.kq(j) * kp[k] * dt * 0.5;
                chi(j, k) *= cplx(std::cos(phase), std::sin(phase));
            }
        }
        fft_axis(chi, Axis::q, +1);
        for (auto& x : chi.v) x *= 1.0 / g.n_q;
    }

    void full_kick(ComplexField& chi, double dt) const {
        fft_axis(chi, Axis::p, -1);
        for (int j = 0; j < g.n_q; ++j) {
            for (int k = 0; k < g.n_p; ++k) {
                double phase = +g.kp(k) * uq[j] * dt;
                chi(j, k) *= cplx(std::cos(phase), std::sin(phase));
            }
        }
        fft_axis(chi, Axis::p, +1);
        for (auto& x : chi.v) x *= 1.0 / g.n_p;
    }

    void step(ComplexField& chi, double dt) const {
        half_drift(chi, dt);
        full_kick(chi, dt);
        half_drift(chi, dt);
    }
};

inline SplitAdvancer advancer_for(const HamiltonianSpec& h, const PhaseGrid& g) {
    return SplitAdvancer{g, kprime_on_axis(h, g), uprime_on_axis(h, g)};
}

}  // namespace detail

// Spectral split-operator integration of the KvN equation i hbar dchi/dt = H~ chi
// in the alpha = 0 gauge (pure transport along the Hamiltonian flow).
inline Amplitude kvn_evolve(const Amplitude& chi, const HamiltonianSpec& h, double dt,
                            int steps) {
    auto adv = detail::advancer_for(h, chi.grid());
    adv.check_budget(dt);
    Amplitude out = chi;
    for (int s = 0; s < steps; ++s) adv.step(out.values, dt);
    out.time = chi.time + dt * steps;
    return out;
}

// Generators accepted by canonical_transform: a coordinate or any separable
// phase-space function (K(p) + U(q) structure, which covers the paper's
// worked examples). Non-separable generators are applied only through
// TildeOperator, never exponentiated.
struct GeneratorSpec {
    enum class Kind { coordinate_q, coordinate_p, separable };
    Kind kind;
    HamiltonianSpec h;  // used when kind == separable

    static GeneratorSpec q() { return {Kind::coordinate_q, {}}; }
    static GeneratorSpec p() { return {Kind::coordinate_p, {}}; }
    static GeneratorSpec separable(HamiltonianSpec hs) {
        return {Kind::separable, std::move(hs)};
    }
};

// |chi> -> e^{-(i/hbar) gamma G~} |chi> with alpha_G = 0: unitary transport of
// chi along the Hamiltonian flow of G for parameter gamma.
inline Amplitude canonical_transform(const Amplitude& chi, const GeneratorSpec& gen,
                                     double gamma, int steps = 0) {
    const PhaseGrid& g = chi.grid();
    detail::SplitAdvancer adv;
    switch (gen.kind) {
        case GeneratorSpec::Kind::coordinate_p:
            adv = detail::SplitAdvancer{g, std::vector<double>(g.n_p, 1.0),
                                        std::vector<double>(g.n_q, 0.0)};
            break;
        case GeneratorSpec::Kind::coordinate_q:
            adv = detail::SplitAdvancer{g, std::vector<double>(g.n_p, 0.0),
                                        std::vector<double>(g.n_q, 1.0)};
            break;
        case GeneratorSpec::Kind::separable:
            adv = detail::advancer_for(gen.h, g);
            break;
    }
    if (gamma == 0.0) return chi;
    if (steps <= 0) {
        // Coordinate flows are exact in a single sub-step; separable flows
        // sub-step within the stability budget.
        if (gen.kind == GeneratorSpec::Kind::separable) {
            double mkp = 0, muq = 0;
            for (double x : adv.kp) mkp = std::max(mkp, std::abs(x));
            for (double x : adv.uq) muq = std::max(muq, std::abs(x));
            double lim = std::min(mkp > 0 ? 0.4 * g.Lq() / mkp : 1e300,
                                  muq > 0 ? 0.4 * g.Lp() / muq : 1e300);
            steps = std::max(1, static_cast<int>(std::ceil(std::abs(gamma) / std::max(lim, 1e-12))));
        } else {
            steps = 1;
        }
    }
    const double dt = gamma / steps;
    adv.check_budget(dt);
    Amplitude out = chi;
    for (int s = 0; s < steps; ++s) adv.step(out.values, dt);
    return out;
}

// Conjugation rho -> U rho U^dagger by the split-operator propagator.
inline StateOperator evolve_state_operator(const StateOperator& rho, const HamiltonianSpec& h,
                                           double dt, int steps) {
    const PhaseGrid& g = rho.grid;
    if (g.size() > kDenseOperatorCap)
        throw error(errc::memory_guard, "evolve_state_operator needs dense N <= cap");
    auto adv = detail::advancer_for(h, g);
    adv.check_budget(dt);
    const int n = g.size();
    StateOperator out = rho;
    ComplexField buf(g);
    for (int s = 0; s < steps; ++s) {
        // columns: rho <- U rho
        for (int b = 0; b < n; ++b) {
            for (int a = 0; a < n; ++a) buf.v[a] = out.m(a, b);
            adv.step(buf, dt);
            for (int a = 0; a < n; ++a) out.m(a, b) = buf.v[a];
        }
        // rows: rho <- rho U^dagger  (apply conj(U) to conjugated rows)
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) buf.v[b] = std::conj(out.m(a, b));
            adv.step(buf, dt);
            for (int b = 0; b < n; ++b) out.m(a, b) = std::conj(buf.v[b]);
        }
    }
    out.time = rho.time + dt * steps;
    return out;
}

}  // namespace kvn
