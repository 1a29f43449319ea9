#pragma once

#include <atomic>
#include <cmath>
#include <vector>

#include "kvn/parallel.hpp"
#include "kvn/propagator.hpp"

namespace kvn {

// Independent Liouville oracle: backward 4th-order symplectic trajectories
// from every grid node, then bicubic (Catmull-Rom) lookup into the initial
// density. Shares no discretization machinery with the spectral propagator.

struct TrajectoryOptions {
    double dt = 0.0;            // 0: auto, min(dt_hint, T_char/200)
    double dt_hint = 0.0;       // caller's evolution step, if any
    double escape_factor = 2.0; // abort when |displacement| > factor * box length
    bool check_mass = true;
};

namespace detail {

// Periodic Catmull-Rom in 1D: weights for fractional position f in [0,1).
inline void cr_weights(double f, double w[4]) {
    w[0] = -0.5 * f * (1 - f) * (1 - f);
    w[1] = 1 + f * f * (1.5 * f - 2.5);
    w[2] = 0.5 * f * (1 + 4 * f - 3 * f * f);
    w[3] = 0.5 * f * f * (f - 1);
}

inline double interp_bicubic_periodic(const RealField& rho, double q, double p) {
    const PhaseGrid& g = rho.grid;
    double gi = (q - g.q_min) / g.dq();
    double gj = (p - g.p_min) / g.dp();
    double fi = gi - std::floor(gi), fj = gj - std::floor(gj);
    int i0 = static_cast<int>(std::floor(gi)), j0 = static_cast<int>(std::floor(gj));
    double wi[4], wj[4];
    cr_weights(fi, wi);
    cr_weights(fj, wj);
    double acc = 0;
    for (int a = 0; a < 4; ++a) {
        int ia = ((i0 + a - 1) % g.n_q + g.n_q) % g.n_q;
        double row = 0;
        for (int b = 0; b < 4; ++b) {
            int jb = ((j0 + b - 1) % g.n_p + g.n_p) % g.n_p;
            row += wj[b] * rho(ia, jb);
        }
        acc += wi[a] * row;
    }
    return acc;
}

// Periodic cubic interpolation of a 1D table (for custom K', U' off-grid).
inline double interp1_periodic(const std::vector<double>& t, double lo, double L, double x) {
    const int n = static_cast<int>(t.size());
    double gi = (x - lo) / (L / n);
    double f = gi - std::floor(gi);
    int i0 = static_cast<int>(std::floor(gi));
    double w[4];
    cr_weights(f, w);
    double acc = 0;
    for (int a = 0; a < 4; ++a) acc += w[a] * t[((i0 + a - 1) % n + n) % n];
    return acc;
}

struct FlowFields {
    const HamiltonianSpec* h;
    const PhaseGrid* g;
    std::vector<double> kp_table, uq_table;  // for custom kind

    double kprime(double p) const {
        switch (h->kind) {
            case HamiltonianSpec::Kind::free:
            case HamiltonianSpec::Kind::harmonic:
                return p / h->mass;
            case HamiltonianSpec::Kind::custom:
                return kp_table.empty() ? 0.0
                                        : interp1_periodic(kp_table, g->p_min, g->Lp(), p);
        }
        return 0.0;
    }
    double uprime(double q) const {
        switch (h->kind) {
            case HamiltonianSpec::Kind::free:
                return 0.0;
            case HamiltonianSpec::Kind::harmonic:
                return h->mass * h->omega * h->omega * q;
            case HamiltonianSpec::Kind::custom:
                return uq_table.empty() ? 0.0
                                        : interp1_periodic(uq_table, g->q_min, g->Lq(), q);
        }
        return 0.0;
    }
};

}  // namespace detail

inline double characteristic_time(const HamiltonianSpec& h, const PhaseGrid& g) {
    if (h.kind == HamiltonianSpec::Kind::harmonic) return 2.0 * std::numbers::pi / h.omega;
    auto kp = kprime_on_axis(h, g);
    auto uq = uprime_on_axis(h, g);
    double mkp = 0, muq = 0;
    for (double x : kp) mkp = std::max(mkp, std::abs(x));
    for (double x : uq) muq = std::max(muq, std::abs(x));
    double t = 1e300;
    if (mkp > 0) t = std::min(t, g.Lq() / mkp);
    if (muq > 0) t = std::min(t, g.Lp() / muq);
    return t < 1e300 ? t : 1.0;
}

inline LiouvilleDistribution characteristics_evolve(const LiouvilleDistribution& rho0,
                                                    const HamiltonianSpec& h, double t,
                                                    TrajectoryOptions opts = {}) {
    const PhaseGrid& g = rho0.values.grid;
    if (t == 0.0) return rho0;

    detail::FlowFields flow{&h, &g, {}, {}};
    if (h.kind == HamiltonianSpec::Kind::custom) {
        flow.kp_table = kprime_on_axis(h, g);
        flow.uq_table = uprime_on_axis(h, g);
    }

    double dt_traj = opts.dt;
    if (dt_traj <= 0.0) {
        dt_traj = characteristic_time(h, g) / 200.0;
        if (opts.dt_hint > 0.0) dt_traj = std::min(dt_traj, opts.dt_hint);
    }
    const int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt_traj)));
    const double hstep = -t / nsteps;  // backward

    // Yoshida 4th-order composition of velocity-Verlet sub-steps.
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    const double w0 = 1.0 - 2.0 * w1;
    const double comp[3] = {w1, w0, w1};

    RealField out(g);
    std::atomic<bool> escaped{false};
    parallel_for(g.n_q, [&](int j) {
        for (int k = 0; k < g.n_p; ++k) {
            double Q = g.q(j), P = g.p(k);
            for (int s = 0; s < nsteps; ++s) {
                for (double w : comp) {
                    const double hh = w * hstep;
                    Q += 0.5 * hh * flow.kprime(P);
                    P -= hh * flow.uprime(Q);
                    Q += 0.5 * hh * flow.kprime(P);
                }
            }
            if (std::abs(Q - g.q(j)) > opts.escape_factor * g.Lq() ||
                std::abs(P - g.p(k)) > opts.escape_factor * g.Lp())
                escaped = true;
            out(j, k) = detail::interp_bicubic_periodic(rho0.values, Q, P);
        }
    });
    if (escaped)
        throw error(errc::trajectory_escape,
                    "backward flow left the box by more than escape_factor periods");

    if (opts.check_mass) {
        double mass = integrate(out);
        if (std::abs(mass - 1.0) > 1e-6)
            throw error(errc::mass_conservation,
                        "characteristics mass drifted: " + std::to_string(mass));
    }
    // Cubic interpolation ripples slightly negative near steep tails; that is
    // part of the oracle's O(h^3) error and is kept (distances absorb it).
    // Only rounding-level negatives are clamped; anything deeper than a few
    // percent of the peak means the lookup went wrong.
    const double guard = 0.02 * std::max(1e-300, max_abs(out));
    for (auto& x : out.v) {
        if (x < 0.0) {
            if (x < -guard) throw error(errc::mass_conservation, "interpolation undershoot");
            if (x > -1e-12) x = 0.0;
        }
    }
    return LiouvilleDistribution{std::move(out), rho0.time + t};
}

}  // namespace kvn
