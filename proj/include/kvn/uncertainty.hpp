#pragma once

#include <functional>

#include "kvn/propagator.hpp"

namespace kvn {

struct UncertaintyReport {
    double sigma_a = 0;
    double sigma_b = 0;
    double bound = 0;  // (1/2)|<[A,B]>|
    double slack = 0;  // sigma_a*sigma_b - bound
};

namespace detail {

// Relative Hermiticity tolerance on expectation values; beyond it the
// standard deviation is reported non-finite rather than trusted.
inline constexpr double kHermitianTol = 1e-6;

inline double checked_real(cplx z) {
    if (std::abs(z.imag()) > kHermitianTol * (1.0 + std::abs(z)))
        return std::numeric_limits<double>::quiet_NaN();
    return z.real();
}

}  // namespace detail

// sqrt(<(A - <A>)^2>) via the apply-once route ||(A - <A>) chi||; the square
// of a tilde-variable never acts as an operator here.
inline double stddev(const Amplitude& chi, const OperatorHandle& a) {
    double mean = detail::checked_real(expectation(chi, a));
    if (!std::isfinite(mean)) return mean;
    ComplexField res = a.apply(chi.values);
    for (size_t i = 0; i < res.v.size(); ++i) res.v[i] -= mean * chi.values.v[i];
    return std::sqrt(norm2(res));
}

// Trace route for dense operators: Tr(rho (A - <A>)^2) by applying the
// centered operator twice to the kernel columns.
inline double stddev(const StateOperator& rho, const OperatorHandle& a) {
    double mean = detail::checked_real(expectation(rho, a));
    if (!std::isfinite(mean)) return mean;
    const int n = rho.dim();
    ComplexField col(rho.grid);
    cplx acc = 0;
    for (int b = 0; b < n; ++b) {
        for (int i = 0; i < n; ++i) col.v[i] = rho.m(i, b);
        ComplexField once = a.apply(col);
        for (int i = 0; i < n; ++i) once.v[i] -= mean * col.v[i];
        ComplexField twice = a.apply(once);
        for (int i = 0; i < n; ++i) twice.v[i] -= mean * once.v[i];
        acc += twice.v[b];
    }
    double var = detail::checked_real(acc * rho.cell());
    return var < 0 && var > -1e-12 ? 0.0 : std::sqrt(var);
}

inline UncertaintyReport robertson(const Amplitude& chi, const OperatorHandle& a,
                                   const OperatorHandle& b) {
    UncertaintyReport r;
    r.sigma_a = stddev(chi, a);
    r.sigma_b = stddev(chi, b);
    cplx comm = inner(chi.values, commutator_apply(a, b, chi.values));
    r.bound = 0.5 * std::abs(comm);
    r.slack = r.sigma_a * r.sigma_b - r.bound;
    return r;
}

inline UncertaintyReport robertson(const StateOperator& rho, const OperatorHandle& a,
                                   const OperatorHandle& b) {
    UncertaintyReport r;
    r.sigma_a = stddev(rho, a);
    r.sigma_b = stddev(rho, b);
    const int n = rho.dim();
    ComplexField col(rho.grid);
    cplx acc = 0;
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) col.v[i] = rho.m(i, c);
        acc += commutator_apply(a, b, col).v[c];
    }
    r.bound = 0.5 * std::abs(acc * rho.cell());
    r.slack = r.sigma_a * r.sigma_b - r.bound;
    return r;
}

// sigma_u~ sigma_v~ >= (hbar/2) |<tilde({u,v})>| in the canonical representation.
inline UncertaintyReport tilde_tilde_bound(const Amplitude& chi, const PhaseSpaceFunction& u,
                                           const PhaseSpaceFunction& v) {
    const PhaseGrid& g = chi.grid();
    UncertaintyReport r;
    r.sigma_a = stddev(chi, OperatorHandle(make_tilde(u)));
    r.sigma_b = stddev(chi, OperatorHandle(make_tilde(v)));
    auto br = PhaseSpaceFunction::tabulated(detail::psf_bracket_values(u, v), "bracket");
    cplx mean = expectation(chi, OperatorHandle(make_tilde(br)));
    r.bound = 0.5 * g.hbar * std::abs(mean);
    r.slack = r.sigma_a * r.sigma_b - r.bound;
    return r;
}

// Dynamical-time report for the free particle: tau = q/p on the half-plane
// mask |p| > p_cut, paired with the Liouvillian. {tau, H} = 1 on the mask, so
// the Robertson bound is hbar/2 times the state's mass in the mask.
struct TauReport {
    UncertaintyReport robertson;
    double mask_mass = 0;
};

inline TauReport tau_liouvillian_report(const Amplitude& chi, const HamiltonianSpec& h,
                                        double p_cut = 1.0) {
    if (h.kind != HamiltonianSpec::Kind::free)
        throw error(errc::unsupported, "tau report is defined for the free particle only");
    const PhaseGrid& g = chi.grid();
    RealField mask(g);
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) mask(j, k) = std::abs(g.p(k)) > p_cut ? 1.0 : 0.0;
    double mass = integrate(hadamard(modulus_squared(chi).values, mask));
    if (mass < 0.999)
        throw error(errc::mask_violation,
                    "state mass below p_cut mask: " + std::to_string(mass));
    RealField qw = periodic_coordinate(g, Axis::q);
    RealField tau(g);
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k)
            tau(j, k) = mask(j, k) != 0.0 ? h.mass * qw(j, k) / g.p(k) : 0.0;
    TauReport out;
    out.mask_mass = mass;
    out.robertson = robertson(chi, OperatorHandle(std::move(tau)),
                              OperatorHandle(liouvillian(h, g)));
    return out;
}

}  // namespace kvn
