#include <catch2/catch_amalgamated.hpp>

#include <kvn/randomfields.hpp>
#include <kvn/uncertainty.hpp>

#include "support/helpers.hpp"

using namespace kvn;
using kvn::testing::box16;

namespace {

OperatorHandle q_mult(const PhaseGrid& g) { return OperatorHandle(coordinate_field(g, Axis::q)); }
OperatorHandle ptilde(const PhaseGrid& g) {
    return OperatorHandle(make_tilde(PhaseSpaceFunction::coordinate(g, Axis::p)));
}

}  // namespace

TEST_CASE("standard deviations of Gaussian states") {
    PhaseGrid g = box16(128);
    Amplitude chi = gaussian_product(g, 0.0, 0.0, 1.5, 0.8);

    CHECK(std::abs(stddev(chi, q_mult(g)) - 1.5) < 1e-4);
    CHECK(std::abs(stddev(chi, ptilde(g)) - g.hbar / (2.0 * 1.5)) < 1e-4);
    CHECK(stddev(chi, OperatorHandle(RealField(g, 1.0))) < 1e-10);
}

TEST_CASE("amplitude-path and dense-trace stddev agree") {
    PhaseGrid g = make_grid(16, 16, -8, 8, -8, 8, 1.0);
    Amplitude chi = gaussian_product(g, 0.4, -0.3, 1.4, 1.1);
    StateOperator rho = pure_state_operator(chi);
    for (const OperatorHandle& h : {q_mult(g), ptilde(g)}) {
        double a = stddev(chi, h);
        double b = stddev(rho, h);
        CHECK(std::abs(a - b) < 1e-8);
    }
}

TEST_CASE("robertson relation: saturation, commuting pairs, generic bound") {
    PhaseGrid g = box16(128);
    for (double s : {0.5, 1.0, 2.0}) {
        PhaseGrid gs = make_grid(128, 128, -12, 12, -12, 12, 1.0);
        Amplitude chi = gaussian_product(gs, 0.0, 0.0, s, 0.7);
        UncertaintyReport r = robertson(chi, q_mult(gs), ptilde(gs));
        CHECK(r.bound == Catch::Approx(gs.hbar / 2).epsilon(1e-6));
        CHECK(std::abs(r.slack) / r.bound < 1e-3);  // Gaussians saturate
    }

    Amplitude chi = gaussian_product(g, 0.0, 0.0, 1.0, 1.0);
    UncertaintyReport commuting =
        robertson(chi, q_mult(g), OperatorHandle(coordinate_field(g, Axis::p)));
    CHECK(commuting.bound < 1e-12);
    CHECK(commuting.slack >= -1e-12);

    // generic pair: bound = (hbar/2)|<{u,v}>| for u multiplicative, v~ tilde
    RealField qw = periodic_coordinate(g, Axis::q);
    RealField u = hadamard(qw, qw) * 0.5;
    auto vpsf = PhaseSpaceFunction::tabulated(periodic_coordinate(g, Axis::p), "p");
    Amplitude loc = gaussian_product(g, 0.7, -0.4, 0.8, 0.8);
    UncertaintyReport r = robertson(loc, OperatorHandle(u), OperatorHandle(make_tilde(vpsf)));
    RealField br = real_part(poisson_bracket(to_complex(u), to_complex(vpsf.values)));
    double expected = 0.5 * g.hbar * std::abs(expectation(loc, OperatorHandle(br)));
    CHECK(std::abs(r.bound - expected) < 1e-7);
    CHECK(r.slack >= -1e-6);
}

TEST_CASE("uncertainty relation holds for randomized band-limited states") {
    PhaseGrid g = box16(64);
    for (uint64_t seed = 100; seed < 130; ++seed) {
        Amplitude chi = random_bandlimited_amplitude(g, seed);
        UncertaintyReport r = robertson(chi, q_mult(g), ptilde(g));
        CHECK(r.slack >= -1e-6);
        CHECK(r.sigma_a * r.sigma_b >= g.hbar / 2 - 1e-6);
    }
}

TEST_CASE("robertson report is translation invariant") {
    PhaseGrid g = box16(128);
    Amplitude chi = gaussian_product(g, 0.0, 0.0, 1.0, 0.8);
    UncertaintyReport before = robertson(chi, q_mult(g), ptilde(g));
    Amplitude moved = canonical_transform(chi, GeneratorSpec::p(), 8.0 * g.dq());
    UncertaintyReport after = robertson(moved, q_mult(g), ptilde(g));
    CHECK(std::abs(before.sigma_a - after.sigma_a) < 1e-8);
    CHECK(std::abs(before.sigma_b - after.sigma_b) < 1e-8);
    CHECK(std::abs(before.bound - after.bound) < 1e-8);
}

TEST_CASE("tilde-tilde bounds in the canonical representation") {
    PhaseGrid g = box16(128);
    Amplitude chi = gaussian_product(g, 0.5, 0.3, 0.8, 0.8);
    auto qw = PhaseSpaceFunction::tabulated(periodic_coordinate(g, Axis::q), "q");
    auto pw = PhaseSpaceFunction::tabulated(periodic_coordinate(g, Axis::p), "p");

    // {q,p} = 1 and tilde(1) = 0
    UncertaintyReport r1 = tilde_tilde_bound(chi, qw, pw);
    CHECK(r1.bound < 1e-8);
    CHECK(r1.slack >= -1e-8);

    UncertaintyReport r2 = tilde_tilde_bound(chi, qw, qw);
    CHECK(r2.bound < 1e-10);

    // u = q^2: bound = (hbar/2)|<tilde(2q)>| = hbar |<q~>| on the state
    auto q2 = PhaseSpaceFunction::tabulated(hadamard(qw.values, qw.values), "q2");
    UncertaintyReport r3 = tilde_tilde_bound(chi, q2, pw);
    TildeOperator qt = make_tilde(qw);
    double direct = g.hbar * std::abs(expectation(chi, OperatorHandle(std::move(qt))));
    CHECK(std::abs(r3.bound - direct) < 1e-8);
}

TEST_CASE("dynamical time against the Liouvillian") {
    PhaseGrid g = box16(128);
    HamiltonianSpec h = HamiltonianSpec::free_particle();

    Amplitude chi = gaussian_product(g, 0.0, 3.0, 1.0, 0.3);
    TauReport rep = tau_liouvillian_report(chi, h, 1.0);
    CHECK(rep.mask_mass >= 0.999);
    CHECK(std::abs(rep.robertson.bound - g.hbar / 2 * rep.mask_mass) < 1e-3);
    CHECK(rep.robertson.slack >= -1e-4);

    // broad in q: large sigma_tau, small sigma_H~, product still bounded
    Amplitude broad = gaussian_product(g, 0.0, 3.0, 2.0, 0.25);
    TauReport rb = tau_liouvillian_report(broad, h, 1.0);
    CHECK(rb.robertson.sigma_a > rep.robertson.sigma_a);
    CHECK(rb.robertson.sigma_a * rb.robertson.sigma_b >= g.hbar / 2 - 1e-4);

    // symmetric state leaks into the cut: mask violation
    Amplitude sym = gaussian_product(g, 0.0, 0.0, 1.0, 1.0);
    CHECK_THROWS_AS(tau_liouvillian_report(sym, h, 1.0), error);

    // defined only for the free particle
    CHECK_THROWS_AS(tau_liouvillian_report(chi, HamiltonianSpec::harmonic(), 1.0), error);
}
