#include <catch2/catch_amalgamated.hpp>

#include <kvn/randomfields.hpp>
#include <kvn/wigner.hpp>

#include "support/helpers.hpp"

using namespace kvn;
using kvn::testing::linf;

namespace {

PhaseGrid wg(int n = 32) { return make_grid(n, n, -8, 8, -8, 8, 1.0); }

// Direct-summation oracle for the 1D Wigner transform of a reduced operator:
// no FFT, same discretization, independent code path.
PartialWignerField brute_partial_wigner(const ReducedStateOperator& red) {
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
    for (int j = 0; j < n; ++j) {
        const int sj = std::min(j, n - 1 - j);
        for (int c = 0; c < n; ++c) {
            const double conj_coord = (c - n / 2) * out.c_d;
            cplx acc = 0;
            for (int s = -sj; s <= sj; ++s) {
                const double phase = 2.0 * conj_coord * s * red.d() / red.hbar;
                const cplx ph = red.which == 1 ? std::polar(1.0, phase)
                                               : std::polar(1.0, -phase);
                acc += red.m(j - s, j + s) * ph;
            }
            if (red.which == 1)
                out.at(j, c) = acc.real() * scale;
            else
                out.at(c, j) = acc.real() * scale;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("wigner transform of a Gaussian product state") {
    PhaseGrid g = wg();
    Amplitude chi = gaussian_product(g, 0.5, -0.3, 0.7, 0.7);
    WignerField W = wigner_transform(chi);

    CHECK(W.max_imag_residue < 1e-10);
    CHECK(std::abs(W.integral() - 1.0) < 1e-6);
    CHECK(W.min() >= -1e-9);  // Gaussian Wigner fields are nonnegative
    CHECK(negativity_volume(W) < 1e-8);

    // marginal identity, pointwise
    LiouvilleDistribution marg = qp_marginal(W);
    CHECK(linf(marg.values, modulus_squared(chi).values) < 1e-8);
    CHECK(std::abs(integrate(marg.values) - 1.0) < 1e-8);

    // purity peak: Int W^2 = 1/(2 pi hbar)^2 for pure states
    const double peak = 1.0 / std::pow(2.0 * std::numbers::pi * g.hbar, 2);
    CHECK(std::abs(wigner_overlap(W, W) - peak) < 1e-4 * peak);

    // dense path agrees with the rank-1 path
    WignerField Wd = wigner_transform(pure_state_operator(chi));
    double dmax = 0;
    for (size_t i = 0; i < W.v.size(); ++i) dmax = std::max(dmax, std::abs(W.v[i] - Wd.v[i]));
    CHECK(dmax < 1e-12);
}

TEST_CASE("wigner marginal identity for assorted pure states") {
    PhaseGrid g = wg();
    std::vector<Amplitude> states;
    states.push_back(gaussian_product(g, 0.0, 0.0, 0.7, 0.7));
    states.push_back(gaussian_product(g, 1.0, -0.8, 0.6, 0.75));
    states.push_back(cat_state(g, Axis::q, 4.2, 0.7, 0.7));
    {
        ComplexField f = gaussian_product(g, 0.0, 0.0, 0.8, 0.7).values;
        for (int j = 0; j < g.n_q; ++j)
            for (int k = 0; k < g.n_p; ++k) f(j, k) *= std::exp(cplx(0, 0.9 * g.q(j)));
        states.push_back(normalize(std::move(f)));
    }
    for (const auto& chi : states) {
        WignerField W = wigner_transform(chi);
        CHECK(linf(qp_marginal(W).values, modulus_squared(chi).values) < 1e-8);
        CHECK(std::abs(W.integral() - 1.0) < 1e-6);
        double negmarg = 0;
        for (double x : qp_marginal(W).values.v) negmarg = std::min(negmarg, x);
        CHECK(negmarg >= 0.0);  // the marginal is a true probability density
    }
}

TEST_CASE("expectation identity through the Wigner representation") {
    PhaseGrid g = wg();
    Amplitude chi = gaussian_product(g, 0.8, -0.5, 0.7, 0.65);
    WignerField W = wigner_transform(chi);
    RealField rho = modulus_squared(chi).values;

    auto check_symbol = [&](const RealField& r) {
        const double via_liouville = integrate(hadamard(rho, r));
        const double via_wigner = integrate_against_qp_symbol(W, r);
        CHECK(std::abs(via_liouville - via_wigner) < 1e-6);
    };
    check_symbol(sample(g, [](double q, double) { return q; }));
    check_symbol(sample(g, [](double, double p) { return p; }));
    check_symbol(sample(g, [](double q, double) { return q * q; }));
    check_symbol(sample(g, [](double q, double p) { return q * p; }));
}

TEST_CASE("overlap identity, including an orthogonal pair") {
    PhaseGrid g = wg();
    Amplitude a = gaussian_product(g, 0.0, 0.0, 0.7, 0.7);
    Amplitude b = gaussian_product(g, 1.2, 0.4, 0.8, 0.6);
    OverlapIdentity id = overlap_identity_check(a, b);
    CHECK(std::abs(id.lhs - id.rhs) < 1e-6);
    CHECK(id.lhs > 1e-4);  // genuinely overlapping pair

    // odd x even: orthogonal, so the rhs must integrate to ~0, which forces
    // negativity somewhere in one of the fields
    ComplexField oddf = a.values;
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) oddf(j, k) *= g.q(j);
    Amplitude odd = normalize(std::move(oddf));
    OverlapIdentity oid = overlap_identity_check(odd, a);
    CHECK(std::abs(oid.lhs) < 1e-12);
    CHECK(std::abs(oid.rhs) < 1e-8);
    CHECK(negativity_volume(wigner_transform(odd)) > 1e-3);

    // identical states: both sides equal the purity peak
    OverlapIdentity sid = overlap_identity_check(a, a);
    const double peak = 1.0 / std::pow(2.0 * std::numbers::pi * g.hbar, 2);
    CHECK(std::abs(sid.lhs - peak) < 1e-6);
    CHECK(std::abs(sid.rhs - peak) < 1e-6);
}

TEST_CASE("partial Wigner: Gaussians, cat fringes, brute-force oracle") {
    PhaseGrid g = wg();

    // Gaussian marginal: nonnegative 2D Gaussian
    ReducedStateOperator gred = pure_reduced(gaussian_marginal(g, 1, 0.0, 0.7));
    gred.hbar = g.hbar;
    PartialWignerField pw = partial_wigner(gred);
    CHECK(std::abs(pw.integral() - 1.0) < 1e-6);
    CHECK(pw.min() > -1e-9);
    CHECK(negativity_volume(pw) < 1e-8);

    // cat state: central interference fringe with a deep minimum
    Amplitude cat = cat_state(g, Axis::q, 4.2, 0.7, 0.7);
    ReducedStateOperator red = partial_trace(pure_state_operator(cat), 1);
    PartialWignerField cw = partial_wigner(red);
    CHECK(cw.min() <= -0.1 * cw.max());
    CHECK(negativity_volume(cw) > 0.05);
    CHECK(std::abs(cw.integral() - 1.0) < 1e-6);

    // against the direct-summation oracle
    PartialWignerField brute = brute_partial_wigner(red);
    double dmax = 0;
    for (size_t i = 0; i < cw.v.size(); ++i)
        dmax = std::max(dmax, std::abs(cw.v[i] - brute.v[i]));
    CHECK(dmax < 1e-10);

    // mixing cannot create negativity
    StateOperator mix = convex_mix({{0.5, pure_state_operator(gaussian_product(g, 1.0, 0.0, 0.7, 0.7))},
                                    {0.5, pure_state_operator(gaussian_product(g, -1.0, 0.0, 0.7, 0.7))}});
    PartialWignerField mixed = partial_wigner(partial_trace(mix, 1));
    CHECK(negativity_volume(mixed) < 1e-8);
}

TEST_CASE("marginal consistency between the 4D field and partial traces") {
    PhaseGrid g = wg();
    Amplitude chi = cat_state(g, Axis::q, 4.2, 0.7, 0.7);
    StateOperator rho = pure_state_operator(chi);
    WignerField W = wigner_transform(chi);

    for (int which : {1, 2}) {
        PartialWignerField from_full = space_marginal(W, which);
        PartialWignerField from_reduced = partial_wigner(partial_trace(rho, which));
        double dmax = 0;
        for (size_t i = 0; i < from_full.v.size(); ++i)
            dmax = std::max(dmax, std::abs(from_full.v[i] - from_reduced.v[i]));
        CHECK(dmax < 1e-6);
    }

    // product states factorize: W = W1 x W2 pointwise
    Amplitude prod = gaussian_product(g, 0.6, -0.4, 0.7, 0.75);
    WignerField Wp = wigner_transform(prod);
    PartialWignerField w1 = space_marginal(Wp, 1);
    PartialWignerField w2 = space_marginal(Wp, 2);
    double dmax = 0;
    for (int j = 0; j < g.n_q; ++j)
        for (int m = 0; m < g.n_q; ++m)
            for (int r = 0; r < g.n_p; ++r)
                for (int k = 0; k < g.n_p; ++k)
                    dmax = std::max(dmax, std::abs(Wp.at(j, m, r, k) -
                                                   w1.at(j, m) * w2.at(r, k)));
    CHECK(dmax < 1e-8);
}

TEST_CASE("memory guard") {
    PhaseGrid big = make_grid(64, 64, -8, 8, -8, 8, 1.0);
    Amplitude chi = gaussian_product(big, 0, 0, 0.7, 0.7);
    CHECK_THROWS_AS(wigner_transform(chi), error);
    WignerOptions opts;
    opts.allow_large = true;
    // allowed behind the flag (still capped at the dense limit)
    WignerField W = wigner_transform(chi, opts);
    CHECK(std::abs(W.integral() - 1.0) < 1e-6);
}
