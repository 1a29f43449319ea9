#include <catch2/catch_amalgamated.hpp>

#include <kvn/randomfields.hpp>
#include <kvn/states.hpp>

#include "support/helpers.hpp"

using namespace kvn;
using kvn::testing::box16;

namespace {

RealField ones(const PhaseGrid& g) { return RealField(g, 1.0); }

double covariance(const Amplitude& chi) {
    const PhaseGrid& g = chi.grid();
    RealField rho = modulus_squared(chi).values;
    double mq = 0, mp = 0, c = 0;
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) {
            mq += g.q(j) * rho(j, k);
            mp += g.p(k) * rho(j, k);
        }
    mq *= g.cell();
    mp *= g.cell();
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) c += (g.q(j) - mq) * (g.p(k) - mp) * rho(j, k);
    return c * g.cell();
}

}  // namespace

TEST_CASE("modulus squared: normalization, phase invariance, cat lobes") {
    PhaseGrid g = box16(64);
    Amplitude chi = gaussian_product(g, 0.0, 0.0, 1.0, 1.0);
    LiouvilleDistribution rho = modulus_squared(chi);
    CHECK(std::abs(integrate(rho.values) - 1.0) < 1e-8);

    Amplitude phased = chi;
    for (auto& z : phased.values.v) z *= std::exp(cplx(0, 0.83));
    CHECK(kvn::testing::linf(modulus_squared(phased).values, rho.values) < 1e-14);

    Amplitude cat = cat_state(g, Axis::q, 7.0, 0.6, 0.7);
    RealField rc = modulus_squared(cat).values;
    double left = 0, right = 0;
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) (g.q(j) < 0 ? left : right) += rc(j, k);
    left *= g.cell();
    right *= g.cell();
    CHECK(std::abs(left - 0.5) < 1e-6);
    CHECK(std::abs(right - 0.5) < 1e-6);
}

TEST_CASE("product states factorize; superpositions correlate") {
    PhaseGrid g = box16(64);
    Amplitude prod = gaussian_product(g, 0.5, -0.25, 1.0, 0.8);
    CHECK(std::abs(norm2(prod.values) - 1.0) < 1e-10);
    CHECK(std::abs(covariance(prod)) < 1e-8);

    // sum of two shifted product terms, then normalize
    Amplitude a = gaussian_product(g, 1.0, 1.0, 0.8, 0.8);
    Amplitude b = gaussian_product(g, -1.0, -1.0, 0.8, 0.8);
    ComplexField sum = a.values + b.values;
    Amplitude corr = normalize(std::move(sum));
    CHECK(std::abs(covariance(corr)) > 0.1);
}

TEST_CASE("pure state operators: purity, diagonal, orthogonality") {
    PhaseGrid g = make_grid(16, 16, -8, 8, -8, 8, 1.0);
    Amplitude chi = gaussian_product(g, 0.0, 0.0, 1.5, 1.5);
    StateOperator rho = pure_state_operator(chi);

    CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
    CHECK(std::abs(rho.purity() - 1.0) < 1e-6);
    CHECK(rho.hermiticity_defect() < 1e-12);
    CHECK(kvn::testing::linf(diagonal_density(rho), modulus_squared(chi).values) < 1e-10);
    CHECK(smallest_eigenvalue(rho) > -1e-8);

    // odd state is orthogonal to the even Gaussian
    ComplexField odd(g);
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) odd(j, k) = g.q(j) * chi.values(j, k);
    StateOperator rho2 = pure_state_operator(normalize(std::move(odd)));
    CHECK(std::abs(trace_product(rho, rho2)) < 1e-8);
    CHECK(trace_product(rho, rho2) > -1e-12);
    CHECK(trace_product(rho, rho) < 1.0 + 1e-8);

    PhaseGrid big = make_grid(64, 128, -8, 8, -8, 8, 1.0);
    CHECK_THROWS_AS(pure_state_operator(gaussian_product(big, 0, 0, 1, 1)), error);
}

TEST_CASE("convex mixtures") {
    PhaseGrid g = make_grid(16, 16, -8, 8, -8, 8, 1.0);
    Amplitude chi = gaussian_product(g, 0.0, 0.0, 1.5, 1.5);
    StateOperator rho = pure_state_operator(chi);

    StateOperator same = convex_mix({{1.0, rho}});
    CHECK((same.m - rho.m).cwiseAbs().maxCoeff() < 1e-14);

    ComplexField odd(g);
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) odd(j, k) = g.q(j) * chi.values(j, k);
    StateOperator rho2 = pure_state_operator(normalize(std::move(odd)));

    StateOperator mix = convex_mix({{0.5, rho}, {0.5, rho2}});
    // 2-level brute force: Tr(mix^2) = (w1^2 + 2 w1 w2 Tr(r1 r2) + w2^2)
    double expected = 0.25 * (rho.purity() + 2.0 * trace_product(rho, rho2) + rho2.purity());
    CHECK(std::abs(expected - 0.5) < 1e-6);
    CHECK(std::abs(mix.purity() - expected) < 1e-10);
    CHECK(mix.purity() < 1.0 + 1e-8);

    RealField expect_diag =
        diagonal_density(rho) * 0.5 + diagonal_density(rho2) * 0.5;
    CHECK(kvn::testing::linf(diagonal_density(mix), expect_diag) < 1e-12);

    CHECK_THROWS_AS(convex_mix({{0.7, rho}, {0.7, rho2}}), error);
    CHECK_THROWS_AS(convex_mix({{-0.5, rho}, {1.5, rho2}}), error);
}

TEST_CASE("expectations against Liouville quadrature") {
    PhaseGrid g = box16(64);
    Amplitude chi = gaussian_product(g, 0.0, 0.0, 1.5, 1.0);

    CHECK(std::abs(expectation(chi, OperatorHandle(ones(g))) - 1.0) < 1e-10);
    Amplitude sym = gaussian_product(g, 0.0, 0.0, 1.0, 1.0);
    CHECK(std::abs(expectation(sym, OperatorHandle(coordinate_field(g, Axis::q)))) < 1e-8);

    RealField q2(g);
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) q2(j, k) = g.q(j) * g.q(j);
    cplx mean_q2 = expectation(chi, OperatorHandle(q2));
    CHECK(std::abs(mean_q2.real() - 2.25) < 1e-4);  // analytic <q^2> for sigma 1.5
    CHECK(std::abs(mean_q2.imag()) < 1e-8);

    // cross-check: Tr(rho R) against the Liouville integral on a small grid
    PhaseGrid gs = make_grid(16, 16, -8, 8, -8, 8, 1.0);
    Amplitude cs = gaussian_product(gs, 0.3, -0.4, 1.5, 1.2);
    StateOperator rho = pure_state_operator(cs);
    RealField r = sample(gs, [](double q, double p) { return q * q + 0.5 * p; });
    cplx tr = expectation(rho, OperatorHandle(r));
    double via_liouville = integrate(hadamard(modulus_squared(cs).values, r));
    CHECK(std::abs(tr.real() - via_liouville) < 1e-10);
    CHECK(std::abs(tr.imag()) < 1e-10);
}

TEST_CASE("partial traces") {
    PhaseGrid g = make_grid(32, 32, -8, 8, -8, 8, 1.0);
    Amplitude prod = gaussian_product(g, 0.4, -0.2, 1.1, 0.9);
    StateOperator rho = pure_state_operator(prod);

    ReducedStateOperator r1 = partial_trace(rho, 1);
    ReducedStateOperator r2 = partial_trace(rho, 2);
    CHECK(std::abs(r1.trace() - 1.0) < 1e-8);
    CHECK(std::abs(r2.trace() - 1.0) < 1e-8);
    CHECK(std::abs(r1.purity() - 1.0) < 1e-6);  // separable: reduction stays pure
    CHECK(r1.hermiticity_defect() < 1e-10);
    CHECK(r1.smallest_eigenvalue() > -1e-8);

    // matches the outer product of the marginal amplitude
    ReducedStateOperator direct = pure_reduced(gaussian_marginal(g, 1, 0.4, 1.1));
    CHECK((r1.m - direct.m).cwiseAbs().maxCoeff() < 1e-10);

    // correlated 2-term superposition: reduced purity vs 2x2 Gram brute force
    MarginalAmplitude a1 = gaussian_marginal(g, 1, 1.0, 1.0);
    MarginalAmplitude b1 = gaussian_marginal(g, 1, -1.0, 1.0);
    MarginalAmplitude a2 = gaussian_marginal(g, 2, 0.5, 1.0);
    MarginalAmplitude b2 = gaussian_marginal(g, 2, -0.5, 1.0);
    ComplexField sum(g);
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k)
            sum(j, k) = a1.values[j] * a2.values[k] + b1.values[j] * b2.values[k];
    Amplitude corr = normalize(std::move(sum));
    StateOperator rc = pure_state_operator(corr);
    ReducedStateOperator red = partial_trace(rc, 1);

    auto dot1 = [&](const MarginalAmplitude& x, const MarginalAmplitude& y) {
        cplx s = 0;
        for (int i = 0; i < x.n(); ++i) s += std::conj(x.values[i]) * y.values[i];
        return s * x.d();
    };
    const MarginalAmplitude* m1[2] = {&a1, &b1};
    const MarginalAmplitude* m2[2] = {&a2, &b2};
    cplx g1[2][2], g2[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            g1[i][j] = dot1(*m1[i], *m1[j]);
            g2[i][j] = dot1(*m2[i], *m2[j]);
        }
    cplx z = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) z += g1[j][i] * g2[j][i];
    // rho1 = sum_ij |chi1_i><chi1_j| G2[j,i] / Z; purity via Gram contractions
    cplx pur = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    pur += g2[j][i] * g2[l][k] * g1[j][k] * g1[l][i];
    double oracle = (pur / (z * z)).real();
    CHECK(std::abs(red.purity() - oracle) < 1e-10);
    CHECK(red.purity() < 1.0 - 0.01);  // genuinely mixed

    CHECK_THROWS_AS(partial_trace(rho, 3), error);
}

TEST_CASE("normalization invariance under complex scaling") {
    PhaseGrid g = make_grid(32, 32, -8, 8, -8, 8, 1.0);
    Amplitude chi = random_bandlimited_amplitude(g, 5);
    ComplexField scaled = chi.values;
    for (auto& z : scaled.v) z *= cplx(0.3, -1.7);
    Amplitude renorm = normalize(std::move(scaled));
    CHECK(kvn::testing::linf(modulus_squared(renorm).values, modulus_squared(chi).values) <
          1e-12);
}
