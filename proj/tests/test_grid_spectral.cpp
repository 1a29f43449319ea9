#include <catch2/catch_amalgamated.hpp>

#include <kvn/randomfields.hpp>
#include <kvn/spectral.hpp>

#include "support/helpers.hpp"

using namespace kvn;
using kvn::testing::box16;
using kvn::testing::fd4_derivative;
using kvn::testing::linf;

TEST_CASE("make_grid validates and derives spacings") {
    PhaseGrid g = make_grid(8, 8, -1.0, 1.0, -1.0, 1.0, 1.0);
    CHECK(g.dq() == Catch::Approx(0.25));
    CHECK(g.dp() == Catch::Approx(0.25));
    CHECK(g.q(0) == Catch::Approx(-1.0));

    CHECK_THROWS_AS(make_grid(7, 8, -1, 1, -1, 1, 1.0), error);
    CHECK_THROWS_AS(make_grid(8, 4, -1, 1, -1, 1, 1.0), error);
    CHECK_THROWS_AS(make_grid(8, 8, 1, -1, -1, 1, 1.0), error);
    CHECK_THROWS_AS(make_grid(8, 8, -1, 1, -1, 1, 0.0), error);

    PhaseGrid g2 = make_grid(64, 64, -8, 8, -8, 8, 1.0);
    CHECK(g2.kq(1) == Catch::Approx(2.0 * std::numbers::pi / 16.0));
    CHECK(g2.kp(1) == Catch::Approx(2.0 * std::numbers::pi / 16.0));
    CHECK(g2.kq(0) == 0.0);
    CHECK(g2.kq(63) == Catch::Approx(-2.0 * std::numbers::pi / 16.0));
}

TEST_CASE("spectral derivative on Fourier eigenfunctions") {
    PhaseGrid g = box16(64);
    const double k = g.kq(3);
    ComplexField f = sample(g, [&](double q, double) { return std::exp(cplx(0, k * q)); });
    ComplexField d = spectral_derivative(f, Axis::q);
    ComplexField expect(g);
    for (size_t i = 0; i < f.v.size(); ++i) expect.v[i] = cplx(0, k) * f.v[i];
    CHECK(linf(d, expect) < 1e-12);

    ComplexField c(g, cplx(2.5, -1.0));
    CHECK(max_abs(spectral_derivative(c, Axis::q)) < 1e-13);
    CHECK(max_abs(spectral_derivative(c, Axis::p)) < 1e-13);
}

TEST_CASE("spectral derivative of sin matches 4th-order finite differences") {
    PhaseGrid g = make_grid(64, 64, -16, 16, -16, 16, 1.0);
    const double w = 2.0 * std::numbers::pi / g.Lq();
    ComplexField f = sample(g, [&](double q, double) { return cplx(std::sin(w * q), 0); });
    ComplexField ds = spectral_derivative(f, Axis::q);
    ComplexField expect = sample(g, [&](double q, double) { return cplx(w * std::cos(w * q), 0); });
    CHECK(linf(ds, expect) < 1e-12);
    CHECK(linf(fd4_derivative(f, Axis::q), expect) < 1e-6);  // oracle sanity
    CHECK(linf(ds, fd4_derivative(f, Axis::q)) < 1e-6);
}

TEST_CASE("derivative applied twice equals the second derivative") {
    PhaseGrid g = box16(32);
    Amplitude chi = random_bandlimited_amplitude(g, 7);
    ComplexField twice = spectral_derivative(spectral_derivative(chi.values, Axis::p), Axis::p);
    ComplexField second = spectral_derivative(chi.values, Axis::p, 2);
    CHECK(linf(twice, second) < 1e-10);
}

TEST_CASE("poisson bracket fundamentals on the trust region") {
    PhaseGrid g = box16(128);
    RealField qw = periodic_coordinate(g, Axis::q);
    RealField pw = periodic_coordinate(g, Axis::p);

    RealField one(g, 1.0);
    RealField br = poisson_bracket(qw, pw);
    CHECK(max_abs_trust(br - one) < 1e-9);  // {q, p} = 1

    Amplitude chi = random_bandlimited_amplitude(g, 11);
    ComplexField self = poisson_bracket(chi.values, chi.values);
    CHECK(max_abs(self) < 1e-12);

    // {q^2, p} = 2q, hand-differentiated oracle
    RealField q2 = hadamard(qw, qw);
    RealField br2 = poisson_bracket(q2, pw);
    RealField expect = qw * 2.0;
    CHECK(max_abs_trust(br2 - expect) < 1e-6);
}

TEST_CASE("integrate: area, Gaussian, and full-period sine") {
    PhaseGrid g = box16(64);
    CHECK(integrate(RealField(g, 1.0)) == Catch::Approx(256.0));

    const double s = 1.0;
    RealField rho = sample(g, [&](double q, double p) {
        return std::exp(-(q * q + p * p) / (2 * s * s)) / (2 * std::numbers::pi * s * s);
    });
    CHECK(std::abs(integrate(rho) - 1.0) < 1e-8);  // analytic Gaussian integral

    const double w = 2.0 * std::numbers::pi / g.Lq();
    RealField sn = sample(g, [&](double q, double) { return std::sin(w * q); });
    CHECK(std::abs(integrate(sn)) < 1e-12);
}

TEST_CASE("bracket algebra properties on random band-limited fields") {
    PhaseGrid g = box16(64);
    Amplitude u = random_bandlimited_amplitude(g, 21, 5);
    Amplitude v = random_bandlimited_amplitude(g, 22, 5);
    Amplitude w = random_bandlimited_amplitude(g, 23, 5);
    const ComplexField &U = u.values, &V = v.values, &W = w.values;

    ComplexField anti = poisson_bracket(U, V) + poisson_bracket(V, U);
    CHECK(max_abs(anti) < 1e-12);

    ComplexField uv = hadamard(U, V);
    ComplexField leib =
        poisson_bracket(uv, W) - (hadamard(poisson_bracket(U, W), V) +
                                  hadamard(U, poisson_bracket(V, W)));
    CHECK(max_abs(leib) < 1e-8);

    ComplexField jac = poisson_bracket(poisson_bracket(U, V), W) -
                       poisson_bracket(poisson_bracket(U, W), V) -
                       poisson_bracket(U, poisson_bracket(V, W));
    CHECK(max_abs(jac) < 1e-6);
}

TEST_CASE("periodic coordinate surrogate is exact on the trust region") {
    for (int n : {64, 128}) {
        PhaseGrid g = box16(n);
        RealField qw = periodic_coordinate(g, Axis::q);
        RealField qr = coordinate_field(g, Axis::q);
        RealField dq = spectral_derivative(qw, Axis::q);
        double verr = 0, derr = 0;
        const TrustRegion tr = trust_region(g);
        for (int j = tr.j_lo; j < tr.j_hi; ++j)
            for (int k = tr.k_lo; k < tr.k_hi; ++k) {
                verr = std::max(verr, std::abs(qw(j, k) - qr(j, k)));
                derr = std::max(derr, std::abs(dq(j, k) - 1.0));
            }
        CHECK(verr < (n == 64 ? 1e-7 : 1e-12));
        CHECK(derr < (n == 64 ? 1e-6 : 1e-11));
    }
}
