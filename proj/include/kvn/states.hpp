#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kvn/tilde.hpp"

namespace kvn {

inline constexpr int kDenseOperatorCap = 4096;  // largest N = n_q*n_p kept dense
inline constexpr int kEigenvalueCheckCap = 1024;

// ---- Amplitude --------------------------------------------------------------

// Complex probability amplitude chi(q,p); |chi|^2 is the Liouville density.
struct Amplitude {
    ComplexField values;
    double time = 0.0;

    const PhaseGrid& grid() const { return values.grid; }
};

inline Amplitude normalize(ComplexField chi, double time = 0.0) {
    double n = norm2(chi);
    if (!(n > 0.0) || !all_finite(chi))
        throw error(errc::invalid_range, "cannot normalize a null or non-finite field");
    chi *= cplx(1.0 / std::sqrt(n), 0.0);
    return Amplitude{std::move(chi), time};
}

inline cplx overlap(const Amplitude& a, const Amplitude& b) { return inner(a.values, b.values); }
inline double fidelity(const Amplitude& a, const Amplitude& b) { return std::abs(overlap(a, b)); }

// ---- Liouville distribution --------------------------------------------------

struct LiouvilleDistribution {
    RealField values;
    double time = 0.0;
};

// Clamp cosmetic negative rounding (>-1e-12) to zero; larger negativity is an error.
inline LiouvilleDistribution make_liouville(RealField rho, double time = 0.0) {
    for (auto& x : rho.v) {
        if (x < 0.0) {
            if (x < -1e-12) throw error(errc::invalid_range, "Liouville density went negative");
            x = 0.0;
        }
    }
    return LiouvilleDistribution{std::move(rho), time};
}

inline LiouvilleDistribution modulus_squared(const Amplitude& chi) {
    RealField rho(chi.grid());
    for (size_t i = 0; i < rho.v.size(); ++i) rho.v[i] = std::norm(chi.values.v[i]);
    return LiouvilleDistribution{std::move(rho), chi.time};
}

// ---- Marginal amplitudes and product states ---------------------------------

struct MarginalAmplitude {
    std::vector<cplx> values;
    int which = 1;  // 1: over q (space 1), 2: over p (space 2)
    double lo = 0.0, hi = 0.0;

    int n() const { return static_cast<int>(values.size()); }
    double d() const { return (hi - lo) / n(); }
    double coord(int i) const { return lo + i * d(); }
};

inline MarginalAmplitude normalize_marginal(MarginalAmplitude m) {
    double s = 0;
    for (const auto& x : m.values) s += std::norm(x);
    s *= m.d();
    if (!(s > 0.0)) throw error(errc::invalid_range, "null marginal amplitude");
    for (auto& x : m.values) x /= std::sqrt(s);
    return m;
}

inline MarginalAmplitude gaussian_marginal(const PhaseGrid& g, int which, double center,
                                           double sigma, double wavenumber = 0.0) {
    MarginalAmplitude m;
    m.which = which;
    m.lo = which == 1 ? g.q_min : g.p_min;
    m.hi = which == 1 ? g.q_max : g.p_max;
    m.values.resize(which == 1 ? g.n_q : g.n_p);
    for (int i = 0; i < m.n(); ++i) {
        double x = m.coord(i);
        double u = (x - center) / (2.0 * sigma);
        m.values[i] = std::exp(-u * u) * std::exp(cplx(0.0, wavenumber * x));
    }
    return normalize_marginal(std::move(m));
}

inline Amplitude product_state(const PhaseGrid& g, const MarginalAmplitude& f1,
                               const MarginalAmplitude& f2) {
    if (f1.which != 1 || f2.which != 2 || f1.n() != g.n_q || f2.n() != g.n_p)
        throw error(errc::grid_mismatch, "product_state marginals do not match grid");
    ComplexField chi(g);
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k) chi(j, k) = f1.values[j] * f2.values[k];
    return normalize(std::move(chi));
}

inline Amplitude gaussian_product(const PhaseGrid& g, double q0, double p0, double sigma_q,
                                  double sigma_p) {
    return product_state(g, gaussian_marginal(g, 1, q0, sigma_q),
                         gaussian_marginal(g, 2, p0, sigma_p));
}

// Two-lobe superposition along one axis; the other factor is a Gaussian.
inline Amplitude cat_state(const PhaseGrid& g, Axis axis, double separation, double sigma,
                           double sigma_other) {
    ComplexField chi(g);
    auto lobe = [&](double x, double c) {
        double u = (x - c) / (2.0 * sigma);
        return std::exp(-u * u);
    };
    for (int j = 0; j < g.n_q; ++j) {
        for (int k = 0; k < g.n_p; ++k) {
            double x = axis == Axis::q ? g.q(j) : g.p(k);
            double y = axis == Axis::q ? g.p(k) : g.q(j);
            double env = std::exp(-y * y / (4.0 * sigma_other * sigma_other));
            chi(j, k) = (lobe(x, separation / 2) + lobe(x, -separation / 2)) * env;
        }
    }
    return normalize(std::move(chi));
}

// ---- State operators ---------------------------------------------------------

// Dense state operator in the flattened |q,p> grid basis. Entries follow the
// Dirac density convention <x|rho|x'> (kernel values), so every trace carries
// a cell = dq*dp factor.
struct StateOperator {
    Eigen::MatrixXcd m;
    PhaseGrid grid;
    double time = 0.0;

    int dim() const { return grid.size(); }
    double cell() const { return grid.cell(); }

    double trace() const { return (m.trace() * cell()).real(); }
    double purity() const { return m.squaredNorm() * cell() * cell(); }
    double hermiticity_defect() const { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

    // Flattened index of the |q_j, p_k> basis ket.
    int idx(int j, int k) const { return j * grid.n_p + k; }
};

inline StateOperator pure_state_operator(const Amplitude& chi, int cap = kDenseOperatorCap) {
    const PhaseGrid& g = chi.grid();
    if (g.size() > cap)
        throw error(errc::memory_guard,
                    "dense state operator needs N <= " + std::to_string(cap));
    const int n = g.size();
    Eigen::Map<const Eigen::VectorXcd> v(chi.values.v.data(), n);
    StateOperator rho;
    rho.m = v * v.adjoint();
    rho.grid = g;
    rho.time = chi.time;
    return rho;
}

inline StateOperator convex_mix(const std::vector<std::pair<double, StateOperator>>& parts) {
    if (parts.empty()) throw error(errc::bad_weights, "empty mixture");
    double wsum = 0;
    for (const auto& [w, s] : parts) {
        if (w < 0) throw error(errc::bad_weights, "negative weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-10)
        throw error(errc::bad_weights, "weights must sum to 1");
    StateOperator out = parts.front().second;
    out.m = parts.front().first * parts.front().second.m;
    for (size_t i = 1; i < parts.size(); ++i) {
        if (!(parts[i].second.grid == out.grid))
            throw error(errc::grid_mismatch, "mixture on different grids");
        out.m += parts[i].first * parts[i].second.m;
    }
    return out;
}

inline double trace_product(const StateOperator& a, const StateOperator& b) {
    if (!(a.grid == b.grid)) throw error(errc::grid_mismatch, "trace_product");
    // Tr(AB) = sum A_ab conj(B_ab) for Hermitian B.
    return (a.m.cwiseProduct(b.m.conjugate()).sum() * a.cell() * a.cell()).real();
}

inline double smallest_eigenvalue(const StateOperator& rho) {
    if (rho.dim() > kEigenvalueCheckCap)
        throw error(errc::memory_guard, "eigenvalue check capped at N <= 1024");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.m * rho.cell(),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline RealField diagonal_density(const StateOperator& rho) {
    RealField d(rho.grid);
    for (int i = 0; i < rho.dim(); ++i) d.v[i] = rho.m(i, i).real();
    return d;
}

// ---- Expectations -------------------------------------------------------------

inline cplx expectation(const Amplitude& chi, const OperatorHandle& r) {
    return inner(chi.values, r.apply(chi.values));
}

// Tr(rho R) computed by applying R to each column of the kernel matrix.
inline cplx expectation(const StateOperator& rho, const OperatorHandle& r) {
    if (!(r.grid() == rho.grid)) throw error(errc::grid_mismatch, "expectation");
    const int n = rho.dim();
    cplx acc = 0.0;
    ComplexField col(rho.grid);
    for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) col.v[a] = rho.m(a, b);
        ComplexField rc = r.apply(col);
        acc += rc.v[b];
    }
    return acc * rho.cell();
}

// ---- Partial traces ------------------------------------------------------------

// State operator reduced to one factor space, with its own 1D density convention.
struct ReducedStateOperator {
    Eigen::MatrixXcd m;
    int which = 1;  // 1: q basis, 2: p basis
    double lo = 0.0, hi = 0.0;
    double hbar = 1.0;

    int n() const { return static_cast<int>(m.rows()); }
    double d() const { return (hi - lo) / n(); }
    double coord(int i) const { return lo + i * d(); }
    double trace() const { return (m.trace() * d()).real(); }
    double purity() const { return m.squaredNorm() * d() * d(); }
    double hermiticity_defect() const { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }
    double smallest_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m * d(), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
};

inline ReducedStateOperator partial_trace(const StateOperator& rho, int which) {
    const PhaseGrid& g = rho.grid;
    ReducedStateOperator out;
    out.which = which;
    out.hbar = g.hbar;
    if (which == 1) {
        out.lo = g.q_min;
        out.hi = g.q_max;
        out.m = Eigen::MatrixXcd::Zero(g.n_q, g.n_q);
        for (int j = 0; j < g.n_q; ++j)
            for (int j2 = 0; j2 < g.n_q; ++j2) {
                cplx s = 0;
                for (int k = 0; k < g.n_p; ++k) s += rho.m(rho.idx(j, k), rho.idx(j2, k));
                out.m(j, j2) = s * g.dp();
            }
    } else if (which == 2) {
        out.lo = g.p_min;
        out.hi = g.p_max;
        out.m = Eigen::MatrixXcd::Zero(g.n_p, g.n_p);
        for (int k = 0; k < g.n_p; ++k)
            for (int k2 = 0; k2 < g.n_p; ++k2) {
                cplx s = 0;
                for (int j = 0; j < g.n_q; ++j) s += rho.m(rho.idx(j, k), rho.idx(j, k2));
                out.m(k, k2) = s * g.dq();
            }
    } else {
        throw error(errc::invalid_range, "partial_trace: which must be 1 or 2");
    }
    return out;
}

inline ReducedStateOperator pure_reduced(const MarginalAmplitude& f) {
    ReducedStateOperator out;
    out.which = f.which;
    out.lo = f.lo;
    out.hi = f.hi;
    Eigen::Map<const Eigen::VectorXcd> v(f.values.data(), f.n());
    out.m = v * v.adjoint();
    return out;
}

}  // namespace kvn
