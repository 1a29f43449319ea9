#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "kvn/spectral.hpp"

namespace kvn {

// Real phase-space function u(q,p) with optionally supplied analytic gradient
// fields. Without them the gradient is taken spectrally, which requires the
// samples to be smooth and periodic (use periodic_coordinate surrogates for
// polynomial generators).
struct PhaseSpaceFunction {
    RealField values;
    std::string label;
    std::optional<RealField> grad_q;
    std::optional<RealField> grad_p;

    static PhaseSpaceFunction tabulated(RealField f, std::string name = "custom") {
        return PhaseSpaceFunction{std::move(f), std::move(name), std::nullopt, std::nullopt};
    }
    static PhaseSpaceFunction analytic(RealField f, RealField dq, RealField dp,
                                       std::string name = "custom") {
        return PhaseSpaceFunction{std::move(f), std::move(name), std::move(dq), std::move(dp)};
    }

    // Coordinate generators with exact gradients; the value samples are the
    // raw sawtooth (only ever used multiplicatively).
    static PhaseSpaceFunction coordinate(const PhaseGrid& g, Axis axis) {
        RealField one(g, 1.0), zero(g, 0.0);
        if (axis == Axis::q)
            return analytic(coordinate_field(g, Axis::q), std::move(one), std::move(zero), "q");
        return analytic(coordinate_field(g, Axis::p), std::move(zero), std::move(one), "p");
    }
};

// Generator of a canonical transformation in the (q,p)-representation:
//   u~ chi = i hbar (d_q u d_p chi - d_p u d_q chi) + alpha_u chi.
// Default gauge alpha = 0 (canonical representation with alpha_q = alpha_p = 0).
class TildeOperator {
  public:
    TildeOperator(const PhaseGrid& g, RealField grad_q, RealField grad_p,
                  std::optional<RealField> alpha = std::nullopt, std::string label = "")
        : grid_(g), gq_(std::move(grad_q)), gp_(std::move(grad_p)), alpha_(std::move(alpha)),
          label_(std::move(label)) {
        if (!(gq_.grid == g) || !(gp_.grid == g) || (alpha_ && !(alpha_->grid == g)))
            throw error(errc::grid_mismatch, "tilde operator fields");
    }

    const PhaseGrid& grid() const { return grid_; }
    const RealField& grad_q() const { return gq_; }
    const RealField& grad_p() const { return gp_; }
    const std::optional<RealField>& alpha() const { return alpha_; }
    const std::string& label() const { return label_; }

    ComplexField apply(const ComplexField& chi) const {
        if (!(chi.grid == grid_)) throw error(errc::grid_mismatch, "apply_tilde");
        const cplx ih(0.0, grid_.hbar);
        ComplexField dchi_p = spectral_derivative(chi, Axis::p);
        ComplexField dchi_q = spectral_derivative(chi, Axis::q);
        ComplexField out(grid_);
        for (size_t i = 0; i < out.v.size(); ++i)
            out.v[i] = ih * (gq_.v[i] * dchi_p.v[i] - gp_.v[i] * dchi_q.v[i]);
        if (alpha_)
            for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += alpha_->v[i] * chi.v[i];
        return out;
    }

  private:
    PhaseGrid grid_;
    RealField gq_, gp_;
    std::optional<RealField> alpha_;
    std::string label_;
};

inline TildeOperator make_tilde(const PhaseSpaceFunction& u,
                                std::optional<RealField> alpha = std::nullopt) {
    const PhaseGrid& g = u.values.grid;
    RealField gq = u.grad_q ? *u.grad_q : spectral_derivative(u.values, Axis::q);
    RealField gp = u.grad_p ? *u.grad_p : spectral_derivative(u.values, Axis::p);
    return TildeOperator(g, std::move(gq), std::move(gp), std::move(alpha), u.label);
}

// tilde(f(u)) = f'(u) u~ in the canonical representation.
inline TildeOperator tilde_of_function(const std::function<double(double)>& f_prime,
                                       const PhaseSpaceFunction& u) {
    const PhaseGrid& g = u.values.grid;
    RealField fp(g);
    for (size_t i = 0; i < fp.v.size(); ++i) fp.v[i] = f_prime(u.values.v[i]);
    RealField gq = u.grad_q ? *u.grad_q : spectral_derivative(u.values, Axis::q);
    RealField gp = u.grad_p ? *u.grad_p : spectral_derivative(u.values, Axis::p);
    for (size_t i = 0; i < gq.v.size(); ++i) {
        gq.v[i] *= fp.v[i];
        gp.v[i] *= fp.v[i];
    }
    return TildeOperator(g, std::move(gq), std::move(gp), std::nullopt,
                         "f(" + u.label + ")");
}

// Either a multiplicative phase-space field or a tilde operator.
struct OperatorHandle {
    std::variant<RealField, TildeOperator> op;

    OperatorHandle(RealField f) : op(std::move(f)) {}
    OperatorHandle(TildeOperator t) : op(std::move(t)) {}

    const PhaseGrid& grid() const {
        return std::holds_alternative<RealField>(op) ? std::get<RealField>(op).grid
                                                     : std::get<TildeOperator>(op).grid();
    }

    ComplexField apply(const ComplexField& chi) const {
        if (std::holds_alternative<RealField>(op)) {
            const auto& f = std::get<RealField>(op);
            if (!(chi.grid == f.grid)) throw error(errc::grid_mismatch, "multiplicative apply");
            ComplexField out(chi.grid);
            for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = f.v[i] * chi.v[i];
            return out;
        }
        return std::get<TildeOperator>(op).apply(chi);
    }
};

inline ComplexField commutator_apply(const OperatorHandle& a, const OperatorHandle& b,
                                     const ComplexField& chi) {
    return a.apply(b.apply(chi)) - b.apply(a.apply(chi));
}

// <chi_a| T chi_b> - <T chi_a | chi_b>; equals i hbar Int {G, chi_a* chi_b}
// for alpha = 0, so it vanishes for boundary-decaying states. Reported, not
// asserted: the paper leaves the Hermiticity domain question open.
inline cplx hermiticity_defect(const TildeOperator& t, const ComplexField& chi_a,
                               const ComplexField& chi_b) {
    return inner(chi_a, t.apply(chi_b)) - inner(t.apply(chi_a), chi_b);
}

// Residuals of the canonical-representation construction rules on a probe
// state, reported as trust-region max norms.
struct AlgebraReport {
    double sum_rule;      // tilde(u+v) = u~ + v~
    double product_rule;  // tilde(uv) = u v~ + v u~
    double bracket_rule;  // tilde({u,v}) = (1/i hbar)[u~, v~]
    double max() const { return std::max({sum_rule, product_rule, bracket_rule}); }
};

namespace detail {

inline PhaseSpaceFunction psf_sum(const PhaseSpaceFunction& u, const PhaseSpaceFunction& v) {
    PhaseSpaceFunction out = PhaseSpaceFunction::tabulated(u.values + v.values, "sum");
    if (u.grad_q && v.grad_q && u.grad_p && v.grad_p) {
        out.grad_q = *u.grad_q + *v.grad_q;
        out.grad_p = *u.grad_p + *v.grad_p;
    }
    return out;
}

inline PhaseSpaceFunction psf_product(const PhaseSpaceFunction& u, const PhaseSpaceFunction& v) {
    PhaseSpaceFunction out = PhaseSpaceFunction::tabulated(hadamard(u.values, v.values), "product");
    if (u.grad_q && v.grad_q && u.grad_p && v.grad_p) {
        out.grad_q = hadamard(*u.grad_q, v.values) + hadamard(u.values, *v.grad_q);
        out.grad_p = hadamard(*u.grad_p, v.values) + hadamard(u.values, *v.grad_p);
    }
    return out;
}

inline RealField psf_bracket_values(const PhaseSpaceFunction& u, const PhaseSpaceFunction& v) {
    RealField uq = u.grad_q ? *u.grad_q : spectral_derivative(u.values, Axis::q);
    RealField up = u.grad_p ? *u.grad_p : spectral_derivative(u.values, Axis::p);
    RealField vq = v.grad_q ? *v.grad_q : spectral_derivative(v.values, Axis::q);
    RealField vp = v.grad_p ? *v.grad_p : spectral_derivative(v.values, Axis::p);
    return hadamard(uq, vp) - hadamard(up, vq);
}

}  // namespace detail

inline AlgebraReport verify_canonical_algebra(const PhaseSpaceFunction& u,
                                              const PhaseSpaceFunction& v,
                                              const ComplexField& chi) {
    const PhaseGrid& g = chi.grid;
    const cplx ih(0.0, g.hbar);
    TildeOperator tu = make_tilde(u), tv = make_tilde(v);

    ComplexField r1 = make_tilde(detail::psf_sum(u, v)).apply(chi) -
                      (tu.apply(chi) + tv.apply(chi));

    ComplexField r2 = make_tilde(detail::psf_product(u, v)).apply(chi) -
                      (hadamard(to_complex(u.values), tv.apply(chi)) +
                       hadamard(to_complex(v.values), tu.apply(chi)));

    auto br_psf = PhaseSpaceFunction::tabulated(detail::psf_bracket_values(u, v), "bracket");
    ComplexField comm = tu.apply(tv.apply(chi)) - tv.apply(tu.apply(chi));
    for (auto& x : comm.v) x /= ih;
    ComplexField r3 = make_tilde(br_psf).apply(chi) - comm;

    return AlgebraReport{max_abs_trust(r1), max_abs_trust(r2), max_abs_trust(r3)};
}

}  // namespace kvn
