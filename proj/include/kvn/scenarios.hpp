#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include "kvn/characteristics.hpp"
#include "kvn/io.hpp"
#include "kvn/randomfields.hpp"
#include "kvn/star.hpp"
#include "kvn/uncertainty.hpp"

namespace kvn {

using ordered_json = nlohmann::ordered_json;

// ---- scenario schema ---------------------------------------------------------

struct GridSpec {
    int n_q = 128, n_p = 128;
    double q_min = -8, q_max = 8, p_min = -8, p_max = 8, hbar = 1.0;

    PhaseGrid build() const { return make_grid(n_q, n_p, q_min, q_max, p_min, p_max, hbar); }
};

struct StateSpec {
    std::string type = "gaussian";  // gaussian | cat | superposition | random
    double q0 = 0, p0 = 0, sigma_q = 1, sigma_p = 1;
    // cat
    std::string axis = "q";
    double separation = 4.2, sigma = 0.7, sigma_other = 0.7;
    // superposition of gaussian product terms
    struct Term {
        double w_re = 1, w_im = 0, q0 = 0, p0 = 0, sigma_q = 1, sigma_p = 1;
    };
    std::vector<Term> terms;
    // random band-limited
    uint64_t seed = 1;
    int max_mode = 0;

    Amplitude build(const PhaseGrid& g) const {
        if (type == "gaussian") return gaussian_product(g, q0, p0, sigma_q, sigma_p);
        if (type == "cat")
            return cat_state(g, axis == "p" ? Axis::p : Axis::q, separation, sigma, sigma_other);
        if (type == "superposition") {
            if (terms.empty()) throw error(errc::invalid_range, "superposition needs terms");
            ComplexField acc(g);
            for (const auto& t : terms) {
                Amplitude part = gaussian_product(g, t.q0, t.p0, t.sigma_q, t.sigma_p);
                const cplx w(t.w_re, t.w_im);
                for (size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += w * part.values.v[i];
            }
            return normalize(std::move(acc));
        }
        if (type == "random") return random_bandlimited_amplitude(g, seed, max_mode);
        throw error(errc::invalid_range, "unknown state type: " + type);
    }
};

struct HamiltonianJson {
    std::string kind = "free";  // free | harmonic | zero | custom
    double mass = 1.0, omega = 1.0;
    std::vector<double> K, U;
    std::string field_file;  // optional tabulated source for custom kinds

    HamiltonianSpec build() const {
        if (kind == "free") return HamiltonianSpec::free_particle(mass);
        if (kind == "harmonic") return HamiltonianSpec::harmonic(mass, omega);
        if (kind == "zero") return HamiltonianSpec::zero();
        if (kind == "custom") return HamiltonianSpec::custom(K, U);
        throw error(errc::invalid_range, "unknown hamiltonian kind: " + kind);
    }
};

struct ScheduleSpec {
    double dt = 0.01;
    int steps = 100;
    int checkpoint_every = 0;
};

struct AnalysisSpec {
    std::string type;
    ordered_json params = ordered_json::object();
};

struct Scenario {
    std::string name;
    GridSpec grid;
    StateSpec state;
    HamiltonianJson hamiltonian;
    ScheduleSpec schedule;
    std::vector<AnalysisSpec> analyses;
    uint64_t seed = 1;
};

// ---- json (de)serialization ---------------------------------------------------

inline void to_json(ordered_json& j, const GridSpec& g) {
    j = {{"n_q", g.n_q}, {"n_p", g.n_p}, {"q_min", g.q_min}, {"q_max", g.q_max},
         {"p_min", g.p_min}, {"p_max", g.p_max}, {"hbar", g.hbar}};
}
inline void from_json(const ordered_json& j, GridSpec& g) {
    g.n_q = j.value("n_q", 128);
    g.n_p = j.value("n_p", 128);
    g.q_min = j.value("q_min", -8.0);
    g.q_max = j.value("q_max", 8.0);
    g.p_min = j.value("p_min", -8.0);
    g.p_max = j.value("p_max", 8.0);
    g.hbar = j.value("hbar", 1.0);
}

inline void to_json(ordered_json& j, const StateSpec::Term& t) {
    j = {{"w_re", t.w_re}, {"w_im", t.w_im}, {"q0", t.q0}, {"p0", t.p0},
         {"sigma_q", t.sigma_q}, {"sigma_p", t.sigma_p}};
}
inline void from_json(const ordered_json& j, StateSpec::Term& t) {
    t.w_re = j.value("w_re", 1.0);
    t.w_im = j.value("w_im", 0.0);
    t.q0 = j.value("q0", 0.0);
    t.p0 = j.value("p0", 0.0);
    t.sigma_q = j.value("sigma_q", 1.0);
    t.sigma_p = j.value("sigma_p", 1.0);
}

inline void to_json(ordered_json& j, const StateSpec& s) {
    j = {{"type", s.type}};
    if (s.type == "gaussian")
        j.update({{"q0", s.q0}, {"p0", s.p0}, {"sigma_q", s.sigma_q}, {"sigma_p", s.sigma_p}});
    else if (s.type == "cat")
        j.update({{"axis", s.axis}, {"separation", s.separation}, {"sigma", s.sigma},
                  {"sigma_other", s.sigma_other}});
    else if (s.type == "superposition")
        j["terms"] = s.terms;
    else if (s.type == "random")
        j.update({{"seed", s.seed}, {"max_mode", s.max_mode}});
}
inline void from_json(const ordered_json& j, StateSpec& s) {
    s.type = j.value("type", "gaussian");
    s.q0 = j.value("q0", 0.0);
    s.p0 = j.value("p0", 0.0);
    s.sigma_q = j.value("sigma_q", 1.0);
    s.sigma_p = j.value("sigma_p", 1.0);
    s.axis = j.value("axis", "q");
    s.separation = j.value("separation", 4.2);
    s.sigma = j.value("sigma", 0.7);
    s.sigma_other = j.value("sigma_other", 0.7);
    if (j.contains("terms")) s.terms = j.at("terms").get<std::vector<StateSpec::Term>>();
    s.seed = j.value("seed", uint64_t{1});
    s.max_mode = j.value("max_mode", 0);
}

inline void to_json(ordered_json& j, const HamiltonianJson& h) {
    j = {{"kind", h.kind}, {"mass", h.mass}, {"omega", h.omega}};
    if (!h.K.empty()) j["K"] = h.K;
    if (!h.U.empty()) j["U"] = h.U;
}
inline void from_json(const ordered_json& j, HamiltonianJson& h) {
    h.kind = j.value("kind", "free");
    h.mass = j.value("mass", 1.0);
    h.omega = j.value("omega", 1.0);
    if (j.contains("K")) h.K = j.at("K").get<std::vector<double>>();
    if (j.contains("U")) h.U = j.at("U").get<std::vector<double>>();
}

inline void to_json(ordered_json& j, const ScheduleSpec& s) {
    j = {{"dt", s.dt}, {"steps", s.steps}, {"checkpoint_every", s.checkpoint_every}};
}
inline void from_json(const ordered_json& j, ScheduleSpec& s) {
    s.dt = j.value("dt", 0.01);
    s.steps = j.value("steps", 100);
    s.checkpoint_every = j.value("checkpoint_every", 0);
}

inline void to_json(ordered_json& j, const AnalysisSpec& a) {
    j = a.params;
    j["type"] = a.type;
}
inline void from_json(const ordered_json& j, AnalysisSpec& a) {
    a.type = j.at("type").get<std::string>();
    a.params = j;
}

inline void to_json(ordered_json& j, const Scenario& s) {
    j = {{"name", s.name},
         {"grid", s.grid},
         {"state", s.state},
         {"hamiltonian", s.hamiltonian},
         {"schedule", s.schedule},
         {"analyses", s.analyses},
         {"seed", s.seed}};
}
inline void from_json(const ordered_json& j, Scenario& s) {
    s.name = j.value("name", "unnamed");
    if (j.contains("grid")) s.grid = j.at("grid").get<GridSpec>();
    if (j.contains("state")) s.state = j.at("state").get<StateSpec>();
    if (j.contains("hamiltonian")) s.hamiltonian = j.at("hamiltonian").get<HamiltonianJson>();
    if (j.contains("schedule")) s.schedule = j.at("schedule").get<ScheduleSpec>();
    if (j.contains("analyses"))
        s.analyses = j.at("analyses").get<std::vector<AnalysisSpec>>();
    s.seed = j.value("seed", uint64_t{1});
}

// ---- report bundle -------------------------------------------------------------

struct AnalysisResult {
    std::string analysis;
    ordered_json metrics;
    bool pass = false;
};

struct ReportBundle {
    std::string scenario;
    uint64_t seed = 0;
    std::vector<AnalysisResult> results;

    bool pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }

    ordered_json to_json() const {
        ordered_json out;
        out["scenario"] = scenario;
        out["seed"] = seed;
        out["pass"] = pass();
        out["results"] = ordered_json::array();
        for (const auto& r : results)
            out["results"].push_back(
                {{"analysis", r.analysis}, {"pass", r.pass}, {"metrics", r.metrics}});
        return out;
    }
};

namespace detail {

inline void require_finite(const ordered_json& j) {
    if (j.is_number_float() && !std::isfinite(j.get<double>()))
        throw error(errc::invalid_range, "non-finite value in report");
    if (j.is_object() || j.is_array())
        for (const auto& el : j) require_finite(el);
}

inline double l2_dist(const RealField& a, const RealField& b) {
    double s = 0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        s += d * d;
    }
    return std::sqrt(s * a.grid.cell());
}

}  // namespace detail

// ---- analyses -------------------------------------------------------------------

namespace analyses {

inline AnalysisResult return_fidelity(const Scenario& sc) {
    PhaseGrid g = sc.grid.build();
    Amplitude chi0 = sc.state.build(g);
    Amplitude chiT =
        kvn_evolve(chi0, sc.hamiltonian.build(), sc.schedule.dt, sc.schedule.steps);
    const double fid = fidelity(chi0, chiT);
    const double norm_drift = std::abs(norm2(chiT.values) - 1.0);
    AnalysisResult r{"return-fidelity", {}, false};
    r.metrics = {{"fidelity", fid}, {"norm_drift", norm_drift},
                 {"time", sc.schedule.dt * sc.schedule.steps}};
    r.pass = fid >= 1.0 - 1e-4 && norm_drift < 1e-8;
    return r;
}

inline double oracle_l2_error(const Scenario& sc, int n_q, int n_p) {
    GridSpec gs = sc.grid;
    gs.n_q = n_q;
    gs.n_p = n_p;
    PhaseGrid g = gs.build();
    Amplitude chi = sc.state.build(g);
    HamiltonianSpec h = sc.hamiltonian.build();
    const double t = sc.schedule.dt * sc.schedule.steps;
    // couple dt to the grid so splitting error refines with resolution
    const double dt = g.dq() / 8.0;
    const int steps = std::max(1, static_cast<int>(std::round(t / dt)));
    Amplitude evolved = kvn_evolve(chi, h, t / steps, steps);
    TrajectoryOptions topt;
    topt.dt_hint = t / steps;
    LiouvilleDistribution oracle = characteristics_evolve(modulus_squared(chi), h, t, topt);
    return detail::l2_dist(modulus_squared(evolved).values, oracle.values);
}

inline AnalysisResult oracle_compare(const Scenario& sc, const AnalysisSpec& spec) {
    const double tol = spec.params.value("tolerance", 1e-3);
    const bool refine = spec.params.value("refine", true);
    const double err = oracle_l2_error(sc, sc.grid.n_q, sc.grid.n_p);
    AnalysisResult r{"oracle-compare", {}, false};
    r.metrics = {{"l2_error", err}, {"tolerance", tol}};
    r.pass = err <= tol;
    if (refine) {
        const double coarse = oracle_l2_error(sc, sc.grid.n_q / 2, sc.grid.n_p / 2);
        const double ratio = coarse / err;
        r.metrics["l2_error_coarse"] = coarse;
        r.metrics["refinement_ratio"] = ratio;
        r.pass = r.pass && ratio >= 3.5;
    }
    return r;
}

inline AnalysisResult translation_check(const Scenario& sc) {
    PhaseGrid g = sc.grid.build();
    Amplitude chi = sc.state.build(g);
    AnalysisResult r{"translation-check", {}, false};

    const int cells = 8;
    Amplitude moved = canonical_transform(chi, GeneratorSpec::p(), cells * g.dq());
    double err_q = 0;
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k)
            err_q = std::max(err_q,
                             std::abs(moved.values(j, k) -
                                      chi.values(((j - cells) % g.n_q + g.n_q) % g.n_q, k)));

    Amplitude moved_p = canonical_transform(chi, GeneratorSpec::q(), cells * g.dp());
    double err_p = 0;
    for (int j = 0; j < g.n_q; ++j)
        for (int k = 0; k < g.n_p; ++k)
            err_p = std::max(err_p,
                             std::abs(moved_p.values(j, k) -
                                      chi.values(j, (k + cells) % g.n_p)));

    Amplitude split = canonical_transform(canonical_transform(chi, GeneratorSpec::p(), 0.375),
                                          GeneratorSpec::p(), 0.625);
    Amplitude whole = canonical_transform(chi, GeneratorSpec::p(), 1.0);
    double err_comp = 0;
    for (size_t i = 0; i < split.values.v.size(); ++i)
        err_comp = std::max(err_comp, std::abs(split.values.v[i] - whole.values.v[i]));

    r.metrics = {{"shift_q_error", err_q}, {"shift_p_error", err_p},
                 {"composition_error", err_comp}};
    r.pass = err_q <= 1e-8 && err_p <= 1e-8 && err_comp <= 1e-8;
    return r;
}

inline AnalysisResult uncertainty_sweep(const Scenario& sc, const AnalysisSpec& spec,
                                        const std::filesystem::path& outdir) {
    PhaseGrid g = sc.grid.build();
    OperatorHandle q(coordinate_field(g, Axis::q));
    OperatorHandle pt(make_tilde(PhaseSpaceFunction::coordinate(g, Axis::p)));
    AnalysisResult r{"uncertainty", {}, true};
    std::ostringstream csv;
    csv << "scenario,sigma_a,sigma_b,bound,slack\n";
    csv.precision(12);

    std::vector<double> widths = {0.5, 1.0, 2.0};
    if (spec.params.contains("widths"))
        widths = spec.params.at("widths").get<std::vector<double>>();
    double worst_rel_slack = 0;
    for (double s : widths) {
        Amplitude chi = gaussian_product(g, 0.0, 0.0, s, 0.7);
        UncertaintyReport rep = robertson(chi, q, pt);
        csv << "gauss-sigma-" << s << "," << rep.sigma_a << "," << rep.sigma_b << ","
            << rep.bound << "," << rep.slack << "\n";
        worst_rel_slack = std::max(worst_rel_slack, std::abs(rep.slack) / rep.bound);
        if (std::abs(rep.slack) / rep.bound > 1e-3) r.pass = false;
    }

    const int n_random = spec.params.value("random_states", 200);
    double min_slack = 0;
    for (int i = 0; i < n_random; ++i) {
        Amplitude chi = random_bandlimited_amplitude(g, sc.seed + i);
        UncertaintyReport rep = robertson(chi, q, pt);
        min_slack = std::min(min_slack, rep.sigma_a * rep.sigma_b - g.hbar / 2);
        csv << "random-" << i << "," << rep.sigma_a << "," << rep.sigma_b << "," << rep.bound
            << "," << rep.slack << "\n";
    }
    if (min_slack < -1e-6) r.pass = false;

    r.metrics = {{"max_gaussian_relative_slack", worst_rel_slack},
                 {"random_states", n_random},
                 {"min_slack_vs_hbar_over_2", min_slack}};
    if (!outdir.empty()) {
        std::ofstream f(outdir / "uncertainty.csv");
        f << csv.str();
        r.metrics["csv"] = (outdir / "uncertainty.csv").string();
    }
    return r;
}

inline AnalysisResult wigner_analysis(const Scenario& sc, const AnalysisSpec& spec,
                                      const std::filesystem::path& outdir) {
    PhaseGrid g = sc.grid.build();
    Amplitude chi = sc.state.build(g);
    const std::string suite = spec.params.value("suite", "basic");
    WignerField W = wigner_transform(chi);
    AnalysisResult r{"wigner", {}, true};
    const double integral = W.integral();
    const double negvol = negativity_volume(W);
    double marg_err = 0;
    {
        LiouvilleDistribution marg = qp_marginal(W);
        RealField rho = modulus_squared(chi).values;
        for (size_t i = 0; i < rho.v.size(); ++i)
            marg_err = std::max(marg_err, std::abs(marg.values.v[i] - rho.v[i]));
    }
    r.metrics = {{"integral", integral}, {"min", W.min()}, {"max", W.max()},
                 {"negativity_volume", negvol}, {"marginal_error", marg_err},
                 {"imag_residue", W.max_imag_residue}};
    r.pass = std::abs(integral - 1.0) <= 1e-6 && marg_err <= 1e-8 &&
             W.max_imag_residue <= 1e-10;

    if (suite == "negativity") {
        ReducedStateOperator red = partial_trace(pure_state_operator(chi), 1);
        PartialWignerField pw = partial_wigner(red);
        const double pmin = pw.min(), pmax = pw.max();
        const double pneg = negativity_volume(pw);
        Amplitude gauss = gaussian_product(g, 0.0, 0.0, sc.state.sigma, sc.state.sigma_other);
        const double gneg = negativity_volume(wigner_transform(gauss));
        r.metrics["partial_min"] = pmin;
        r.metrics["partial_max"] = pmax;
        r.metrics["partial_negativity_volume"] = pneg;
        r.metrics["gaussian_negativity_volume"] = gneg;
        r.pass = r.pass && pmin <= -0.1 * pmax && pneg > 0.05 && gneg <= 1e-8;
        if (!outdir.empty()) write_csv(outdir / "partial_wigner.csv", pw);
    } else if (suite == "properties") {
        const double peak = 1.0 / std::pow(2.0 * std::numbers::pi * g.hbar, 2);
        const double purity = wigner_overlap(W, W);
        double max_exp_err = 0;
        const std::vector<std::function<double(double, double)>> observables = {
            [](double q, double) { return q; },
            [](double, double p) { return p; },
            [](double q, double) { return q * q; },
            [](double q, double p) { return q * p; }};
        for (const auto& fn : observables) {
            RealField sym = sample(g, fn);
            const double viaW = integrate_against_qp_symbol(W, sym);
            const double viaL = integrate(hadamard(modulus_squared(chi).values, sym));
            max_exp_err = std::max(max_exp_err, std::abs(viaW - viaL));
        }
        Amplitude other = gaussian_product(g, 1.2, 0.4, 0.8, 0.6);
        OverlapIdentity id = overlap_identity_check(chi, other);
        ComplexField oddf = chi.values;
        for (int j = 0; j < g.n_q; ++j)
            for (int k = 0; k < g.n_p; ++k) oddf(j, k) *= g.q(j);
        OverlapIdentity oid = overlap_identity_check(normalize(std::move(oddf)), chi);
        r.metrics["purity_peak"] = purity;
        r.metrics["purity_peak_expected"] = peak;
        r.metrics["max_expectation_error"] = max_exp_err;
        r.metrics["overlap_identity_error"] = std::abs(id.lhs - id.rhs);
        r.metrics["orthogonal_overlap_rhs"] = oid.rhs;
        r.pass = r.pass && std::abs(purity - peak) <= 1e-4 && max_exp_err <= 1e-6 &&
                 std::abs(id.lhs - id.rhs) <= 1e-6 && std::abs(oid.rhs) <= 1e-6;
    }

    if (!outdir.empty()) {
        write_field(outdir / "wigner.kvnfld", to_field_data(W));
        FieldData reread = read_field(outdir / "wigner.kvnfld");
        double renegs = 0;
        for (double x : reread.payload)
            if (x < 0) renegs -= x;
        r.metrics["negativity_volume_after_reload"] = renegs * W.cell4();
        r.metrics["field_file"] = (outdir / "wigner.kvnfld").string();
    }
    return r;
}

inline AnalysisResult moyal_analysis(const Scenario& sc, const AnalysisSpec& spec) {
    PhaseGrid g = sc.grid.build();
    Amplitude chi = sc.state.build(g);
    HamiltonianSpec h = sc.hamiltonian.build();
    const double dt = spec.params.value("dt", 0.005);
    const double res_small = moyal_residual(chi, h, 1e-3);
    const double res_a = moyal_residual(chi, h, dt);
    const double res_b = moyal_residual(chi, h, dt / 2);
    AnalysisResult r{"moyal", {}, false};
    r.metrics = {{"residual_dt_1e-3", res_small},
                 {"residual", res_a},
                 {"residual_half_dt", res_b},
                 {"ratio", res_a / res_b}};
    r.pass = res_small <= 1e-3 && res_a / res_b >= 4.0;
    return r;
}

inline AnalysisResult algebra_analysis(const Scenario& sc) {
    PhaseGrid g = sc.grid.build();
    Amplitude chi = random_bandlimited_amplitude(g, sc.seed, std::min(g.n_q, g.n_p) / 16);
    auto qw = PhaseSpaceFunction::tabulated(periodic_coordinate(g, Axis::q), "q");
    auto pw = PhaseSpaceFunction::tabulated(periodic_coordinate(g, Axis::p), "p");
    auto q2 = PhaseSpaceFunction::tabulated(hadamard(qw.values, qw.values), "q2");
    auto p2 = PhaseSpaceFunction::tabulated(hadamard(pw.values, pw.values), "p2");
    AlgebraReport a = verify_canonical_algebra(qw, pw, chi.values);
    AlgebraReport b = verify_canonical_algebra(q2, pw, chi.values);
    AlgebraReport c = verify_canonical_algebra(qw, p2, chi.values);
    AnalysisResult r{"canonical-algebra", {}, false};
    r.metrics = {{"qp_max_residual", a.max()},
                 {"q2p_max_residual", b.max()},
                 {"qp2_max_residual", c.max()}};
    r.pass = a.max() <= 1e-6 && b.max() <= 1e-6 && c.max() <= 1e-6;
    return r;
}

inline AnalysisResult commutator_analysis(const Scenario& sc, const AnalysisSpec& spec) {
    PhaseGrid g = sc.grid.build();
    const int n_states = spec.params.value("states", 20);
    OperatorHandle qw(periodic_coordinate(g, Axis::q));
    OperatorHandle pw(periodic_coordinate(g, Axis::p));
    OperatorHandle qt(make_tilde(PhaseSpaceFunction::coordinate(g, Axis::q)));
    OperatorHandle pt(make_tilde(PhaseSpaceFunction::coordinate(g, Axis::p)));
    const cplx ih(0, g.hbar);
    double worst = 0;
    for (int i = 0; i < n_states; ++i) {
        Amplitude chi = random_bandlimited_amplitude(g, sc.seed + 1000 + i);
        ComplexField r1 = commutator_apply(qw, pt, chi.values);
        ComplexField r2 = commutator_apply(pw, qt, chi.values);
        ComplexField r3 = commutator_apply(qw, pw, chi.values);
        ComplexField r4 = commutator_apply(qt, pt, chi.values);
        for (size_t s = 0; s < r1.v.size(); ++s) {
            r1.v[s] -= ih * chi.values.v[s];
            r2.v[s] += ih * chi.values.v[s];
        }
        worst = std::max({worst, max_abs_trust(r1), max_abs_trust(r2), max_abs_trust(r3),
                          max_abs_trust(r4)});
    }
    AnalysisResult r{"fundamental-commutators", {}, false};
    r.metrics = {{"states", n_states}, {"max_residual", worst}};
    r.pass = worst <= 1e-7;
    return r;
}

inline AnalysisResult tau_analysis(const Scenario& sc, const AnalysisSpec& spec) {
    PhaseGrid g = sc.grid.build();
    Amplitude chi = sc.state.build(g);
    const double p_cut = spec.params.value("p_cut", 1.0);
    TauReport rep = tau_liouvillian_report(chi, sc.hamiltonian.build(), p_cut);
    AnalysisResult r{"tau-liouvillian", {}, false};
    r.metrics = {{"sigma_tau", rep.robertson.sigma_a},
                 {"sigma_liouvillian", rep.robertson.sigma_b},
                 {"bound", rep.robertson.bound},
                 {"slack", rep.robertson.slack},
                 {"mask_mass", rep.mask_mass}};
    r.pass = rep.robertson.slack >= -1e-4 &&
             std::abs(rep.robertson.bound - g.hbar / 2 * rep.mask_mass) <= 1e-3;
    return r;
}

}  // namespace analyses

// ---- runner ---------------------------------------------------------------------

inline ReportBundle run(const Scenario& sc, const std::filesystem::path& outdir = {}) {
    if (!outdir.empty()) std::filesystem::create_directories(outdir);
    ReportBundle bundle;
    bundle.scenario = sc.name;
    bundle.seed = sc.seed;

    // schedule with optional checkpoints (only when an evolution is requested
    // by checkpoint_every > 0; analyses drive their own evolutions)
    if (sc.schedule.checkpoint_every > 0 && !outdir.empty()) {
        PhaseGrid g = sc.grid.build();
        Amplitude chi = sc.state.build(g);
        HamiltonianSpec h = sc.hamiltonian.build();
        int done = 0, idx = 0;
        while (done < sc.schedule.steps) {
            const int chunk = std::min(sc.schedule.checkpoint_every, sc.schedule.steps - done);
            chi = kvn_evolve(chi, h, sc.schedule.dt, chunk);
            done += chunk;
            std::ostringstream name;
            name << "checkpoint_" << std::setw(4) << std::setfill('0') << ++idx << ".kvnfld";
            write_field(outdir / name.str(), to_field_data(chi.values));
        }
    }

    for (const auto& a : sc.analyses) {
        try {
            if (a.type == "return-fidelity")
                bundle.results.push_back(analyses::return_fidelity(sc));
            else if (a.type == "oracle-compare")
                bundle.results.push_back(analyses::oracle_compare(sc, a));
            else if (a.type == "translation-check")
                bundle.results.push_back(analyses::translation_check(sc));
            else if (a.type == "uncertainty")
                bundle.results.push_back(analyses::uncertainty_sweep(sc, a, outdir));
            else if (a.type == "wigner")
                bundle.results.push_back(analyses::wigner_analysis(sc, a, outdir));
            else if (a.type == "moyal")
                bundle.results.push_back(analyses::moyal_analysis(sc, a));
            else if (a.type == "canonical-algebra")
                bundle.results.push_back(analyses::algebra_analysis(sc));
            else if (a.type == "fundamental-commutators")
                bundle.results.push_back(analyses::commutator_analysis(sc, a));
            else if (a.type == "tau-liouvillian")
                bundle.results.push_back(analyses::tau_analysis(sc, a));
            else
                throw error(errc::invalid_range, "unknown analysis type: " + a.type);
        } catch (const error& e) {
            AnalysisResult fail{a.type, {{"error", e.what()}}, false};
            bundle.results.push_back(std::move(fail));
        }
    }

    ordered_json report = bundle.to_json();
    detail::require_finite(report);
    if (!outdir.empty()) {
        const auto path = outdir / "report.json";
        const auto tmp = outdir / "report.json.tmp";
        {
            std::ofstream f(tmp);
            f << report.dump(2) << "\n";
        }
        std::filesystem::rename(tmp, path);
    }
    return bundle;
}

// ---- builtins -------------------------------------------------------------------

inline std::vector<Scenario> list_builtins() {
    std::vector<Scenario> out;

    {
        Scenario s;
        s.name = "harmonic-return";
        s.grid = GridSpec{128, 128, -8, 8, -8, 8, 1.0};
        s.state = StateSpec{};
        s.state.q0 = 1.2;
        s.state.sigma_q = s.state.sigma_p = 0.8;
        s.hamiltonian.kind = "harmonic";
        s.schedule.dt = 2.0 * std::numbers::pi / 2000;
        s.schedule.steps = 2000;
        s.analyses = {{"return-fidelity", {}}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "free-shear-oracle";
        s.grid = GridSpec{128, 128, -8, 8, -9.6, 9.6, 1.0};
        s.state.p0 = 1.0;
        s.state.sigma_q = s.state.sigma_p = 0.8;
        s.hamiltonian.kind = "free";
        s.schedule.dt = 0.01;
        s.schedule.steps = 100;
        s.analyses = {{"oracle-compare", {}}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "harmonic-oracle";
        s.grid = GridSpec{128, 128, -8, 8, -8, 8, 1.0};
        s.state.q0 = 1.2;
        s.state.sigma_q = s.state.sigma_p = 0.8;
        s.hamiltonian.kind = "harmonic";
        s.schedule.dt = 0.01;
        s.schedule.steps = 100;
        s.analyses = {{"oracle-compare", {}}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "translation-check";
        s.grid = GridSpec{64, 64, -8, 8, -8, 8, 1.0};
        s.state.q0 = 0.5;
        s.state.p0 = -0.5;
        s.state.sigma_q = s.state.sigma_p = 0.9;
        s.analyses = {{"translation-check", {}}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "uncertainty-sweep";
        s.grid = GridSpec{128, 128, -12, 12, -12, 12, 1.0};
        s.analyses = {{"uncertainty", {}}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "cat-negativity";
        s.grid = GridSpec{32, 32, -8, 8, -8, 8, 1.0};
        s.state.type = "cat";
        s.state.separation = 4.2;  // 6 sigma at sigma = 0.7
        s.state.sigma = 0.7;
        s.state.sigma_other = 0.7;
        AnalysisSpec a{"wigner", {}};
        a.params["suite"] = "negativity";
        s.analyses = {a};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "wigner-properties";
        s.grid = GridSpec{32, 32, -8, 8, -8, 8, 1.0};
        s.state.q0 = 0.5;
        s.state.p0 = -0.3;
        s.state.sigma_q = 0.7;
        s.state.sigma_p = 0.7;
        AnalysisSpec a{"wigner", {}};
        a.params["suite"] = "properties";
        s.analyses = {a};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "moyal-residual";
        s.grid = GridSpec{32, 32, -8, 8, -8, 8, 1.0};
        s.state.q0 = 1.0;
        s.state.p0 = 0.8;
        s.state.sigma_q = s.state.sigma_p = 0.9;
        s.hamiltonian.kind = "harmonic";
        s.analyses = {{"moyal", {}}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "canonical-algebra";
        s.grid = GridSpec{128, 128, -8, 8, -8, 8, 1.0};
        s.analyses = {{"canonical-algebra", {}}, {"fundamental-commutators", {}}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "tau-liouvillian";
        s.grid = GridSpec{128, 128, -8, 8, -8, 8, 1.0};
        s.state.p0 = 3.0;
        s.state.sigma_q = 1.0;
        s.state.sigma_p = 0.3;
        s.hamiltonian.kind = "free";
        s.analyses = {{"tau-liouvillian", {}}};
        out.push_back(std::move(s));
    }
    return out;
}

inline std::optional<Scenario> find_builtin(const std::string& name) {
    for (auto& s : list_builtins())
        if (s.name == name) return s;
    return std::nullopt;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw error(errc::io_failure, "cannot open scenario " + path.string());
    ordered_json j = ordered_json::parse(f, nullptr, true, true);
    return j.get<Scenario>();
}

}  // namespace kvn
