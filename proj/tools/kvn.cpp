// kvn: command-line front end for the phase-space laboratory.
//
// Subcommands:
//   list                      print builtin scenarios
//   run <builtin|file.json>   execute a scenario, write report.json + artifacts
//   verify                    run every builtin and print a summary table
//   evolve                    ad-hoc KvN evolution, dump the final amplitude
//   uncertainty               ad-hoc Robertson report CSV for one state
//   wigner                    ad-hoc Wigner analysis of one state
//
// Exit codes: 0 success, 1 invariant violation, 2 usage error.
// Logs go to stderr; data goes to files.

#include <CLI11.hpp>

#include <iostream>

#include <kvn/scenarios.hpp>

namespace {

using namespace kvn;

int cmd_list() {
    for (const auto& s : list_builtins()) {
        std::string kinds;
        for (const auto& a : s.analyses) kinds += (kinds.empty() ? "" : ", ") + a.type;
        std::cout << s.name << "  [" << kinds << "]\n";
    }
    return 0;
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Scenario resolve_scenario(const std::string& ref) {
    if (auto b = find_builtin(ref)) return *b;
    if (!std::filesystem::exists(ref))
        throw UsageError("no builtin or scenario file named '" + ref +
                         "' (see `kvn list` for builtins)");
    return load_scenario(ref);
}

int report_outcome(const ReportBundle& bundle, bool quiet = false) {
    for (const auto& r : bundle.results) {
        std::cerr << (r.pass ? "  pass  " : "  FAIL  ") << bundle.scenario << "/"
                  << r.analysis;
        if (!r.pass && r.metrics.contains("error"))
            std::cerr << "  (" << r.metrics["error"].get<std::string>() << ")";
        std::cerr << "\n";
    }
    if (!quiet)
        std::cerr << (bundle.pass() ? "PASS " : "FAIL ") << bundle.scenario << "\n";
    return bundle.pass() ? 0 : 1;
}

int cmd_run(const std::string& ref, const std::string& out, uint64_t seed, bool has_seed) {
    Scenario sc = resolve_scenario(ref);
    if (has_seed) sc.seed = seed;
    std::filesystem::path outdir = out.empty() ? std::filesystem::path("out") / sc.name
                                               : std::filesystem::path(out);
    ReportBundle bundle = run(sc, outdir);
    std::cerr << "report: " << (outdir / "report.json").string() << "\n";
    return report_outcome(bundle);
}

int cmd_verify(const std::string& out) {
    int rc = 0;
    std::filesystem::path outdir = out.empty() ? std::filesystem::path{} : std::filesystem::path(out);
    std::cout << "scenario                 analysis                  status\n";
    std::cout << "-------------------------------------------------------------\n";
    for (const auto& sc : list_builtins()) {
        ReportBundle bundle =
            run(sc, outdir.empty() ? std::filesystem::path{} : outdir / sc.name);
        for (const auto& r : bundle.results) {
            std::cout << sc.name;
            for (size_t i = sc.name.size(); i < 25; ++i) std::cout << ' ';
            std::cout << r.analysis;
            for (size_t i = r.analysis.size(); i < 26; ++i) std::cout << ' ';
            std::cout << (r.pass ? "pass" : "FAIL") << "\n";
            if (!r.pass) rc = 1;
        }
    }
    std::cout << "-------------------------------------------------------------\n";
    std::cout << (rc == 0 ? "all suites pass" : "FAILURES present") << "\n";
    return rc;
}

struct AdhocState {
    GridSpec grid;
    StateSpec state;
    HamiltonianJson ham;
};

void add_common_options(CLI::App* app, AdhocState& st) {
    app->add_option("--n", st.grid.n_q, "grid points per axis (power of two)")
        ->check(CLI::PositiveNumber);
    app->add_option("--box", st.grid.q_max, "half box size L/2 (box is [-L/2, L/2)^2)");
    app->add_option("--hbar", st.grid.hbar, "action scale");
    app->add_option("--state", st.state.type, "gaussian | cat | random");
    app->add_option("--q0", st.state.q0);
    app->add_option("--p0", st.state.p0);
    app->add_option("--sigma-q", st.state.sigma_q);
    app->add_option("--sigma-p", st.state.sigma_p);
    app->add_option("--separation", st.state.separation);
    app->add_option("--sigma", st.state.sigma);
    app->add_option("--hamiltonian", st.ham.kind, "free | harmonic | zero");
    app->add_option("--mass", st.ham.mass);
    app->add_option("--omega", st.ham.omega);
}

void finalize_grid(AdhocState& st) {
    st.grid.n_p = st.grid.n_q;
    st.grid.q_min = -st.grid.q_max;
    st.grid.p_min = -st.grid.q_max;
    st.grid.p_max = st.grid.q_max;
}

int cmd_evolve(AdhocState st, double t, double dt, const std::string& out) {
    finalize_grid(st);
    PhaseGrid g = st.grid.build();
    Amplitude chi = st.state.build(g);
    const int steps = std::max(1, static_cast<int>(std::round(t / dt)));
    Amplitude evolved = kvn_evolve(chi, st.ham.build(), t / steps, steps);
    write_field(out, to_field_data(evolved.values));
    std::cerr << "evolved t=" << t << " in " << steps << " steps; norm drift "
              << std::abs(norm2(evolved.values) - 1.0) << "; wrote " << out << "\n";
    return 0;
}

int cmd_uncertainty(AdhocState st, const std::string& out) {
    finalize_grid(st);
    PhaseGrid g = st.grid.build();
    Amplitude chi = st.state.build(g);
    OperatorHandle q(coordinate_field(g, Axis::q));
    OperatorHandle p(coordinate_field(g, Axis::p));
    OperatorHandle qt(make_tilde(PhaseSpaceFunction::coordinate(g, Axis::q)));
    OperatorHandle pt(make_tilde(PhaseSpaceFunction::coordinate(g, Axis::p)));
    std::ofstream f(out);
    if (!f) throw error(errc::io_failure, "cannot open " + out);
    f.precision(12);
    f << "scenario,sigma_a,sigma_b,bound,slack\n";
    const std::pair<std::string, std::pair<const OperatorHandle*, const OperatorHandle*>>
        pairs[] = {{"q_vs_ptilde", {&q, &pt}},
                   {"p_vs_qtilde", {&p, &qt}},
                   {"q_vs_p", {&q, &p}},
                   {"qtilde_vs_ptilde", {&qt, &pt}}};
    bool ok = true;
    for (const auto& [label, ops] : pairs) {
        UncertaintyReport r = robertson(chi, *ops.first, *ops.second);
        f << label << "," << r.sigma_a << "," << r.sigma_b << "," << r.bound << ","
          << r.slack << "\n";
        if (r.slack < -1e-6) ok = false;
    }
    std::cerr << "wrote " << out << "\n";
    return ok ? 0 : 1;
}

int cmd_wigner(AdhocState st, const std::string& out_prefix) {
    finalize_grid(st);
    if (st.grid.n_q > 32) st.grid.n_q = 32;  // dense 4D field at desk scale
    finalize_grid(st);
    PhaseGrid g = st.grid.build();
    Amplitude chi = st.state.build(g);
    WignerField W = wigner_transform(chi);
    write_field(out_prefix + ".kvnfld", to_field_data(W));
    PartialWignerField pw = partial_wigner(partial_trace(pure_state_operator(chi), 1));
    write_csv(out_prefix + "_partial.csv", pw);
    write_csv(out_prefix + "_marginal.csv", qp_marginal(W).values, "rho_L");
    ordered_json summary = {{"integral", W.integral()},
                            {"min", W.min()},
                            {"max", W.max()},
                            {"negativity_volume", negativity_volume(W)},
                            {"partial_negativity_volume", negativity_volume(pw)},
                            {"imag_residue", W.max_imag_residue}};
    std::ofstream f(out_prefix + "_summary.json");
    f << summary.dump(2) << "\n";
    std::cerr << "wrote " << out_prefix << ".kvnfld, _partial.csv, _marginal.csv, _summary.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kvn: Koopman-von Neumann phase-space laboratory"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "print builtin scenarios");

    std::string run_ref, run_out;
    uint64_t run_seed = 0;
    auto* runc = app.add_subcommand("run", "execute a scenario");
    runc->add_option("scenario", run_ref, "builtin name or scenario JSON path")->required();
    runc->add_option("--out", run_out, "output directory (default out/<name>)");
    auto* seed_opt = runc->add_option("--seed", run_seed, "seed for randomized suites");

    std::string verify_out;
    auto* verifyc = app.add_subcommand("verify", "run the full builtin invariant suite");
    verifyc->add_option("--out", verify_out, "optional artifact directory");

    AdhocState est;
    double ev_t = 1.0, ev_dt = 0.01;
    std::string ev_out = "evolved.kvnfld";
    auto* evolvec = app.add_subcommand("evolve", "ad-hoc KvN evolution");
    add_common_options(evolvec, est);
    evolvec->add_option("--t", ev_t, "total time");
    evolvec->add_option("--dt", ev_dt, "step size");
    evolvec->add_option("--out", ev_out, "output field file");

    AdhocState ust;
    std::string un_out = "uncertainty.csv";
    auto* unc = app.add_subcommand("uncertainty", "Robertson reports for one state");
    add_common_options(unc, ust);
    unc->add_option("--out", un_out, "output CSV");

    AdhocState wst;
    wst.grid.n_q = 32;
    std::string wg_out = "wigner";
    auto* wig = app.add_subcommand("wigner", "Wigner analysis of one state");
    add_common_options(wig, wst);
    wig->add_option("--out", wg_out, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems exit 2; --help exits 0
    }

    try {
        if (*list) return cmd_list();
        if (*runc) return cmd_run(run_ref, run_out, run_seed, seed_opt->count() > 0);
        if (*verifyc) return cmd_verify(verify_out);
        if (*evolvec) return cmd_evolve(est, ev_t, ev_dt, ev_out);
        if (*unc) return cmd_uncertainty(ust, un_out);
        if (*wig) return cmd_wigner(wst, wg_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const kvn::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
