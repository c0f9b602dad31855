// Command-line driver for the conformal-flow experiments.
#include <chrono>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cflow/errors.hpp"
#include "cflow/io.hpp"
#include "cflow/lab/config.hpp"
#include "cflow/lab/experiments.hpp"
#include "cflow/lab/random.hpp"
#include "cflow/modulation.hpp"
#include "cflow/observables.hpp"

namespace {

using namespace cflow;
using namespace cflow::lab;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
    std::string config;
    std::optional<long> n;
    std::optional<double> p0, delta, t_end, rel_tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> ensemble;
    std::string state;

    void attach(CLI::App* sub) {
        sub->add_option("--config", config, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--n", n, "truncation N");
        sub->add_option("--p0", p0, "ground-state parameter p0 in [0,1)");
        sub->add_option("--delta", delta, "perturbation size (h1 norm)");
        sub->add_option("--seed", seed, "64-bit seed");
        sub->add_option("--t-end", t_end, "final time");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--rel-tol", rel_tol, "integrator relative tolerance");
    }

    ExperimentConfig resolve(ExperimentKind kind) const {
        ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load_config(config);
        cfg.kind = kind;
        if (n) cfg.n = *n;
        if (p0) cfg.p0 = *p0;
        if (delta) cfg.delta = *delta;
        if (seed) cfg.seed = *seed;
        if (t_end) cfg.integrator.t_end = *t_end;
        if (out) cfg.out_dir = *out;
        if (rel_tol) cfg.integrator.rel_tol = *rel_tol;
        if (ensemble) cfg.ensemble = *ensemble;
        cfg.validate();
        return cfg;
    }
};

int report_suite(const SuiteReport& rep) {
    std::cout << report_text(rep);
    const bool ok = rep.all_pass();
    std::cout << (ok ? "all checks passed\n" : "some checks failed\n");
    return ok ? 0 : kExitNumerical;
}

int cmd_simulate(const ExperimentConfig& cfg) {
    const ModeVector alpha0 = perturbed_ground_state(cfg, cfg.seed);
    const auto start = std::chrono::steady_clock::now();
    const TrajectoryRecord traj = integrate(alpha0, cfg.integrator);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    io::write_text(cfg.out_dir / "config.json", config_json(cfg));
    io::write_modes_csv(cfg.out_dir / "initial.csv", alpha0);
    io::write_modes_csv(cfg.out_dir / "final.csv", traj.final_state());
    io::write_trajectory_csv(cfg.out_dir / "trajectory.csv", traj, cfg.integrator.recorded_modes);
    const ConservedTriple d = traj.max_relative_drift();
    nlohmann::json meta;
    meta["samples"] = traj.samples();
    meta["accepted_steps"] = traj.stats.accepted;
    meta["rejected_steps"] = traj.stats.rejected;
    meta["rhs_evaluations"] = traj.stats.rhs_evaluations;
    meta["max_relative_drift"] = {{"H", d.H}, {"Q", d.Q}, {"E", d.E}};
    meta["wall_seconds"] = wall;
    meta["oracle_checks"] = traj.stats.oracle_checks;
    meta["max_oracle_deviation"] = traj.stats.max_oracle_deviation;
    io::write_text(cfg.out_dir / "metadata.json", meta.dump(2) + "\n");
    std::cout << std::setprecision(6) << "steps " << traj.stats.accepted << " (rejected " << traj.stats.rejected
              << "), max relative drift H " << d.H << " Q " << d.Q << " E " << d.E << '\n';
    return 0;
}

int cmd_inequality(const ExperimentConfig& cfg) {
    const InequalityReport r = run_inequality_scan(cfg);
    nlohmann::json j;
    j["random_samples"] = r.random_samples;
    j["min_gap_random"] = r.min_gap_random;
    j["geometric_samples"] = r.geometric_samples;
    j["max_gap_geometric"] = r.max_gap_geometric;
    j["gap_two_modes"] = r.gap_two_modes;
    io::write_text(cfg.out_dir / "inequality.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << '\n';
    return r.min_gap_random >= -1e-10 && r.max_gap_geometric <= 1e-9 ? 0 : kExitNumerical;
}

int cmd_decompose(const ExperimentConfig& cfg, const std::string& state_path) {
    const ModeVector alpha = state_path.empty() ? perturbed_ground_state(cfg, cfg.seed) : io::read_modes_csv(state_path);
    DecomposeOptions opts;
    opts.delta0 = cfg.delta0;
    const ModulationFrame f = decompose(alpha, cfg.p0, opts);
    nlohmann::json j;
    j["c"] = f.c;
    j["p"] = f.p;
    j["theta"] = f.theta;
    j["mu"] = f.mu;
    j["theta_orbit"] = f.theta_orbit();
    j["mu_determinate"] = f.mu_determinate;
    j["iterations"] = f.iterations;
    j["constraint_residual"] = f.constraint_residual;
    j["newton_residuals"] = f.newton_residuals;
    j["dist_h12"] = orbit_distance(alpha, f.p, kHHalf).distance;
    j["dist_h1"] = orbit_distance(alpha, f.p, kH1).distance;
    j["energy_budget"] = energy_budget(f);
    j["E"] = higher_charge(alpha);
    io::write_text(cfg.out_dir / "frame.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_drift(const ExperimentConfig& cfg) {
    const DriftStudyReport r = run_drift_study(cfg);
    std::cout << std::setprecision(6) << "members " << r.members.size() << ", failed " << r.failed << '\n'
              << "sup dist_h12 " << r.sup_dist_h12 << " (C = " << r.h12_constant << ")\n"
              << "sup dist_h1 " << r.sup_dist_h1 << " (bound constant " << r.h1_constant << ")\n"
              << "min p " << r.min_p << ", max p drop " << r.max_p_drop << '\n'
              << "max E-budget error " << r.max_budget_error << '\n';
    return r.failed == 0 ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal-flow truncation laboratory"};
    app.require_subcommand(1);

    struct Entry {
        ExperimentKind kind;
        const char* help;
        CLI::App* sub = nullptr;
        Overrides flags;
    };
    std::vector<Entry> entries{
        {ExperimentKind::simulate, "integrate a perturbed ground state and record H, Q, E"},
        {ExperimentKind::spectrum, "linearized spectra and stability frequencies against closed forms"},
        {ExperimentKind::inequality, "scan of the energy bound Q^2 - H >= 0"},
        {ExperimentKind::decompose, "modulation decomposition of a state near the ground-state family"},
        {ExperimentKind::drift_study, "ensemble of perturbed trajectories with modulation tracking"},
        {ExperimentKind::verify_identities, "operator, ladder and series identities"},
    };
    for (auto& e : entries) {
        e.sub = app.add_subcommand(std::string(to_string(e.kind)), e.help);
        e.flags.attach(e.sub);
        if (e.kind == ExperimentKind::drift_study) e.sub->add_option("--ensemble", e.flags.ensemble, "ensemble size");
        if (e.kind == ExperimentKind::decompose)
            e.sub->add_option("--state", e.flags.state, "state CSV (n,re,im); default: perturbed A(p0)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        for (auto& e : entries) {
            if (!e.sub->parsed()) continue;
            const ExperimentConfig cfg = e.flags.resolve(e.kind);
            switch (e.kind) {
                case ExperimentKind::simulate: return cmd_simulate(cfg);
                case ExperimentKind::spectrum: return report_suite(run_spectrum_suite(cfg));
                case ExperimentKind::inequality: return cmd_inequality(cfg);
                case ExperimentKind::decompose: return cmd_decompose(cfg, e.flags.state);
                case ExperimentKind::drift_study: return cmd_drift(cfg);
                case ExperimentKind::verify_identities: return report_suite(verify_identities(cfg));
            }
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
