#include "cflow/lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cflow/errors.hpp"
#include "cflow/io.hpp"
#include "cflow/lab/random.hpp"
#include "cflow/linearized.hpp"
#include "cflow/observables.hpp"

namespace cflow::lab {

namespace {

CheckResult check_le(std::string name, double value, double tolerance) {
    return {std::move(name), value, tolerance, value <= tolerance};
}

CheckResult check_eq(std::string name, long value, long expected) {
    return {std::move(name), static_cast<double>(value), static_cast<double>(expected), value == expected};
}

ModeVector ground_mode_vector(double p, Index n) {
    const Eigen::VectorXd A = ground_amplitudes(p, n);
    ModeVector out(n);
    out.coeffs() = A.cast<cplx>();
    return out;
}

DriftMember run_member(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& dir) {
    DriftMember m;
    m.seed = seed;
    try {
        const ModeVector alpha0 = perturbed_ground_state(cfg, seed);
        const TrajectoryRecord traj = integrate(alpha0, cfg.integrator);
        DecomposeOptions opts;
        opts.delta0 = cfg.delta0;
        const ModulationTrack track = track_modulation(traj, cfg.p0, opts);

        const ConservedTriple drift = traj.max_relative_drift();
        m.max_conservation_drift = std::max({drift.H, drift.Q, drift.E});
        m.sup_dist_h12 = track.sup_dist_h12();
        m.sup_dist_h1 = track.sup_dist_h1();
        m.min_p = track.min_p();
        m.max_p_drop = track.max_p_drop();
        m.max_budget_error = track.max_budget_error();
        m.max_constraint_residual = track.max_constraint_residual();
        for (const auto& s : track.samples) {
            const double denom = cfg.delta + std::sqrt(std::max(0.0, cfg.p0 - s.frame.p));
            const double ratio = denom > 0.0 ? s.dist_h1 / denom : (s.dist_h1 > 0.0 ? HUGE_VAL : 0.0);
            m.bound_ratio = std::max(m.bound_ratio, ratio);
        }
        if (!dir.empty()) {
            io::write_modulation_csv(dir / "modulation.csv", track);
            io::write_trajectory_csv(dir / "trajectory.csv", traj, cfg.integrator.recorded_modes);
        }
        m.ok = true;
    } catch (const std::exception& e) {
        m.ok = false;
        m.error = e.what();
    }
    return m;
}

std::string summary_csv(const DriftStudyReport& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "member,seed,ok,sup_dist_h12,sup_dist_h1,min_p,max_p_drop,bound_ratio,max_budget_error,"
          "max_constraint_residual,max_conservation_drift\n";
    for (std::size_t i = 0; i < r.members.size(); ++i) {
        const auto& m = r.members[i];
        os << i << ',' << m.seed << ',' << (m.ok ? 1 : 0) << ',' << m.sup_dist_h12 << ',' << m.sup_dist_h1 << ','
           << m.min_p << ',' << m.max_p_drop << ',' << m.bound_ratio << ',' << m.max_budget_error << ','
           << m.max_constraint_residual << ',' << m.max_conservation_drift << '\n';
    }
    return os.str();
}

}  // namespace

ModeVector perturbed_ground_state(const ExperimentConfig& cfg, std::uint64_t seed) {
    ModeVector alpha = ground_mode_vector(cfg.p0, cfg.n);
    PerturbationSpec spec{0, cfg.n, cfg.delta, cfg.zero_mode0};
    alpha.coeffs() += generate_perturbation(spec, cfg.n, seed).coeffs();
    return alpha;
}

DriftStudyReport run_drift_study(const ExperimentConfig& cfg) {
    cfg.validate();
    const bool write = !cfg.out_dir.empty();
    const auto member_dir = [&](int i) -> std::filesystem::path {
        if (!write) return {};
        std::ostringstream name;
        name << "member_" << std::setw(3) << std::setfill('0') << i;
        return cfg.out_dir / name.str();
    };

    DriftStudyReport report;
    report.members.resize(static_cast<std::size_t>(cfg.ensemble));
    const int width = std::max(1u, std::thread::hardware_concurrency());
    for (int start = 0; start < cfg.ensemble; start += width) {
        std::vector<std::future<DriftMember>> batch;
        const int stop = std::min(cfg.ensemble, start + width);
        for (int i = start; i < stop; ++i)
            batch.push_back(std::async(std::launch::async, run_member, std::cref(cfg),
                                       member_seed(cfg.seed, static_cast<std::uint64_t>(i)), member_dir(i)));
        for (int i = start; i < stop; ++i) report.members[static_cast<std::size_t>(i)] = batch[i - start].get();
    }

    report.min_p = cfg.p0;
    for (const auto& m : report.members) {
        if (!m.ok) {
            ++report.failed;
            continue;
        }
        report.sup_dist_h12 = std::max(report.sup_dist_h12, m.sup_dist_h12);
        report.sup_dist_h1 = std::max(report.sup_dist_h1, m.sup_dist_h1);
        report.min_p = std::min(report.min_p, m.min_p);
        report.max_p_drop = std::max(report.max_p_drop, m.max_p_drop);
        report.h1_constant = std::max(report.h1_constant, m.bound_ratio);
        report.max_budget_error = std::max(report.max_budget_error, m.max_budget_error);
    }
    report.h12_constant = cfg.delta > 0.0 ? report.sup_dist_h12 / cfg.delta : 0.0;

    if (write) {
        io::write_text(cfg.out_dir / "config.json", config_json(cfg));
        io::write_text(cfg.out_dir / "summary.csv", summary_csv(report));
        nlohmann::json j;
        j["members"] = report.members.size();
        j["failed"] = report.failed;
        j["sup_dist_h12"] = report.sup_dist_h12;
        j["sup_dist_h1"] = report.sup_dist_h1;
        j["min_p"] = report.min_p;
        j["max_p_drop"] = report.max_p_drop;
        j["h12_constant"] = report.h12_constant;
        j["h1_constant"] = report.h1_constant;
        j["max_budget_error"] = report.max_budget_error;
        nlohmann::json errors = nlohmann::json::array();
        for (std::size_t i = 0; i < report.members.size(); ++i)
            if (!report.members[i].ok) errors.push_back({{"member", i}, {"error", report.members[i].error}});
        j["errors"] = errors;
        io::write_text(cfg.out_dir / "summary.json", j.dump(2) + "\n");
    }
    return report;
}

InequalityReport run_inequality_scan(const ExperimentConfig& cfg) {
    cfg.validate();
    InequalityReport r;
    SplitMix64 rng(cfg.seed);
    r.min_gap_random = HUGE_VAL;
    for (long s = 0; s < cfg.samples; ++s) {
        ModeVector alpha(cfg.n);
        for (Index k = 0; k < cfg.n; ++k)
            alpha[k] = std::polar(std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
        alpha.coeffs() /= std::sqrt(charge(alpha));  // Q = 1 fixes the scale of the gap
        r.min_gap_random = std::min(r.min_gap_random, gap(alpha));
        ++r.random_samples;
    }
    for (int s = 0; s < 100; ++s) {
        const cplx p = std::polar(0.8 * std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
        const double modulus = std::abs(p);
        // Long enough that the neglected tail is below rounding.
        const Index n = truncation_for(modulus, 1e-17, cfg.n);
        const cplx c = std::polar(1.0 - modulus * modulus, 2.0 * std::numbers::pi * rng.uniform());
        ModeVector alpha(n);
        cplx pk = 1.0;
        for (Index k = 0; k < n; ++k, pk *= p) alpha[k] = c * pk;
        r.max_gap_geometric = std::max(r.max_gap_geometric, gap(alpha));
        ++r.geometric_samples;
    }
    ModeVector two(cfg.n);
    two[0] = 1.0;
    two[1] = 1.0;
    r.gap_two_modes = gap(two);
    return r;
}

bool SuiteReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

SuiteReport run_spectrum_suite(const ExperimentConfig& cfg) {
    const Index n = std::max<Index>(cfg.n, 128);
    const bool write = !cfg.out_dir.empty();
    SuiteReport rep;
    std::vector<std::vector<double>> omega_tables;
    for (double p : {0.0, 0.3, 0.6}) {
        std::ostringstream tag;
        tag << "p=" << p;
        const OperatorPair ops = build_ground_ops(p, n);
        const SpectralReport plus = spectrum(ops, Which::plus);
        const SpectralReport minus = spectrum(ops, Which::minus);
        double err_plus = std::abs(plus.eigenvalues(0) - positive_eigenvalue(p));
        double err_minus = 0.0;
        for (int k = 1; k < 12; ++k) {
            const double expect_plus = -static_cast<double>(k - 1);
            const double expect_minus = k < 2 ? 0.0 : -static_cast<double>(k - 1);
            err_plus = std::max(err_plus, std::abs(plus.eigenvalues(k) - expect_plus));
            err_minus = std::max(err_minus, std::abs(minus.eigenvalues(k) - expect_minus));
        }
        err_minus = std::max(err_minus, std::abs(minus.eigenvalues(0)));
        rep.checks.push_back(check_le("L+ top-12 spectrum " + tag.str(), err_plus, 1e-6));
        rep.checks.push_back(check_le("L- top-12 spectrum " + tag.str(), err_minus, 1e-6));
        rep.checks.push_back(check_le("L+ eigenpair residual " + tag.str(), plus.residuals.maxCoeff(),
                                      1e-10 * plus.operator_norm));
        rep.checks.push_back(check_le("L- eigenpair residual " + tag.str(), minus.residuals.maxCoeff(),
                                      1e-10 * minus.operator_norm));

        const StabilityReport st = stability_spectrum(ops);
        double err_omega = 0.0;
        for (int m = 0; m <= 10; ++m) {
            const double expect = m < 2 ? 0.0 : static_cast<double>(m - 1) / static_cast<double>(m + 1);
            err_omega = std::max(err_omega, std::abs(st.omegas[static_cast<std::size_t>(m)] - expect));
        }
        rep.checks.push_back(check_le("Omega_m = (m-1)/(m+1), m <= 10, " + tag.str(), err_omega, 1e-6));
        rep.checks.push_back(check_eq("zero mode geometric multiplicity " + tag.str(), st.geometric_multiplicity, 3));
        rep.checks.push_back(check_eq("zero mode algebraic multiplicity " + tag.str(), st.algebraic_multiplicity, 4));
        rep.checks.push_back(check_eq("no unstable eigenvalue " + tag.str(), st.unstable ? 1 : 0, 0));
        omega_tables.push_back(st.omegas);
        if (write) {
            io::write_spectrum_csv(cfg.out_dir / ("spectrum_plus_" + tag.str() + ".csv"), plus);
            io::write_spectrum_csv(cfg.out_dir / ("spectrum_minus_" + tag.str() + ".csv"), minus);
        }
    }
    double spread = 0.0;
    for (std::size_t t = 1; t < omega_tables.size(); ++t)
        for (std::size_t m = 0; m <= 10; ++m)
            spread = std::max(spread, std::abs(omega_tables[t][m] - omega_tables[0][m]));
    rep.checks.push_back(check_le("Omega_m independent of p", spread, 1e-6));

    const CommutatorReport comm = commutators(build_ground_ops(0.5, 128), 64);
    rep.checks.push_back(check_le("[L+, L-] leading block, p=0.5", comm.max_LL, 1e-8));
    rep.checks.push_back(check_le("[M^-1 L+, M^-1 L-] leading block, p=0.5", comm.max_MLML, 1e-8));

    for (Index mode : {0, 1, 2}) {
        const Index nm = 32;
        const std::string tag = "N_mode=" + std::to_string(mode);
        const OperatorPair ops = build_single_mode_ops(mode, 1.0, nm);
        const StabilityReport st = stability_spectrum(ops);
        const std::vector<double> expect = single_mode_frequencies(mode, 1.0, nm);
        double err = 0.0;
        for (std::size_t k = 0; k < expect.size(); ++k) err = std::max(err, std::abs(st.omegas[k] - expect[k]));
        rep.checks.push_back(check_le("single-mode frequencies " + tag, err, 1e-10));
        rep.checks.push_back(check_eq("single-mode stable " + tag, st.unstable ? 1 : 0, 0));

        long positive = 0, zero = 0;
        for (const SpectralReport& s : {spectrum(ops, Which::plus), spectrum(ops, Which::minus)})
            for (Index k = 0; k < s.eigenvalues.size(); ++k) {
                if (std::abs(s.eigenvalues(k)) <= s.zero_tol)
                    ++zero;
                else if (s.eigenvalues(k) > 0.0)
                    ++positive;
            }
        rep.checks.push_back(check_eq("positive eigenvalues of L+ (+) L- " + tag, positive, 2 * mode + 1));
        rep.checks.push_back(check_eq("zero eigenvalues of L+ (+) L- " + tag, zero, 2 * mode + 3));
    }
    if (write) io::write_text(cfg.out_dir / "spectrum_suite.txt", report_text(rep));
    return rep;
}

SuiteReport verify_identities(const ExperimentConfig& cfg) {
    (void)cfg;
    SuiteReport rep;
    for (double p : {0.0, 0.3, 0.5, 0.7}) {
        std::ostringstream tag;
        tag << "p=" << p;
        const Index n = std::max<Index>(128, truncation_for(p, 1e-16));
        rep.checks.push_back(check_le("operator identities " + tag.str(), ground_operator_identities(p, n).max(), 1e-9));
        if (p > 0.0) {
            const SeriesIdentityReport app = series_identities(p, 50);
            for (const auto& c : app.checks) rep.checks.push_back(check_le(c.name + " " + tag.str(), c.max_rel_error, 1e-12));
            const ModeEnergyReport me = mode_energy_relation(p, n);
            rep.checks.push_back(check_le("<MA', A> = 0 " + tag.str(), std::abs(me.derivative_charge_overlap), 1e-12));
            rep.checks.push_back(check_le("<MA', MA> = 2p/(1-p^2)^2 " + tag.str(),
                                          std::abs(me.derivative_mode_overlap - me.overlap_closed_form) /
                                              me.overlap_closed_form,
                                          1e-12));
            rep.checks.push_back(check_le("mode-energy series closed form " + tag.str(),
                                          std::abs(me.series_value - me.series_closed_form) / me.series_closed_form,
                                          1e-12));
        }
        if (p <= 0.6) {
            const LadderReport lad = ladder_check(p, 128);
            rep.checks.push_back(check_le("ladder raising " + tag.str(), lad.raising_residual, 1e-9));
            rep.checks.push_back(check_le("ladder lowering " + tag.str(), lad.lowering_residual, 1e-9));
            rep.checks.push_back(check_le("ladder eigenvectors m <= 10 " + tag.str(),
                                          *std::max_element(lad.eigen_residuals.begin(), lad.eigen_residuals.end()),
                                          1e-9));
            rep.checks.push_back(check_le("S* v1 parallel to A' " + tag.str(), lad.angle_to_derivative, 1e-9));
            const MuLadderReport mu = mu_ladder(p, 8, 128);
            rep.checks.push_back(
                check_le("mu-ladder eigenvectors " + tag.str(), *std::max_element(mu.residuals.begin(), mu.residuals.end()), 1e-9));
        }
        const CoercivityReport co = coercivity(build_ground_ops(p, n));
        rep.checks.push_back(check_le("coercivity L+ " + tag.str(), co.c_plus, -1e-3));
        rep.checks.push_back(check_le("coercivity L- " + tag.str(), co.c_minus, -1e-3));
        rep.checks.push_back(check_le("<L+^-1 MA, MA> = 1/2 " + tag.str(), std::abs(co.inverse_form - 0.5), 1e-8));
    }
    return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

ScalingReport ground_zero_scaling(const std::vector<double>& deltas, bool zero_mode0, Index n, double t_end,
                                  std::uint64_t seed, double rel_tol) {
    ScalingReport rep;
    std::vector<double> xs, ys;
    for (double delta : deltas) {
        ModeVector alpha = ground_mode_vector(0.0, n);
        alpha.coeffs() += generate_perturbation({0, n, delta, zero_mode0}, n, seed).coeffs();
        IntegratorConfig ic;
        ic.t_end = t_end;
        ic.sample_dt = 0.25;
        ic.rel_tol = rel_tol;
        ic.abs_tol = 1e-16;
        const TrajectoryRecord traj = integrate(alpha, ic);
        double sup = 0.0;
        for (const auto& s : traj.states) sup = std::max(sup, orbit_distance(s, 0.0, kH1).distance);
        rep.points.push_back({delta, sup});
        xs.push_back(delta);
        ys.push_back(sup);
    }
    if (xs.size() >= 2) rep.slope = loglog_slope(xs, ys);
    return rep;
}

std::string report_text(const SuiteReport& report) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific;
    for (const auto& c : report.checks)
        os << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << c.value << " tol=" << c.tolerance << '\n';
    return os.str();
}

}  // namespace cflow::lab
