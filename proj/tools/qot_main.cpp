// Command-line front end: solve / sweep / check / oracle. Emits CSV and JSON
// artifacts plus a plain-text report; every file is listed in manifest.json.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qot/config.hpp"
#include "qot/discrete.hpp"
#include "qot/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int worker_cap() {
    // The pipeline is sequential; the env var exists to cap any future
    // parallel sections and is validated here so misuse fails loudly.
    const char* v = std::getenv("QOT_THREADS");
    if (v == nullptr) return 1;
    int n = std::atoi(v);
    if (n < 1) {
        std::cerr << "QOT_THREADS must be a positive integer\n";
        std::exit(2);
    }
    return n;
}

void mark_failed(const fs::path& outdir, const std::string& why) {
    std::ofstream out(outdir / "FAILED");
    out << why << "\n";
}

int run_solve(const qot::ExperimentConfig& cfg) {
    fs::create_directories(cfg.outdir);
    qot::Marginal m0 = cfg.marginal0.build(), m1 = cfg.marginal1.build();
    double eps = cfg.eps.front();
    fs::path out(cfg.outdir);
    qot::PotentialPair p;
    try {
        p = qot::solve(m0, m1, eps, cfg.sweep.solver);
    } catch (const qot::SolveFailure& f) {
        mark_failed(out, f.what());
        std::cerr << "solve failed: " << f.what() << " (resid " << f.resid0 << ", " << f.resid1
                  << " after " << f.iterations << " iterations)\n";
        return 1;
    }

    std::vector<std::string> files = qot::write_checkpoint((out / "potentials").string(), p);
    qot::PlanDiagnostics d = qot::diagnostics(p);
    if (d.sparse) {
        qot::write_sections_csv((out / "sections.csv").string(), p);
        files.push_back((out / "sections.csv").string());
    }

    json j;
    j["eps"] = eps;
    j["iterations"] = p.iterations;
    j["resid0"] = p.resid0;
    j["resid1"] = p.resid1;
    j["full_support"] = d.full_support;
    j["sparse"] = d.sparse;
    j["sup_diam"] = d.sup_diam;
    j["mean_diam"] = d.mean_diam;
    j["sigma_m_f"] = d.sigma_m_f;
    j["sigma_M_f"] = d.sigma_M_f;
    j["dual_value"] = qot::dual_objective(p);
    auto [cost, pen] = qot::qot_objective(p);
    j["primal_value"] = cost + pen;
    // least-squares slope of f over the grid, for quick shape inspection
    {
        double n = p.f.n(), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < p.f.n(); ++i) {
            double x = p.f.node(i), y = p.f.v[static_cast<size_t>(i)];
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        j["f_slope"] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    std::ofstream(out / "summary.json") << j.dump(2) << "\n";
    files.push_back((out / "summary.json").string());
    qot::write_manifest(cfg.outdir, files);
    std::cout << "solve done: eps=" << eps << " iters=" << p.iterations
              << (d.full_support ? " (full support)" : "") << "\n";
    return 0;
}

int run_sweep_mode(const qot::ExperimentConfig& cfg) {
    fs::create_directories(cfg.outdir);
    qot::Marginal m0 = cfg.marginal0.build(), m1 = cfg.marginal1.build();
    fs::path out(cfg.outdir);
    std::vector<qot::SweepRecord> recs;
    try {
        recs = qot::run_sweep(m0, m1, cfg.eps, cfg.sweep);
    } catch (const qot::SweepFailure& f) {
        qot::write_sweep_csv((out / "sweep.csv").string(), f.records);
        mark_failed(out, f.what());
        std::cerr << "sweep failed: " << f.what() << "\n";
        return 1;
    }
    qot::write_sweep_csv((out / "sweep.csv").string(), recs);

    std::vector<std::pair<std::string, qot::RateFit>> fits;
    auto fit_of = [&](const std::string& name, auto get) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : recs)
            if (r.sparse) pts.emplace_back(r.eps, get(r));
        if (pts.size() >= 4) fits.emplace_back(name, qot::fit_loglog(pts));
    };
    fit_of("sup_diam", [](const qot::SweepRecord& r) { return r.sup_diam; });
    fit_of("mean_diam", [](const qot::SweepRecord& r) { return r.mean_diam; });
    fit_of("cost_gap", [](const qot::SweepRecord& r) { return r.cost_gap; });
    fit_of("l2_hausdorff", [](const qot::SweepRecord& r) { return r.l2_hausdorff; });
    fit_of("l2_fprime_minus_T0", [](const qot::SweepRecord& r) { return r.l2_fprime_T0; });
    fit_of("holder_f_minus_f0", [](const qot::SweepRecord& r) { return r.holder_f_f0; });
    fit_of("l2_barycentric_minus_T0",
           [](const qot::SweepRecord& r) { return r.l2_barycentric_T0; });
    qot::write_fits_json((out / "fits.json").string(), fits);
    qot::write_manifest(cfg.outdir,
                        {(out / "sweep.csv").string(), (out / "fits.json").string()});

    int violations = 0;
    for (const auto& r : recs) violations += static_cast<int>(r.violations.size());
    std::cout << "sweep done: " << recs.size() << " levels";
    for (const auto& [name, f] : fits)
        if (name == "sup_diam") std::cout << ", sup_diam slope " << f.slope;
    std::cout << ", " << violations << " invariant violations\n";
    if (violations > 0) {
        for (const auto& r : recs)
            for (const auto& v : r.violations)
                std::cerr << "eps=" << r.eps << ": " << v << "\n";
        return 1;
    }
    return 0;
}

int run_check(const std::string& stem) {
    qot::PotentialPair p;
    try {
        p = qot::read_checkpoint(stem);
    } catch (const std::exception& e) {
        std::cerr << "check: cannot load checkpoint: " << e.what() << "\n";
        return 2;
    }
    auto [r0, r1] = qot::marginal_residual(p);
    std::cout << "checkpoint: eps=" << p.eps << " grids " << p.f.n() << "x" << p.g.n() << "\n";
    std::cout << "recomputed marginal residuals: " << r0 << ", " << r1 << "\n";
    bool resid_ok = std::max(r0, r1) <= 1e3 * std::max({p.resid0, p.resid1, 1e-10});
    std::cout << "residuals consistent with metadata: " << (resid_ok ? "pass" : "FAIL") << "\n";

    qot::ViolationReport rep = qot::verify_invariants(p);
    if (rep.skipped) {
        std::cout << "invariant suite: skipped (full-support regime)\n";
        return resid_ok ? 0 : 1;
    }
    for (const auto& c : rep.checks) {
        std::cout << c.name << ": "
                  << (!c.applicable ? "n/a" : c.pass ? "pass" : "FAIL")
                  << " (worst margin " << c.worst_margin << ")";
        if (!c.detail.empty()) std::cout << " " << c.detail;
        std::cout << "\n";
    }
    return (resid_ok && rep.all_pass()) ? 0 : 1;
}

int run_oracle(const qot::ExperimentConfig& cfg) {
    fs::create_directories(cfg.outdir);
    qot::Marginal m0 = cfg.marginal0.build(), m1 = cfg.marginal1.build();
    double eps = cfg.eps.front();
    qot::PotentialPair p = qot::solve(m0, m1, eps, cfg.sweep.solver);
    qot::DiscreteProblem dp = qot::discretize(p);
    qot::DiscreteCoupling dc = qot::solve_discrete(dp);
    double dens_err = qot::compare_with_continuous(p, dp, dc);
    double dual_cont = qot::dual_objective(p);
    double rel = std::abs(dc.dual_value - dual_cont) / std::max(1.0, std::abs(dual_cont));
    std::cout << "continuous dual " << qot::fmt17(dual_cont) << "\n";
    std::cout << "discrete dual   " << qot::fmt17(dc.dual_value) << " (rel diff " << rel
              << ")\n";
    std::cout << "max plan-density discrepancy " << dens_err << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D quadratically regularized optimal transport harness"};
    app.require_subcommand(1);
    worker_cap();

    std::string cfg_path, ckpt;
    auto* solve = app.add_subcommand("solve", "one regularization level, full artifacts");
    solve->add_option("config", cfg_path, "experiment config")->required();
    auto* sweep = app.add_subcommand("sweep", "descending eps ladder with rate fits");
    sweep->add_option("config", cfg_path, "experiment config")->required();
    auto* check = app.add_subcommand("check", "re-verify a saved checkpoint");
    check->add_option("checkpoint", ckpt, "checkpoint stem (without .json)")->required();
    auto* oracle = app.add_subcommand("oracle", "compare against the discrete solver");
    oracle->add_option("config", cfg_path, "experiment config")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_check(ckpt);
        qot::ExperimentConfig cfg = qot::load_config(cfg_path);
        if (solve->parsed()) {
            if (cfg.mode != qot::RunMode::Solve && cfg.mode != qot::RunMode::Sweep)
                cfg.mode = qot::RunMode::Solve;
            return run_solve(cfg);
        }
        if (sweep->parsed()) return run_sweep_mode(cfg);
        return run_oracle(cfg);
    } catch (const qot::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
