// Command-line front end: run / sweep / compare / check.
#include "ksfluid/runner.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>

namespace {

using namespace ksfluid;

struct CommonFlags {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double t_end = 0.0;
    bool t_end_set = false;
    double mass = 0.0;
    bool mass_set = false;
    int grid_n = 0;
    bool grid_n_set = false;
    double grid_l = 0.0;
    bool grid_l_set = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "flat key=value config file");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "RNG seed")->each([&](const std::string&) {
        f.seed_set = true;
    });
    cmd->add_option("--t-end", f.t_end, "final time")->each([&](const std::string&) {
        f.t_end_set = true;
    });
    cmd->add_option("--mass", f.mass, "total mass (also reselects the regime)")
        ->each([&](const std::string&) { f.mass_set = true; });
    cmd->add_option("--grid-n", f.grid_n, "cells per side")
        ->each([&](const std::string&) { f.grid_n_set = true; });
    cmd->add_option("--grid-L", f.grid_l, "half-width of the box")
        ->each([&](const std::string&) { f.grid_l_set = true; });
}

ScenarioConfig build_config(const CommonFlags& f) {
    ScenarioConfig cfg;
    if (f.config.empty()) {
        // --mass with no config file selects the whole regime default
        // (supercritical tightens sampling and arms the auto dt floor).
        cfg = default_scenario(f.mass_set ? classify_mass(f.mass)
                                          : MassRegime::subcritical);
        if (f.mass_set) cfg.mass = f.mass;
    } else {
        cfg = scenario_from_keys(parse_config_file(f.config));
        if (f.mass_set) {
            cfg.mass = f.mass;
            cfg.regime = classify_mass(f.mass);
        }
    }
    if (f.grid_n_set) cfg.grid_n = f.grid_n;
    if (f.grid_l_set) cfg.half_width = f.grid_l;
    if (f.t_end_set) cfg.t_end = f.t_end;
    if (f.seed_set) cfg.seed = f.seed;
    if (!f.out.empty()) cfg.out_dir = f.out;
    validate(cfg);
    return cfg;
}

void print_run_summary(const RunSummary& rs) {
    std::printf("regime        %s  (M = %.6g, M/8pi = %.4f)\n",
                regime_name(rs.config.regime), rs.resolved_mass,
                rs.resolved_mass / (8 * std::numbers::pi));
    std::printf("grid          n = %d, L = %g, dx = %.4g\n", rs.resolved_grid_n,
                rs.resolved_half_width,
                2 * rs.resolved_half_width / rs.resolved_grid_n);
    std::printf("termination   %s at t = %.6g  (%ld steps, %.2fs)\n",
                rs.termination.c_str(), rs.records.back().t, rs.total_steps,
                rs.wall_seconds);
    if (!rs.error_message.empty())
        std::printf("error         %s\n", rs.error_message.c_str());
    if (rs.blowup.suspected)
        std::printf("blow-up       suspected at t = %.6g\n                %s\n",
                    rs.blowup.time, rs.blowup.detail.c_str());
    std::printf("mass drift    %.3e   boundary loss %.3e   clamp add %.3e\n",
                rs.mass_drift, rs.boundary_mass_lost, rs.clamp_mass_added);
    std::printf("virial slope  predicted %.6g   measured %.6g\n",
                rs.predicted_initial_slope, rs.measured_initial_slope);
    std::printf("E0 = %.6g    monitor tol = %.3g\n", rs.e0, rs.monitor_tol);
    std::printf("%-28s %12s %9s  %s\n", "monitor", "worst slack", "t", "status");
    for (const auto& m : rs.monitors)
        std::printf("%-28s %12.4g %9.3g  %s\n", m.name.c_str(), m.worst_slack,
                    m.worst_time,
                    !m.applicable ? "not applicable" : (m.pass ? "pass" : "FAIL"));
    std::printf("monitors      %s\n", rs.monitors_all_pass ? "all pass" : "FAILURES");
    std::printf("entropy fit   alpha = %.4g, C = %.4g, rms = %.3g, n = %d%s\n",
                rs.entropy_fit.alpha, rs.entropy_fit.coeff, rs.entropy_fit.rms,
                rs.entropy_fit.n_used,
                rs.entropy_fit.hypothesis_ok ? "" : "  (fit not usable)");
    if (rs.config.regime == MassRegime::supercritical)
        std::printf("latest blow-up time bound T* = %.6g  (cap alpha %.3g, C %.3g)\n",
                    rs.predicted_latest_time, rs.cap_alpha, rs.cap_coeff);
    if (!rs.csv_path.empty())
        std::printf("wrote         %s\n              %s\n", rs.csv_path.c_str(),
                    rs.summary_path.c_str());
}

int cmd_run(const CommonFlags& f) {
    ScenarioConfig cfg = build_config(f);
    RunSummary rs = run_scenario(cfg);
    print_run_summary(rs);
    return rs.termination == "error" ? 2 : 0;
}

int cmd_sweep(const CommonFlags& f, std::vector<double> masses) {
    ScenarioConfig base = f.config.empty()
                              ? default_scenario(MassRegime::subcritical)
                              : scenario_from_keys(parse_config_file(f.config));
    // sweep defaults favor breadth over depth: short horizon, modest grid
    if (f.config.empty()) {
        base.t_end = 1.0;
        base.half_width = 8.0;
        base.grid_n = 128;
    }
    if (f.grid_n_set) base.grid_n = f.grid_n;
    if (f.grid_l_set) base.half_width = f.grid_l;
    if (f.t_end_set) base.t_end = f.t_end;
    if (f.seed_set) base.seed = f.seed;
    if (f.mass_set)
        throw CLI::ValidationError("--mass", "use --masses for the sweep ladder");
    if (masses.empty()) {
        const double pi = std::numbers::pi;
        masses = {4 * pi, 6 * pi, 8 * pi, 10 * pi, 16 * pi};
    }

    SweepReport sr = sweep_masses(base, masses);
    std::printf("%10s %9s %14s %16s %16s %12s  %s\n", "mass", "M/8pi", "regime",
                "predicted slope", "measured slope", "x2 change", "termination");
    for (const auto& r : sr.rows)
        std::printf("%10.5g %9.4f %14s %16.6g %16.6g %12.5g  %s\n", r.mass,
                    r.mass_ratio, r.regime.c_str(), r.predicted_slope,
                    r.measured_slope, r.x2_change, r.termination.c_str());
    std::string out = f.out.empty() ? "out" : f.out;
    std::filesystem::create_directories(out);
    std::string path = (std::filesystem::path(out) / "sweep.csv").string();
    write_sweep_csv(path, sr);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_compare(const CommonFlags& f, std::vector<int> sizes, int replicas) {
    ScenarioConfig cfg = f.config.empty()
                             ? default_scenario(MassRegime::subcritical)
                             : scenario_from_keys(parse_config_file(f.config));
    if (f.config.empty()) {
        cfg.t_end = 0.5;      // short-horizon default
        cfg.half_width = 8.0; // tight box: the fluid grid is the accuracy limit
    }
    if (f.mass_set) {
        cfg.mass = f.mass;
        cfg.regime = classify_mass(f.mass);
    }
    if (f.grid_n_set) cfg.grid_n = f.grid_n;
    if (f.grid_l_set) cfg.half_width = f.grid_l;
    if (f.t_end_set) cfg.t_end = f.t_end;
    if (f.seed_set) cfg.seed = f.seed;
    if (replicas > 0) cfg.compare_replicas = replicas;
    validate(cfg);
    if (sizes.empty()) sizes = {1000, 4000, 16000};

    CompareReport cr = compare_fluid_particles(cfg, sizes);
    std::printf("mode %s, M = %.6g, t_end = %g, seed = %llu, replicas = %d\n",
                cfg.compare_thermal ? "thermal" : "cold", cfg.resolved_mass(),
                cfg.t_end, static_cast<unsigned long long>(cfg.seed),
                cfg.compare_replicas);
    std::printf("%12s %12s %12s %12s\n", "N", "x2 gap", "xm gap", "k gap");
    for (const auto& s : cr.series)
        std::printf("%12d %12.5g %12.5g %12.5g\n", s.n_particles, s.x2_gap,
                    s.xm_gap, s.k_gap);
    std::printf("x2 gap decreasing with N: %s\n",
                cr.x2_gap_decreasing ? "yes" : "NO");
    std::string out = f.out.empty() ? "out" : f.out;
    std::filesystem::create_directories(out);
    std::string csv = (std::filesystem::path(out) / "compare.csv").string();
    std::string js = (std::filesystem::path(out) / "compare.json").string();
    write_compare_csv(csv, cr);
    write_compare_json(js, cr);
    std::printf("wrote %s\n      %s\n", csv.c_str(), js.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D laboratory for the damped isothermal Euler system with an "
                 "attractive free-space potential"};
    app.require_subcommand(1);

    CommonFlags rf, sf, cf;
    std::vector<double> sweep_mass_list;
    std::vector<int> compare_sizes;
    int compare_replicas = 0;

    CLI::App* run = app.add_subcommand("run", "integrate one scenario");
    add_common_flags(run, rf);

    CLI::App* sweep = app.add_subcommand("sweep", "mass ladder across 8 pi");
    add_common_flags(sweep, sf);
    sweep->add_option("--masses", sweep_mass_list, "explicit mass list");

    CLI::App* compare =
        app.add_subcommand("compare", "fluid vs mean-field particle ensembles");
    add_common_flags(compare, cf);
    compare->add_option("--particles", compare_sizes, "ensemble sizes");
    compare->add_option("--replicas", compare_replicas,
                        "independent redraws averaged per size");

    CLI::App* check = app.add_subcommand("check", "fast self-check suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(rf);
        if (sweep->parsed()) return cmd_sweep(sf, sweep_mass_list);
        if (compare->parsed()) return cmd_compare(cf, compare_sizes, compare_replicas);
        if (check->parsed()) {
            int fails = ksfluid::run_self_check(std::cout);
            std::printf("%s (%d failure%s)\n", fails == 0 ? "all checks passed" : "CHECK FAILED",
                        fails, fails == 1 ? "" : "s");
            return fails == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
