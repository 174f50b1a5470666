// Experiment driver: time loop with diagnostics sampling, bound monitoring,
// blow-up detection, and the file outputs (diagnostics.csv, summary.json,
// KSF1 snapshots). Also hosts the fluid-particle comparison, the mass sweep,
// and the fast self-check behind the `check` subcommand.
#pragma once

#include "ksfluid/functionals.hpp"
#include "ksfluid/monitors.hpp"
#include "ksfluid/scenario.hpp"
#include "ksfluid/state.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ksfluid {

struct BlowupSignal {
    bool suspected = false;
    double time = 0.0;
    std::string detail;
};

// Fires when, over the last five samples, X2+Xm is strictly decreasing AND
// rho_max exceeds 1e3 x its initial value AND the CFL step has fallen below
// 10 x dt_min. Returns an unsuspicious signal with fewer than five samples.
// The dt examined is the CFL-limited step (records[].dt), never the value
// clipped to land on a sample time.
BlowupSignal detect_blowup(const std::vector<DiagnosticsRecord>& records,
                           double rho_max_initial, double dt_min);

struct MonitorSummary {
    std::string name;
    double worst_slack = 0.0;  // min over samples of (rhs - lhs), sign per monitor
    double worst_time = 0.0;
    double tol = 0.0;
    bool applicable = false;   // side condition held on at least one sample
    bool pass = false;         // worst_slack >= -tol; never granted when
                               // inapplicable for the whole run
};

struct RunSummary {
    ScenarioConfig config;
    double resolved_mass = 0.0, resolved_half_width = 0.0, resolved_dt_min = 0.0;
    int resolved_grid_n = 0;

    std::string termination;  // "t_end" | "blowup_suspected" | "error"
    std::string error_message;
    long total_steps = 0;
    double wall_seconds = 0.0;

    std::vector<DiagnosticsRecord> records;
    // slack table row k corresponds to records[k]
    std::vector<std::vector<MonitorSlack>> slack_rows;
    std::vector<MonitorSummary> monitors;
    bool monitors_all_pass = false;
    double monitor_tol = 0.0;

    BoundConstants constants;
    double e0 = 0.0;

    double predicted_initial_slope = 0.0;  // 4M(1-M/8pi) + 2K(0)
    double measured_initial_slope = 0.0;   // secant of X2+Xm over [0, ~0.5]
    double integrated_virial_residual_value = 0.0;

    BlowupSignal blowup;
    EntropyFit entropy_fit;
    // entropy cap actually used for the latest-time prediction: the fitted
    // (alpha, C) when the fit is usable, otherwise alpha = 1/2 with the
    // smallest C such that S(t) <= S(0) + C t^alpha holds on every sample.
    double cap_alpha = 0.0, cap_coeff = 0.0;
    double predicted_latest_time = 0.0;  // NaN unless supercritical

    double boundary_mass_lost = 0.0;  // time-integrated outflow, sign = loss
    double clamp_mass_added = 0.0;
    double mass_drift = 0.0;          // final mass - initial mass

    std::string csv_path, summary_path;
    std::vector<std::string> snapshot_paths;
};

// Run the scenario and write diagnostics.csv / summary.json / snapshots under
// cfg.out_dir (set out_dir empty to skip all file output).
RunSummary run_scenario(const ScenarioConfig& cfg);

// Monitor tolerance: resolution-scaled cushion for quadrature and transport
// error, M * (0.5 dx + 0.5 dt).
double monitor_tolerance(double mass, double dx, double dt_typical);

void write_diagnostics_csv(const std::string& path, const RunSummary& rs);
void write_summary_json(const std::string& path, const RunSummary& rs);

// Fluid-particle comparison on one scenario across ensemble sizes. Particle
// ensembles are nested (prefixes of one antithetic sample, re-matched per
// size) so the Monte-Carlo error shrinks along the family. Default mode runs
// cold particles against the pressureless fluid (shared mean-field limit);
// cfg.compare_thermal = true instead runs Maxwellian particles against the
// full isothermal fluid.
struct CompareSeries {
    int n_particles = 0;
    std::vector<double> t;
    std::vector<double> x2_fluid, x2_part;
    std::vector<double> xm_fluid, xm_part;
    std::vector<double> k_fluid, k_part;
    double x2_gap = 0.0;  // max_t |fluid - particle| / fluid, X2 is positive
    double xm_gap = 0.0;  // max_t |diff| / max_t max(|fluid|, 1)
    double k_gap = 0.0;
};
struct CompareReport {
    ScenarioConfig config;
    std::vector<CompareSeries> series;  // ascending n_particles
    bool x2_gap_decreasing = false;
};
CompareReport compare_fluid_particles(const ScenarioConfig& cfg,
                                      const std::vector<int>& ensemble_sizes);
void write_compare_csv(const std::string& path, const CompareReport& cr);
void write_compare_json(const std::string& path, const CompareReport& cr);

// Short-horizon runs across a mass ladder; records the virial slope check and
// how each run ended.
struct SweepRow {
    double mass = 0.0;
    double mass_ratio = 0.0;  // M / 8pi
    std::string regime;
    double predicted_slope = 0.0;
    double measured_slope = 0.0;
    double x2_change = 0.0;
    double entropy_change = 0.0;
    std::string termination;
};
struct SweepReport {
    std::vector<SweepRow> rows;
};
SweepReport sweep_masses(const ScenarioConfig& base, const std::vector<double>& masses);
void write_sweep_csv(const std::string& path, const SweepReport& sr);

// Fast oracle suite behind `ksfluid check`; prints one line per check,
// returns the number of failures.
int run_self_check(std::ostream& out);

}  // namespace ksfluid
