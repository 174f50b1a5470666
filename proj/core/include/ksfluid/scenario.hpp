// Scenario configuration: regime presets, flat key=value config files, and
// validation. The three regimes differ by total mass relative to the critical
// value 8 pi and carry tuned default grids (see default_scenario).
#pragma once

#include "ksfluid/monitors.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace ksfluid {

struct ScenarioConfig {
    MassRegime regime = MassRegime::subcritical;
    double mass = 0.0;          // 0 = use the regime default
    double half_width = 0.0;    // L; 0 = regime default
    int grid_n = 0;             // 0 = regime default

    // initial data: Gaussian bump, optionally drifting
    double sigma = 1.0;
    double center_x = 0.0, center_y = 0.0;
    double bulk_ux = 0.0, bulk_uy = 0.0;

    double cfl = 0.4;
    double t_end = 5.0;
    double sample_interval = 0.05;
    double snapshot_interval = 0.0;  // 0 = initial + final only

    std::string out_dir = "out";
    std::uint64_t seed = 12345;

    bool particles_enabled = false;
    int particle_count = 4000;
    double relax_time = 1.0;
    // Fluid-particle comparison mode. false (default): cold particles against
    // the pressureless fluid, the pair that actually share a mean-field limit,
    // so the N-trend of the gap measures Monte-Carlo convergence. true:
    // unit-temperature Maxwellian particles against the full isothermal fluid;
    // physically richer but carries an N-independent closure drift.
    bool compare_thermal = false;
    // Independent particle redraws averaged in the comparison report. The
    // per-draw sup-t gap in X2 is a half-normal-ish variate with sd ~ 1/sqrt(N);
    // averaging replicas turns its 1/sqrt(N) decrease from a coin flip into a
    // multi-sigma certainty while the fluid leg is reused.
    int compare_replicas = 12;

    enum class Solver { fft, direct };
    Solver solver = Solver::fft;

    // cfl_dt hard floor. 0 = auto: cfl*dx/(1 + blowup_speed), so the floor
    // trips (BlowupSuspected) once the peak flow speed exceeds blowup_speed.
    // Healthy spreading flows stay near |u| ~ 2; a collapsing core pushes past
    // 4, so 3.5 separates them with margin on either side.
    double dt_min = 1e-10;
    double blowup_speed = 3.5;

    // resolved values (after apply_regime_defaults)
    double resolved_mass() const;
    double resolved_half_width() const;
    int resolved_grid_n() const;
    double resolved_dt_min() const;
};

// Fill mass/grid defaults for a regime: subcritical 4pi on [-16,16]^2 n=256,
// critical 8pi on [-16,16]^2 n=256, supercritical 16pi on [-7,7]^2 n=256 with
// auto dt_min and sample_interval 0.02.
ScenarioConfig default_scenario(MassRegime regime);

// Parse "key = value" lines ('#' comments, blank lines ok). Unknown keys and
// malformed lines throw std::runtime_error naming the line.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Build a config from parsed keys on top of regime defaults. Checks that the
// mass matches the declared regime and that numeric fields are sane.
ScenarioConfig scenario_from_keys(const std::map<std::string, std::string>& kv);

// Validation used by both the file path and CLI overrides; throws
// std::invalid_argument with the offending field.
void validate(const ScenarioConfig& cfg);

const char* regime_name(MassRegime r);
MassRegime regime_from_name(const std::string& s);

}  // namespace ksfluid
