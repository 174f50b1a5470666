#include "ksfluid/scenario.hpp"

#include "ksfluid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ksfluid {

namespace {

const double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad number for '" + key + "': " + v);
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad integer for '" + key + "': " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw std::runtime_error("config: bad flag for '" + key + "': " + v);
}

}  // namespace

double ScenarioConfig::resolved_mass() const {
    if (mass > 0) return mass;
    switch (regime) {
        case MassRegime::subcritical: return 4 * kPi;
        case MassRegime::critical: return 8 * kPi;
        case MassRegime::supercritical: return 16 * kPi;
    }
    throw std::logic_error("bad regime");
}

double ScenarioConfig::resolved_half_width() const {
    if (half_width > 0) return half_width;
    // sub/critical boxes sized so the outward tail wave does not reach the
    // boundary by T = 5 (cumulative outflow < 1e-6 M); the supercritical box
    // only has to hold the initial tail below 1e-8 M before collapse.
    switch (regime) {
        case MassRegime::subcritical: return 16.0;
        case MassRegime::critical: return 16.0;
        case MassRegime::supercritical: return 7.0;
    }
    throw std::logic_error("bad regime");
}

int ScenarioConfig::resolved_grid_n() const {
    if (grid_n > 0) return grid_n;
    return 256;
}

double ScenarioConfig::resolved_dt_min() const {
    if (dt_min > 0) return dt_min;
    double dx = 2.0 * resolved_half_width() / resolved_grid_n();
    return cfl * dx / (1.0 + blowup_speed);
}

ScenarioConfig default_scenario(MassRegime regime) {
    ScenarioConfig cfg;
    cfg.regime = regime;
    if (regime == MassRegime::supercritical) {
        cfg.sample_interval = 0.02;  // collapse is fast; resolve the tail
        cfg.dt_min = 0.0;            // auto: tie the floor to blowup_speed
    }
    validate(cfg);
    return cfg;
}

const char* regime_name(MassRegime r) {
    switch (r) {
        case MassRegime::subcritical: return "subcritical";
        case MassRegime::critical: return "critical";
        case MassRegime::supercritical: return "supercritical";
    }
    throw std::logic_error("bad regime");
}

MassRegime regime_from_name(const std::string& s) {
    if (s == "subcritical") return MassRegime::subcritical;
    if (s == "critical") return MassRegime::critical;
    if (s == "supercritical") return MassRegime::supercritical;
    throw std::runtime_error("config: unknown regime '" + s + "'");
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not 'key = value': " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " has empty key or value");
        if (kv.count(key))
            throw std::runtime_error("config: duplicate key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

ScenarioConfig scenario_from_keys(const std::map<std::string, std::string>& kv) {
    static const std::set<std::string> known = {
        "regime",        "mass",          "grid_n",        "grid_l",
        "sigma",         "center_x",      "center_y",      "bulk_ux",
        "bulk_uy",       "cfl",           "t_end",         "sample_interval",
        "snapshot_interval", "out_dir",   "seed",          "particles",
        "particle_count", "relax_time",   "compare_thermal", "compare_replicas",
        "solver",        "dt_min",        "blowup_speed"};
    for (const auto& [k, v] : kv)
        if (!known.count(k)) throw std::runtime_error("config: unknown key '" + k + "'");

    auto get = [&](const char* k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };

    MassRegime regime = MassRegime::subcritical;
    bool regime_given = false;
    if (auto* v = get("regime")) {
        regime = regime_from_name(*v);
        regime_given = true;
    }
    double mass = 0.0;
    if (auto* v = get("mass")) mass = to_double("mass", *v);
    if (mass > 0 && !regime_given) regime = classify_mass(mass);

    ScenarioConfig cfg = default_scenario(regime);
    cfg.mass = mass;

    if (auto* v = get("grid_n")) cfg.grid_n = static_cast<int>(to_long("grid_n", *v));
    if (auto* v = get("grid_l")) cfg.half_width = to_double("grid_l", *v);
    if (auto* v = get("sigma")) cfg.sigma = to_double("sigma", *v);
    if (auto* v = get("center_x")) cfg.center_x = to_double("center_x", *v);
    if (auto* v = get("center_y")) cfg.center_y = to_double("center_y", *v);
    if (auto* v = get("bulk_ux")) cfg.bulk_ux = to_double("bulk_ux", *v);
    if (auto* v = get("bulk_uy")) cfg.bulk_uy = to_double("bulk_uy", *v);
    if (auto* v = get("cfl")) cfg.cfl = to_double("cfl", *v);
    if (auto* v = get("t_end")) cfg.t_end = to_double("t_end", *v);
    if (auto* v = get("sample_interval")) cfg.sample_interval = to_double("sample_interval", *v);
    if (auto* v = get("snapshot_interval")) cfg.snapshot_interval = to_double("snapshot_interval", *v);
    if (auto* v = get("out_dir")) cfg.out_dir = *v;
    if (auto* v = get("seed")) cfg.seed = static_cast<std::uint64_t>(to_long("seed", *v));
    if (auto* v = get("particles")) cfg.particles_enabled = to_bool("particles", *v);
    if (auto* v = get("particle_count"))
        cfg.particle_count = static_cast<int>(to_long("particle_count", *v));
    if (auto* v = get("relax_time")) cfg.relax_time = to_double("relax_time", *v);
    if (auto* v = get("compare_thermal")) cfg.compare_thermal = to_bool("compare_thermal", *v);
    if (auto* v = get("compare_replicas"))
        cfg.compare_replicas = static_cast<int>(to_long("compare_replicas", *v));
    if (auto* v = get("solver")) {
        if (*v == "fft") cfg.solver = ScenarioConfig::Solver::fft;
        else if (*v == "direct") cfg.solver = ScenarioConfig::Solver::direct;
        else throw std::runtime_error("config: solver must be fft or direct, got " + *v);
    }
    if (auto* v = get("dt_min")) {
        if (*v == "auto") cfg.dt_min = 0.0;
        else cfg.dt_min = to_double("dt_min", *v);
    }
    if (auto* v = get("blowup_speed")) cfg.blowup_speed = to_double("blowup_speed", *v);

    validate(cfg);
    return cfg;
}

void validate(const ScenarioConfig& cfg) {
    double M = cfg.resolved_mass();
    if (!(M > 0) || !std::isfinite(M))
        throw std::invalid_argument("scenario: mass must be positive");
    if (classify_mass(M) != cfg.regime)
        throw std::invalid_argument(
            "scenario: mass " + std::to_string(M) + " is " +
            regime_name(classify_mass(M)) + " but regime says " +
            regime_name(cfg.regime));
    // make_grid re-validates; catch obvious nonsense early with field names.
    if (cfg.half_width < 0 || !std::isfinite(cfg.half_width))
        throw std::invalid_argument("scenario: grid_l must be positive");
    if (cfg.grid_n < 0) throw std::invalid_argument("scenario: grid_n must be positive");
    if (cfg.grid_n > 0 && (cfg.grid_n < 8 || cfg.grid_n % 2 != 0))
        throw std::invalid_argument("scenario: grid_n must be even and >= 8");
    if (!(cfg.sigma > 0)) throw std::invalid_argument("scenario: sigma must be positive");
    if (!(cfg.cfl > 0) || cfg.cfl > 0.9)
        throw std::invalid_argument("scenario: cfl must lie in (0, 0.9]");
    if (!(cfg.t_end > 0)) throw std::invalid_argument("scenario: t_end must be positive");
    if (!(cfg.sample_interval > 0) || cfg.sample_interval > cfg.t_end)
        throw std::invalid_argument("scenario: sample_interval must lie in (0, t_end]");
    if (cfg.snapshot_interval < 0)
        throw std::invalid_argument("scenario: snapshot_interval must be >= 0");
    if (cfg.particle_count < 2)
        throw std::invalid_argument("scenario: particle_count must be >= 2");
    if (!(cfg.relax_time > 0))
        throw std::invalid_argument("scenario: relax_time must be positive");
    if (cfg.compare_replicas < 1 || cfg.compare_replicas > 1000)
        throw std::invalid_argument("scenario: compare_replicas must be in [1, 1000]");
    if (cfg.dt_min < 0)
        throw std::invalid_argument("scenario: dt_min must be >= 0 (0 = auto)");
    if (!(cfg.blowup_speed > 0))
        throw std::invalid_argument("scenario: blowup_speed must be positive");
    double L = cfg.resolved_half_width();
    int n = cfg.resolved_grid_n();
    make_grid(L, n);  // throws on bad combinations
    double max_center = std::max(std::abs(cfg.center_x), std::abs(cfg.center_y));
    if (L - max_center < 5 * cfg.sigma)
        throw std::invalid_argument(
            "scenario: bump too close to the boundary (need L - |center| >= 5 sigma)");
}

}  // namespace ksfluid
