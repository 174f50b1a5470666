#include "ksfluid/functionals.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ksfluid {

DiagnosticsRecord diagnostics(const FluidState& s, const PoissonSolution& pot,
                              const ModelParams& par, double dissipation,
                              double dt_at_sample) {
    const GridSpec& g = s.grid();
    DiagnosticsRecord r;
    r.t = s.time;
    r.dissipation = dissipation;
    r.dt = dt_at_sample;

    KahanSum mass, x2, xm, kin, ent, inter;
    for (int j = 0; j < g.n; ++j) {
        double y = g.cell_y(j);
        for (int i = 0; i < g.n; ++i) {
            double x = g.cell_x(i);
            std::size_t k = g.index(i, j);
            double rho = std::max(s.rho.values[k], par.rho_floor);
            double mx = s.mom.x[k], my = s.mom.y[k];
            mass.add(s.rho.values[k]);
            x2.add((x * x + y * y) * s.rho.values[k]);
            xm.add(2.0 * (x * mx + y * my));
            kin.add((mx * mx + my * my) / rho);
            ent.add(rho * std::log(rho));
            inter.add(s.rho.values[k] * pot.phi.values[k]);
        }
    }
    double w = g.cell_area();
    r.mass = mass.value() * w;
    r.second_moment = x2.value() * w;
    r.cross_moment = xm.value() * w;
    r.kinetic = kin.value() * w;
    r.entropy = ent.value() * w;
    r.interaction = inter.value() * w;
    r.log_hls = loghls_functional(r.entropy, r.interaction, r.mass);
    r.rho_max = s.rho.max_value();
    return r;
}

double kinetic_energy(const FluidState& s, const ModelParams& par) {
    KahanSum kin;
    for (std::size_t k = 0; k < s.rho.values.size(); ++k) {
        double rho = std::max(s.rho.values[k], par.rho_floor);
        double mx = s.mom.x[k], my = s.mom.y[k];
        kin.add((mx * mx + my * my) / rho);
    }
    return kin.value() * s.grid().cell_area();
}

double loghls_constant(double mass) {
    if (!(mass > 0.0)) throw std::invalid_argument("loghls_constant: mass must be positive");
    return mass * (1.0 + std::log(std::numbers::pi) - std::log(mass));
}

double loghls_functional(double entropy, double interaction, double mass) {
    return entropy - 4.0 * std::numbers::pi / mass * interaction;
}

double virial_rhs(double mass, double kinetic) {
    return 4.0 * mass * (1.0 - mass / (8.0 * std::numbers::pi)) + 2.0 * kinetic;
}

double integrated_virial_residual(const DiagnosticsRecord& first,
                                  const DiagnosticsRecord& last) {
    double drift = 4.0 * last.mass * (1.0 - last.mass / (8.0 * std::numbers::pi));
    return (last.second_moment + last.cross_moment) -
           (first.second_moment + first.cross_moment) - drift * (last.t - first.t) -
           (last.dissipation - first.dissipation);
}

void fill_virial_residuals(std::vector<DiagnosticsRecord>& recs) {
    if (recs.size() < 2)
        throw std::invalid_argument("fill_virial_residuals: need >= 2 records");
    auto combined = [&](std::size_t k) {
        return recs[k].second_moment + recs[k].cross_moment;
    };
    for (std::size_t k = 0; k < recs.size(); ++k) {
        std::size_t lo = (k == 0) ? 0 : k - 1;
        std::size_t hi = (k + 1 == recs.size()) ? k : k + 1;
        double slope = (combined(hi) - combined(lo)) / (recs[hi].t - recs[lo].t);
        recs[k].virial_residual = slope - virial_rhs(recs[k].mass, recs[k].kinetic);
    }
}

double initial_energy(const DiagnosticsRecord& rec0) {
    return 3.0 * (rec0.kinetic + 2.0 * rec0.entropy - rec0.interaction) +
           rec0.second_moment + rec0.cross_moment;
}

EntropyFit entropy_growth_fit(const std::vector<DiagnosticsRecord>& recs) {
    if (recs.empty()) throw std::invalid_argument("entropy_growth_fit: empty trajectory");
    const double s0 = recs.front().entropy;

    // linear regression of y = log(S - S0 + 1) on x = log t
    KahanSum sx, sy, sxx, sxy;
    int n = 0;
    for (const auto& r : recs) {
        if (!(r.t > 0.0) || !(r.entropy > s0)) continue;
        double x = std::log(r.t);
        double y = std::log(r.entropy - s0 + 1.0);
        sx.add(x);
        sy.add(y);
        sxx.add(x * x);
        sxy.add(x * y);
        ++n;
    }
    EntropyFit fit;
    fit.n_used = n;
    if (n < 10) return fit;  // hypothesis_ok stays false

    double det = n * sxx.value() - sx.value() * sx.value();
    if (std::abs(det) < 1e-300) throw std::invalid_argument("entropy_growth_fit: degenerate window");
    fit.alpha = (n * sxy.value() - sx.value() * sy.value()) / det;
    double intercept = (sy.value() - fit.alpha * sx.value()) / n;
    fit.coeff = std::exp(intercept);

    KahanSum res2;
    for (const auto& r : recs) {
        if (!(r.t > 0.0) || !(r.entropy > s0)) continue;
        double e = std::log(r.entropy - s0 + 1.0) - (intercept + fit.alpha * std::log(r.t));
        res2.add(e * e);
    }
    fit.rms = std::sqrt(res2.value() / n);
    fit.hypothesis_ok = fit.alpha > 0.0 && fit.alpha < 0.95;
    return fit;
}

}  // namespace ksfluid
