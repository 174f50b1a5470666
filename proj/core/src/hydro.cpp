#include "ksfluid/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ksfluid {

namespace {

inline double minmod(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::min(a, b);
    if (a < 0.0 && b < 0.0) return std::max(a, b);
    return 0.0;
}

inline double wave_speed(const Cons3& u, Axis axis, const ModelParams& par) {
    Vec2 v = velocity(u.rho, {u.mx, u.my}, par);
    double un = (axis == Axis::x) ? v.x : v.y;
    return std::abs(un) + par.sound_speed;
}

struct StageRhs {
    std::vector<double> drho, dmx, dmy;
    double max_speed = 0.0;
    double boundary_flux = 0.0;  // outward mass flux rate through the box edge
};

// Flux divergence + gravity source for one stage. grad may be null when the
// gravity toggle is off.
StageRhs stage_rhs(const ScalarField& rho, const VectorField& mom,
                   const VectorField* grad, const ModelParams& par,
                   const SourceToggles& tog) {
    const GridSpec& g = rho.grid;
    const int n = g.n;
    const double inv_dx = 1.0 / g.dx;

    StageRhs out;
    out.drho.assign(g.cells(), 0.0);
    out.dmx.assign(g.cells(), 0.0);
    out.dmy.assign(g.cells(), 0.0);

    // Padded line with two zero-gradient ghosts per side; minmod slopes on
    // the conserved variables, faces fed with the reconstructed states.
    const int np = n + 4;
    std::vector<double> lr(np), lmx(np), lmy(np), sr(np), smx(np), smy(np);

    auto sweep = [&](Axis axis) {
        for (int line = 0; line < n; ++line) {
            for (int p = 0; p < np; ++p) {
                int c = std::clamp(p - 2, 0, n - 1);
                std::size_t k = (axis == Axis::x) ? g.index(c, line) : g.index(line, c);
                lr[p] = rho.values[k];
                lmx[p] = mom.x[k];
                lmy[p] = mom.y[k];
            }
            for (int p = 1; p < np - 1; ++p) {
                sr[p] = minmod(lr[p] - lr[p - 1], lr[p + 1] - lr[p]);
                smx[p] = minmod(lmx[p] - lmx[p - 1], lmx[p + 1] - lmx[p]);
                smy[p] = minmod(lmy[p] - lmy[p - 1], lmy[p + 1] - lmy[p]);
            }
            for (int f = 0; f <= n; ++f) {
                int pl = f + 1, pr = f + 2;
                Cons3 ul{std::max(lr[pl] + 0.5 * sr[pl], par.rho_floor),
                         lmx[pl] + 0.5 * smx[pl], lmy[pl] + 0.5 * smy[pl]};
                Cons3 ur{std::max(lr[pr] - 0.5 * sr[pr], par.rho_floor),
                         lmx[pr] - 0.5 * smx[pr], lmy[pr] - 0.5 * smy[pr]};
                FluxTriple fl = rusanov_flux(ul, ur, axis, par, tog.pressure);
                out.max_speed = std::max(out.max_speed,
                                         std::max(wave_speed(ul, axis, par),
                                                  wave_speed(ur, axis, par)));
                if (f == 0) out.boundary_flux -= fl.rho * g.dx;
                if (f == n) out.boundary_flux += fl.rho * g.dx;
                if (f > 0) {  // right face of cell f-1
                    std::size_t k = (axis == Axis::x) ? g.index(f - 1, line)
                                                      : g.index(line, f - 1);
                    out.drho[k] -= fl.rho * inv_dx;
                    out.dmx[k] -= fl.mx * inv_dx;
                    out.dmy[k] -= fl.my * inv_dx;
                }
                if (f < n) {  // left face of cell f
                    std::size_t k = (axis == Axis::x) ? g.index(f, line)
                                                      : g.index(line, f);
                    out.drho[k] += fl.rho * inv_dx;
                    out.dmx[k] += fl.mx * inv_dx;
                    out.dmy[k] += fl.my * inv_dx;
                }
            }
        }
    };
    sweep(Axis::x);
    sweep(Axis::y);

    if (tog.gravity && grad) {
        const std::size_t nc = g.cells();
        for (std::size_t k = 0; k < nc; ++k) {
            out.dmx[k] += rho.values[k] * grad->x[k];
            out.dmy[k] += rho.values[k] * grad->y[k];
        }
    }
    return out;
}

}  // namespace

FluxTriple physical_flux(const Cons3& u, Axis axis, const ModelParams& par,
                         bool pressure_on) {
    Vec2 v = velocity(u.rho, {u.mx, u.my}, par);
    double un = (axis == Axis::x) ? v.x : v.y;
    double mn = (axis == Axis::x) ? u.mx : u.my;
    FluxTriple f;
    f.rho = mn;
    f.mx = u.mx * un;
    f.my = u.my * un;
    if (pressure_on) {
        double p = par.sound_speed * par.sound_speed * u.rho;
        if (axis == Axis::x)
            f.mx += p;
        else
            f.my += p;
    }
    return f;
}

FluxTriple rusanov_flux(const Cons3& left, const Cons3& right, Axis axis,
                        const ModelParams& par, bool pressure_on) {
    FluxTriple fl = physical_flux(left, axis, par, pressure_on);
    FluxTriple fr = physical_flux(right, axis, par, pressure_on);
    double s = std::max(wave_speed(left, axis, par), wave_speed(right, axis, par));
    FluxTriple f;
    f.rho = 0.5 * (fl.rho + fr.rho) - 0.5 * s * (right.rho - left.rho);
    f.mx = 0.5 * (fl.mx + fr.mx) - 0.5 * s * (right.mx - left.mx);
    f.my = 0.5 * (fl.my + fr.my) - 0.5 * s * (right.my - left.my);
    return f;
}

double cfl_dt(const FluidState& s, const ModelParams& par, double cfl, double dt_min) {
    const std::size_t nc = s.grid().cells();
    double smax = 0.0;
    for (std::size_t k = 0; k < nc; ++k) {
        Vec2 v = velocity(s.rho.values[k], {s.mom.x[k], s.mom.y[k]}, par);
        if (!std::isfinite(v.x) || !std::isfinite(v.y))
            throw std::invalid_argument("cfl_dt: non-finite velocity in state");
        smax = std::max(smax, std::max(std::abs(v.x), std::abs(v.y)) + par.sound_speed);
    }
    double dt = cfl * s.grid().dx / smax;
    if (dt < dt_min)
        throw BlowupSuspected("cfl_dt: dt " + std::to_string(dt) + " below floor " +
                                  std::to_string(dt_min) + ", wave speeds diverging",
                              dt);
    return dt;
}

StepResult step(const FluidState& s, const PoissonSolver& solver,
                const ModelParams& par, double dt, const SourceToggles& tog) {
    return step(
        s, [&solver](const ScalarField& rho) { return solver.solve(rho); }, par, dt,
        tog);
}

StepResult step(const FluidState& s, const PoissonCallback& solve,
                const ModelParams& par, double dt, const SourceToggles& tog) {
    const GridSpec& g = s.grid();
    const std::size_t nc = g.cells();
    const double decay = std::exp(-par.friction * dt);

    PoissonSolution pot1;
    if (tog.gravity) pot1 = solve(s.rho);
    StageRhs k1 = stage_rhs(s.rho, s.mom, tog.gravity ? &pot1.grad : nullptr, par, tog);

    // predictor, with the friction integrating factor applied to momentum
    FluidState mid(g);
    mid.time = s.time + dt;
    for (std::size_t k = 0; k < nc; ++k) {
        mid.rho.values[k] = std::max(s.rho.values[k] + dt * k1.drho[k], par.rho_floor);
        mid.mom.x[k] = decay * (s.mom.x[k] + dt * k1.dmx[k]);
        mid.mom.y[k] = decay * (s.mom.y[k] + dt * k1.dmy[k]);
    }

    PoissonSolution pot2;
    if (tog.gravity) pot2 = solve(mid.rho);
    StageRhs k2 = stage_rhs(mid.rho, mid.mom, tog.gravity ? &pot2.grad : nullptr, par, tog);

    StepResult res{FluidState(g), StepReport{}};
    res.state.time = s.time + dt;
    res.report.dt = dt;
    res.report.max_wave_speed = std::max(k1.max_speed, k2.max_speed);
    res.report.boundary_mass_flux = 0.5 * dt * (k1.boundary_flux + k2.boundary_flux);

    for (std::size_t k = 0; k < nc; ++k) {
        double r = s.rho.values[k] + 0.5 * dt * (k1.drho[k] + k2.drho[k]);
        if (r < par.rho_floor) {
            res.report.clamp_count += 1;
            res.report.clamp_mass_added += (par.rho_floor - r) * g.cell_area();
            r = par.rho_floor;
        }
        res.state.rho.values[k] = r;
        res.state.mom.x[k] =
            decay * s.mom.x[k] + 0.5 * dt * (decay * k1.dmx[k] + k2.dmx[k]);
        res.state.mom.y[k] =
            decay * s.mom.y[k] + 0.5 * dt * (decay * k1.dmy[k] + k2.dmy[k]);
    }

    if (!res.state.rho.all_finite() || !res.state.mom.all_finite())
        throw StepError("step: non-finite state after update at t = " +
                            std::to_string(res.state.time),
                        res.report);

    res.report.entropy_production = total_entropy_functional(res.state, par) -
                                    total_entropy_functional(s, par);
    return res;
}

EntropyPair entropy_pair(const FluidState& s, const ModelParams& par) {
    const GridSpec& g = s.grid();
    EntropyPair out{ScalarField(g), VectorField(g)};
    const std::size_t nc = g.cells();
    for (std::size_t k = 0; k < nc; ++k) {
        double r = std::max(s.rho.values[k], par.rho_floor);
        double mx = s.mom.x[k], my = s.mom.y[k];
        double m2 = mx * mx + my * my;
        double lg = std::log(r);
        out.eta.values[k] = m2 / r + 2.0 * r * lg;
        double wq = m2 / (r * r) + 2.0 * lg + 2.0;
        out.q.x[k] = wq * mx;
        out.q.y[k] = wq * my;
    }
    return out;
}

double total_entropy_functional(const FluidState& s, const ModelParams& par) {
    KahanSum sum;
    const std::size_t nc = s.grid().cells();
    for (std::size_t k = 0; k < nc; ++k) {
        double r = std::max(s.rho.values[k], par.rho_floor);
        double mx = s.mom.x[k], my = s.mom.y[k];
        sum.add((mx * mx + my * my) / r + 2.0 * r * std::log(r));
    }
    return sum.value() * s.grid().cell_area();
}

double entropy_inequality_residual(double eta_before, double eta_after,
                                   double w_before, double w_after,
                                   double kinetic_before, double kinetic_after,
                                   double dt) {
    double lhs = (eta_after - eta_before) / dt;
    double rhs = (w_after - w_before) / dt - (kinetic_before + kinetic_after);
    return lhs - rhs;
}

double entropy_inequality_residual(const FluidState& before, const FluidState& after,
                                   const PoissonSolver& solver, const ModelParams& par,
                                   double dt) {
    auto kinetic = [&](const FluidState& s) {
        KahanSum sum;
        const std::size_t nc = s.grid().cells();
        for (std::size_t k = 0; k < nc; ++k) {
            double r = std::max(s.rho.values[k], par.rho_floor);
            double mx = s.mom.x[k], my = s.mom.y[k];
            sum.add((mx * mx + my * my) / r);
        }
        return sum.value() * s.grid().cell_area();
    };
    double wb = interaction_energy(before.rho, solver.solve(before.rho));
    double wa = interaction_energy(after.rho, solver.solve(after.rho));
    return entropy_inequality_residual(total_entropy_functional(before, par),
                                       total_entropy_functional(after, par), wb, wa,
                                       kinetic(before), kinetic(after), dt);
}

}  // namespace ksfluid
