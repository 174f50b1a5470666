// Fluid state (density + momentum) for the damped isothermal Euler system
// with self-attraction,
//   rho_t + div m = 0
//   m_t + div(m (x) m / rho) + grad rho = rho grad Phi - m,
// plus Gaussian initial data helpers and the desingularized velocity map.
#pragma once

#include "ksfluid/grid.hpp"

namespace ksfluid {

struct ModelParams {
    double friction = 1.0;      // linear damping coefficient on momentum
    double sound_speed = 1.0;   // isothermal pressure p = c^2 rho
    double rho_floor = 1e-12;   // density floor; see scaled()
    double eps_velocity = 1e-10;  // desingularization scale for u = m/rho

    // Floor scaled to the problem: 1e-12 * (M / L^2), i.e. twelve orders below
    // the mean density of mass M spread over the box.
    static ModelParams scaled(double total_mass, double half_width);
};

struct FluidState {
    ScalarField rho;
    VectorField mom;
    double time = 0.0;

    FluidState() = default;
    explicit FluidState(const GridSpec& g) : rho(g), mom(g) {}
    const GridSpec& grid() const { return rho.grid; }
};

// Desingularized velocity u = m rho / (rho^2 + eps^2). Equals m/rho to
// relative error eps^2/rho^2 and stays bounded by |m| / (2 eps) as rho -> 0.
inline Vec2 velocity(double rho, Vec2 m, const ModelParams& par) {
    double w = rho / (rho * rho + par.eps_velocity * par.eps_velocity);
    return {m.x * w, m.y * w};
}

Vec2 velocity(const FluidState& s, int i, int j, const ModelParams& par);
VectorField velocity_field(const FluidState& s, const ModelParams& par);

struct GaussianSpec {
    double mass = 1.0;
    double sigma = 1.0;
    Vec2 center{0.0, 0.0};
    Vec2 bulk_velocity{0.0, 0.0};  // m = rho * bulk_velocity
};

// Isotropic Gaussian rho = M/(2 pi sigma^2) exp(-|x-c|^2 / 2 sigma^2) sampled
// at cell centers, floored, then rescaled so the discrete mass is exactly M.
// Preconditions: sigma >= 2 dx (resolved) and L - max|c| >= 5 sigma (bulk in
// the box); violations throw std::invalid_argument naming the bad ratio.
// clamp_mass, when non-null, receives the mass added by flooring.
FluidState gaussian_state(const GridSpec& g, const GaussianSpec& spec,
                          const ModelParams& par, double* clamp_mass = nullptr);

}  // namespace ksfluid
