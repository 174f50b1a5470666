// Interacting particle system matching the fluid model in the mean field:
//
//   dX_i/dt = V_i
//   dV_i/dt = (M/N) sum_{j != i} f_eps(X_i - X_j) - V_i / tau
//   f_eps(r) = -r / (2 pi (|r|^2 + eps^2))
//
// The per-pair weight is mass/N (for unit total mass this is the plain 1/N
// mean-field scaling) so the empirical density reproduces the attraction of a
// mass-M fluid. Forces accumulate pairwise (i < j, action equals reaction),
// which makes total momentum decay exactly as exp(-t/tau).
//
// The ensemble obeys an exact moment identity mirroring the fluid one:
//   d/dt [X2 + Xm] = (1 - 1/tau) Xm + 2K - (M^2/(pi N^2)) sum_{i<j} s_ij,
//   s_ij = |r_ij|^2 / (|r_ij|^2 + eps^2),
// which tends to the fluid constant -M^2/(2 pi) as N grows and eps -> 0
// (thermal velocities at unit temperature supply the fluid's 4M pressure
// term through 2K).
#pragma once

#include "ksfluid/functionals.hpp"
#include "ksfluid/grid.hpp"
#include "ksfluid/state.hpp"

#include <cstdint>
#include <vector>

namespace ksfluid {

struct ParticleEnsemble {
    std::vector<double> x, y, vx, vy;
    double total_mass = 1.0;
    double relax_time = 1.0;  // tau
    double softening = 1e-3;  // eps

    std::size_t size() const { return x.size(); }
    double particle_mass() const { return total_mass / static_cast<double>(size()); }
};

// f_eps(r), the force a particle at displacement r away exerts; points from
// r back toward the origin (attraction). Odd in r; zero at coincidence.
Vec2 pair_force(Vec2 displacement, double eps);

// (M/N) sum_{j != i} pair_force(X_i - X_j), pairwise-symmetric accumulation.
void mean_field_forces(const ParticleEnsemble& e, std::vector<double>& fx,
                       std::vector<double>& fy);

// One step: V' = e^{-dt/tau} V + tau (1 - e^{-dt/tau}) F (exact for constant
// force), then X' = X + dt V'. Pre: 0 < dt <= 0.1 tau.
ParticleEnsemble ensemble_step(const ParticleEnsemble& e, double dt);

// Weighted empirical moments in DiagnosticsRecord form: mass, X2, Xm, K and
// rho_max-free fields; entropy/interaction are NaN (not defined for points).
DiagnosticsRecord empirical_moments(const ParticleEnsemble& e, double time);

// sum_{i<j} |r_ij|^2 / (|r_ij|^2 + eps^2), the softened pair count in the
// moment identity above.
double pairwise_virial_sum(const ParticleEnsemble& e);

// Cloud-in-cell deposition onto the grid; mass landing outside the box is
// dropped and reported.
struct DepositInfo {
    double out_of_box_mass = 0.0;
};
ScalarField deposit_density(const ParticleEnsemble& e, const GridSpec& g,
                            DepositInfo* info = nullptr);

struct SampleOptions {
    bool thermal = true;     // V = bulk + unit-temperature Maxwellian
    bool antithetic = true;  // draw in +/- pairs (requires even n)
};

// Draw n particles from the Gaussian; deterministic in seed.
ParticleEnsemble sample_gaussian_ensemble(const GaussianSpec& spec, std::size_t n,
                                          std::uint64_t seed, double softening,
                                          const SampleOptions& opts = {});

// Affinely adjust a sample so mean position/velocity match the Gaussian
// targets exactly; with scale_spread also X2 = M(2 sigma^2 + |c|^2), and when
// thermal additionally Xm = 2 M c.u and K = M(|u|^2 + 2). Full matching
// removes sampling scatter from coarse moments (useful for identity checks);
// convergence studies keep scale_spread off so the 1/sqrt(N) scatter that is
// being measured survives.
void match_moments(ParticleEnsemble& e, const GaussianSpec& spec, bool thermal,
                   bool scale_spread = true);

}  // namespace ksfluid
