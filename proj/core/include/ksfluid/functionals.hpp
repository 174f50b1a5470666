// Integral diagnostics of a fluid state and the identities built on them.
//
// Conventions (all integrals midpoint quadrature at cell centers):
//   M   = int rho                     mass
//   X2  = int |x|^2 rho               second moment
//   Xm  = int 2 x . m                 cross moment
//   K   = int |m|^2 / rho             kinetic functional
//   S   = int rho log rho             entropy
//   W   = int rho Phi                 interaction energy, = -(1/2pi) iint
//                                     rho(x) rho(y) log|x-y|
//   D(T)= int_0^T 2 K dt              accumulated dissipation
//   F   = S - (4pi/M) W               log-HLS combination, >= -C(M)
//
// The combined moment X2 + Xm obeys the exact identity
//   d/dt [X2 + Xm] = 4M(1 - M/8pi) + 2K,
// whose constant term changes sign at the critical mass 8pi.
#pragma once

#include "ksfluid/hydro.hpp"
#include "ksfluid/poisson.hpp"
#include "ksfluid/state.hpp"

#include <vector>

namespace ksfluid {

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double second_moment = 0.0;   // X2
    double cross_moment = 0.0;    // Xm
    double kinetic = 0.0;         // K
    double entropy = 0.0;         // S
    double interaction = 0.0;     // W
    double dissipation = 0.0;     // D, accumulated by the caller's time loop
    double log_hls = 0.0;         // F
    double virial_residual = 0.0; // filled by fill_virial_residuals
    double rho_max = 0.0;
    double dt = 0.0;              // step size in use when the sample was taken
};

// Evaluate every instantaneous functional. dissipation and dt are passed
// through from the caller's accounting.
DiagnosticsRecord diagnostics(const FluidState& s, const PoissonSolution& pot,
                              const ModelParams& par, double dissipation,
                              double dt_at_sample);

// K alone; cheap (no potential needed), used by the per-step dissipation
// accumulator.
double kinetic_energy(const FluidState& s, const ModelParams& par);

// C(M) = M (1 + log pi - log M), the sharp constant in S + (2/M) iint
// rho rho log|x-y| >= -C(M).
double loghls_constant(double mass);

// F = S - (4 pi / M) W.
double loghls_functional(double entropy, double interaction, double mass);

// 4M(1 - M/8pi) + 2K.
double virial_rhs(double mass, double kinetic);

// [X2+Xm](T) - [X2+Xm](0) - 4M(1-M/8pi)(T-t0) - [D(T)-D(t0)].
double integrated_virial_residual(const DiagnosticsRecord& first,
                                  const DiagnosticsRecord& last);

// Per-sample d/dt[X2+Xm] - virial_rhs by centered differences (one-sided at
// the ends). Needs >= 2 records.
void fill_virial_residuals(std::vector<DiagnosticsRecord>& recs);

// E0 = 3(K + 2S - W)(0) + X2(0) + Xm(0), the initial-data functional all the
// a priori envelopes are phrased in.
double initial_energy(const DiagnosticsRecord& rec0);

// Least-squares fit of log(S(t) - S(0) + 1) against log t over samples with
// t > 0 and S above S(0). Diagnoses the S(t) <= S(0) + C t^alpha growth
// hypothesis; hypothesis_ok is false when the fitted exponent leaves (0, 1)
// or too few samples qualify.
struct EntropyFit {
    double alpha = 0.0;
    double coeff = 0.0;   // C in S - S0 ~ C t^alpha
    double rms = 0.0;     // fit residual in log space
    int n_used = 0;
    bool hypothesis_ok = false;
};
EntropyFit entropy_growth_fit(const std::vector<DiagnosticsRecord>& recs);

}  // namespace ksfluid
