// Free-space Poisson solver for the attractive coupling -Lap(Phi) = rho on
// [-L, L]^2 with open (non-periodic) boundary, i.e.
//
//   Phi(x)  = -(1/2pi) sum_cells log|x - y| rho(y) dx^2
//   dPhi(x) = -(1/2pi) sum_cells (x - y)/|x - y|^2 rho(y) dx^2
//
// The log kernel is integrable at the origin, so the self-cell term uses the
// exact cell average of log|x| over a square of side h:
//   (1/h^2) int log|x| = log(h/sqrt(2)) + pi/4 - 3/2,
// which is the sample log(r_eff) with r_eff = (h/sqrt(2)) exp(pi/4 - 3/2).
// The gradient kernel is odd, so its self-cell average vanishes.
//
// Two routes share these kernel samples exactly:
//   solve_direct  O(n^4) summation, the reference
//   PoissonSolver O(n^2 log n) via zero-padded FFT convolution on a (2n)^2
//                 extension (Hockney), identical up to FFT roundoff
#pragma once

#include "ksfluid/grid.hpp"

#include <memory>

namespace ksfluid {

// Point value equivalent to the exact self-cell average of log|x|.
double self_cell_radius(double dx);

// Kernel samples at displacement r = x - y; h is the cell side.
double log_kernel(double rx, double ry, double h);
Vec2 grad_kernel(double rx, double ry);

struct PoissonSolution {
    ScalarField phi;   // potential
    VectorField grad;  // attraction field dPhi, from the odd kernel directly
};

// Reference direct summation. Cost O(n^4); fine up to n ~ 128.
PoissonSolution solve_direct(const ScalarField& rho);

// FFT-convolution solver. Kernel spectra and plans are cached per grid, so
// reuse one instance across steps. Instances are not safe for concurrent use.
class PoissonSolver {
  public:
    explicit PoissonSolver(const GridSpec& g);
    ~PoissonSolver();
    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    const GridSpec& grid() const;
    PoissonSolution solve(const ScalarField& rho) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around PoissonSolver.
PoissonSolution solve_fft(const ScalarField& rho);

// W(rho) = int rho Phi dx, the (positive-for-clustered) interaction energy.
// Equals -(1/2pi) int int rho(x) rho(y) log|x-y|.
double interaction_energy(const ScalarField& rho, const PoissonSolution& sol);

// Max over interior cells of |Lap_h phi + rho| with the 5-point Laplacian;
// consistency diagnostic, O(dx^2) for smooth rho.
double laplacian_residual(const ScalarField& rho, const ScalarField& phi);

}  // namespace ksfluid
