#include "ksfluid/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ksfluid {

namespace {
constexpr double kInv2Pi = 1.0 / (2.0 * std::numbers::pi);
}

double self_cell_radius(double dx) {
    return dx / std::numbers::sqrt2 * std::exp(std::numbers::pi / 4.0 - 1.5);
}

double log_kernel(double rx, double ry, double h) {
    double r2 = rx * rx + ry * ry;
    if (r2 == 0.0) return -kInv2Pi * std::log(self_cell_radius(h));
    return -kInv2Pi * 0.5 * std::log(r2);
}

Vec2 grad_kernel(double rx, double ry) {
    double r2 = rx * rx + ry * ry;
    if (r2 == 0.0) return {0.0, 0.0};
    double w = -kInv2Pi / r2;
    return {w * rx, w * ry};
}

PoissonSolution solve_direct(const ScalarField& rho) {
    const GridSpec& g = rho.grid;
    const int n = g.n;
    const double h = g.dx;

    // Kernel tables over all displacements (di, dj) in [-(n-1), n-1].
    const int tdim = 2 * n - 1;
    std::vector<double> kphi(static_cast<std::size_t>(tdim) * tdim);
    std::vector<double> kgx(kphi.size()), kgy(kphi.size());
    for (int dj = -(n - 1); dj <= n - 1; ++dj) {
        for (int di = -(n - 1); di <= n - 1; ++di) {
            std::size_t t = static_cast<std::size_t>(dj + n - 1) * tdim + (di + n - 1);
            kphi[t] = log_kernel(di * h, dj * h, h);
            Vec2 kg = grad_kernel(di * h, dj * h);
            kgx[t] = kg.x;
            kgy[t] = kg.y;
        }
    }

    PoissonSolution sol{ScalarField(g), VectorField(g)};
    const double w = g.cell_area();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            KahanSum sp, sx, sy;
            for (int jj = 0; jj < n; ++jj) {
                const std::size_t trow = static_cast<std::size_t>(j - jj + n - 1) * tdim + (n - 1);
                const double* rrow = &rho.values[g.index(0, jj)];
                for (int ii = 0; ii < n; ++ii) {
                    double r = rrow[ii];
                    std::size_t t = trow + (i - ii);
                    sp.add(kphi[t] * r);
                    sx.add(kgx[t] * r);
                    sy.add(kgy[t] * r);
                }
            }
            std::size_t k = g.index(i, j);
            sol.phi.values[k] = w * sp.value();
            sol.grad.x[k] = w * sx.value();
            sol.grad.y[k] = w * sy.value();
        }
    }
    return sol;
}

// FFT route: embed rho in a (2n)^2 zero-padded box, sample each kernel at the
// wrapped displacements, multiply spectra, and keep the physical n^2 block.
// Displacement index n (the pad midline) never couples a physical target to a
// physical source, so its sample only needs to keep the spectra tidy: even
// kernels get the true value, odd kernels get 0.
struct PoissonSolver::Impl {
    GridSpec g;
    int m;        // padded size 2n
    int spec_w;   // m/2 + 1
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::vector<std::complex<double>> rho_hat, khat_phi, khat_gx, khat_gy;

    explicit Impl(const GridSpec& grid) : g(grid), m(2 * grid.n), spec_w(grid.n + 1) {
        real = fftw_alloc_real(static_cast<std::size_t>(m) * m);
        spec = fftw_alloc_complex(static_cast<std::size_t>(m) * spec_w);
        if (!real || !spec) throw std::runtime_error("PoissonSolver: fftw_alloc failed");
        // FFTW_ESTIMATE keeps planning deterministic and input-independent.
        fwd = fftw_plan_dft_r2c_2d(m, m, real, spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_2d(m, m, spec, real, FFTW_ESTIMATE);
        if (!fwd || !inv) throw std::runtime_error("PoissonSolver: fftw planning failed");

        rho_hat.resize(static_cast<std::size_t>(m) * spec_w);
        khat_phi = transform_kernel(0);
        khat_gx = transform_kernel(1);
        khat_gy = transform_kernel(2);
    }

    ~Impl() {
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        if (real) fftw_free(real);
        if (spec) fftw_free(spec);
    }

    std::vector<std::complex<double>> transform_kernel(int which) {
        const double h = g.dx;
        for (int q = 0; q < m; ++q) {
            int dj = (q <= g.n) ? q : q - m;
            for (int p = 0; p < m; ++p) {
                int di = (p <= g.n) ? p : p - m;
                double v;
                if (which == 0) {
                    v = log_kernel(di * h, dj * h, h);
                } else {
                    if (std::abs(di) == g.n || std::abs(dj) == g.n) {
                        v = 0.0;  // odd kernel at the ambiguous pad midline
                    } else {
                        Vec2 kg = grad_kernel(di * h, dj * h);
                        v = (which == 1) ? kg.x : kg.y;
                    }
                }
                real[static_cast<std::size_t>(q) * m + p] = v;
            }
        }
        fftw_execute(fwd);
        std::vector<std::complex<double>> out(static_cast<std::size_t>(m) * spec_w);
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = {spec[k][0], spec[k][1]};
        return out;
    }

    void convolve(const std::vector<std::complex<double>>& khat, double scale,
                  double* out) const {
        for (std::size_t k = 0; k < rho_hat.size(); ++k) {
            std::complex<double> v = rho_hat[k] * khat[k];
            spec[k][0] = v.real();
            spec[k][1] = v.imag();
        }
        fftw_execute(inv);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i)
                out[g.index(i, j)] = scale * real[static_cast<std::size_t>(j) * m + i];
    }
};

PoissonSolver::PoissonSolver(const GridSpec& g) : impl_(std::make_unique<Impl>(g)) {}
PoissonSolver::~PoissonSolver() = default;

const GridSpec& PoissonSolver::grid() const { return impl_->g; }

PoissonSolution PoissonSolver::solve(const ScalarField& rho) const {
    Impl& im = *impl_;
    if (!(rho.grid == im.g))
        throw std::invalid_argument("PoissonSolver::solve: grid mismatch");

    const int m = im.m;
    std::fill(im.real, im.real + static_cast<std::size_t>(m) * m, 0.0);
    for (int j = 0; j < im.g.n; ++j)
        for (int i = 0; i < im.g.n; ++i)
            im.real[static_cast<std::size_t>(j) * m + i] = rho(i, j);
    fftw_execute(im.fwd);
    for (std::size_t k = 0; k < im.rho_hat.size(); ++k)
        im.rho_hat[k] = {im.spec[k][0], im.spec[k][1]};

    // quadrature weight dx^2, and 1/m^2 for FFTW's unnormalized transforms
    const double scale = im.g.cell_area() / (static_cast<double>(m) * m);
    PoissonSolution sol{ScalarField(im.g), VectorField(im.g)};
    im.convolve(im.khat_phi, scale, sol.phi.values.data());
    im.convolve(im.khat_gx, scale, sol.grad.x.data());
    im.convolve(im.khat_gy, scale, sol.grad.y.data());
    return sol;
}

PoissonSolution solve_fft(const ScalarField& rho) {
    PoissonSolver solver(rho.grid);
    return solver.solve(rho);
}

double interaction_energy(const ScalarField& rho, const PoissonSolution& sol) {
    KahanSum s;
    for (std::size_t k = 0; k < rho.values.size(); ++k)
        s.add(rho.values[k] * sol.phi.values[k]);
    return s.value() * rho.grid.cell_area();
}

double laplacian_residual(const ScalarField& rho, const ScalarField& phi) {
    const GridSpec& g = rho.grid;
    const double inv_h2 = 1.0 / g.cell_area();
    double worst = 0.0;
    for (int j = 1; j < g.n - 1; ++j)
        for (int i = 1; i < g.n - 1; ++i) {
            double lap = (phi(i + 1, j) + phi(i - 1, j) + phi(i, j + 1) + phi(i, j - 1) -
                          4.0 * phi(i, j)) * inv_h2;
            worst = std::max(worst, std::abs(lap + rho(i, j)));
        }
    return worst;
}

}  // namespace ksfluid
