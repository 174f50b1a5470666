#include "ksfluid/particles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ksfluid {

namespace {
constexpr double kInv2Pi = 1.0 / (2.0 * std::numbers::pi);
}

Vec2 pair_force(Vec2 r, double eps) {
    double w = -kInv2Pi / (r.x * r.x + r.y * r.y + eps * eps);
    return {w * r.x, w * r.y};
}

void mean_field_forces(const ParticleEnsemble& e, std::vector<double>& fx,
                       std::vector<double>& fy) {
    const std::size_t n = e.size();
    fx.assign(n, 0.0);
    fy.assign(n, 0.0);
    const double eps2 = e.softening * e.softening;
    for (std::size_t i = 0; i < n; ++i) {
        double xi = e.x[i], yi = e.y[i];
        double ax = 0.0, ay = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double rx = xi - e.x[j], ry = yi - e.y[j];
            double w = -kInv2Pi / (rx * rx + ry * ry + eps2);
            double gx = w * rx, gy = w * ry;
            ax += gx;
            ay += gy;
            fx[j] -= gx;  // reaction, keeps the pair sum exactly zero
            fy[j] -= gy;
        }
        fx[i] += ax;
        fy[i] += ay;
    }
    const double scale = e.total_mass / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        fx[i] *= scale;
        fy[i] *= scale;
    }
}

ParticleEnsemble ensemble_step(const ParticleEnsemble& e, double dt) {
    if (!(dt > 0.0) || dt > 0.1 * e.relax_time)
        throw std::invalid_argument("ensemble_step: need 0 < dt <= 0.1 tau");
    if (e.size() < 2) throw std::invalid_argument("ensemble_step: need N >= 2");

    // Strang-split kick-drift-kick: half steps of the exact friction-forcing
    // flow v' = decay v + gain F around a full position drift. Second order,
    // and with forces off the two halves compose to the exact e^{-dt/tau}.
    const double decay = std::exp(-0.5 * dt / e.relax_time);
    const double gain = e.relax_time * (1.0 - decay);

    std::vector<double> fx, fy;
    mean_field_forces(e, fx, fy);

    ParticleEnsemble out = e;
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i) {
        out.vx[i] = decay * e.vx[i] + gain * fx[i];
        out.vy[i] = decay * e.vy[i] + gain * fy[i];
        out.x[i] = e.x[i] + dt * out.vx[i];
        out.y[i] = e.y[i] + dt * out.vy[i];
    }
    mean_field_forces(out, fx, fy);
    for (std::size_t i = 0; i < n; ++i) {
        out.vx[i] = decay * out.vx[i] + gain * fx[i];
        out.vy[i] = decay * out.vy[i] + gain * fy[i];
    }
    return out;
}

DiagnosticsRecord empirical_moments(const ParticleEnsemble& e, double time) {
    DiagnosticsRecord r;
    r.t = time;
    r.mass = e.total_mass;
    KahanSum x2, xm, k;
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i) {
        x2.add(e.x[i] * e.x[i] + e.y[i] * e.y[i]);
        xm.add(2.0 * (e.x[i] * e.vx[i] + e.y[i] * e.vy[i]));
        k.add(e.vx[i] * e.vx[i] + e.vy[i] * e.vy[i]);
    }
    const double w = e.particle_mass();
    r.second_moment = w * x2.value();
    r.cross_moment = w * xm.value();
    r.kinetic = w * k.value();
    r.entropy = std::numeric_limits<double>::quiet_NaN();
    r.interaction = std::numeric_limits<double>::quiet_NaN();
    r.log_hls = std::numeric_limits<double>::quiet_NaN();
    return r;
}

double pairwise_virial_sum(const ParticleEnsemble& e) {
    const double eps2 = e.softening * e.softening;
    KahanSum s;
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double rx = e.x[i] - e.x[j], ry = e.y[i] - e.y[j];
            double r2 = rx * rx + ry * ry;
            s.add(r2 / (r2 + eps2));
        }
    return s.value();
}

ScalarField deposit_density(const ParticleEnsemble& e, const GridSpec& g,
                            DepositInfo* info) {
    ScalarField rho(g);
    double lost = 0.0;
    const double mass_per = e.particle_mass() / g.cell_area();
    const std::size_t n = e.size();
    for (std::size_t p = 0; p < n; ++p) {
        // cell-center coordinates: center of cell i sits at grid coordinate i
        double gx = (e.x[p] + g.half_width) / g.dx - 0.5;
        double gy = (e.y[p] + g.half_width) / g.dx - 0.5;
        int i0 = static_cast<int>(std::floor(gx));
        int j0 = static_cast<int>(std::floor(gy));
        double wx1 = gx - i0, wy1 = gy - j0;
        const double wts[4] = {(1 - wx1) * (1 - wy1), wx1 * (1 - wy1),
                               (1 - wx1) * wy1, wx1 * wy1};
        const int ci[4] = {i0, i0 + 1, i0, i0 + 1};
        const int cj[4] = {j0, j0, j0 + 1, j0 + 1};
        for (int q = 0; q < 4; ++q) {
            if (ci[q] < 0 || ci[q] >= g.n || cj[q] < 0 || cj[q] >= g.n) {
                lost += wts[q];
                continue;
            }
            rho(ci[q], cj[q]) += wts[q] * mass_per;
        }
    }
    if (info) info->out_of_box_mass = lost * e.particle_mass();
    return rho;
}

ParticleEnsemble sample_gaussian_ensemble(const GaussianSpec& spec, std::size_t n,
                                          std::uint64_t seed, double softening,
                                          const SampleOptions& opts) {
    if (n < 2) throw std::invalid_argument("sample_gaussian_ensemble: need N >= 2");
    if (opts.antithetic && n % 2 != 0)
        throw std::invalid_argument("sample_gaussian_ensemble: antithetic needs even N");

    ParticleEnsemble e;
    e.total_mass = spec.mass;
    e.softening = softening;
    e.x.resize(n);
    e.y.resize(n);
    e.vx.resize(n);
    e.vy.resize(n);

    // seed_seq mixing: raw nearby seeds leave mt19937's early outputs
    // correlated, which would tie together the leading slices of replica draws
    std::seed_seq ss{static_cast<std::uint32_t>(seed),
                     static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(ss);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t draws = opts.antithetic ? n / 2 : n;
    for (std::size_t d = 0; d < draws; ++d) {
        double px = gauss(rng), py = gauss(rng);
        double tx = opts.thermal ? gauss(rng) : 0.0;
        double ty = opts.thermal ? gauss(rng) : 0.0;
        auto set = [&](std::size_t i, double sgn) {
            e.x[i] = spec.center.x + sgn * spec.sigma * px;
            e.y[i] = spec.center.y + sgn * spec.sigma * py;
            e.vx[i] = spec.bulk_velocity.x + sgn * tx;
            e.vy[i] = spec.bulk_velocity.y + sgn * ty;
        };
        if (opts.antithetic) {
            set(2 * d, 1.0);
            set(2 * d + 1, -1.0);
        } else {
            set(d, 1.0);
        }
    }
    return e;
}

void match_moments(ParticleEnsemble& e, const GaussianSpec& spec, bool thermal,
                   bool scale_spread) {
    const std::size_t n = e.size();
    const double nn = static_cast<double>(n);

    // recenter positions on the Gaussian center
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += e.x[i];
        my += e.y[i];
    }
    mx = mx / nn - spec.center.x;
    my = my / nn - spec.center.y;
    for (std::size_t i = 0; i < n; ++i) {
        e.x[i] -= mx;
        e.y[i] -= my;
    }

    if (scale_spread) {
        // scale spread about the center so X2 = M (2 sigma^2 + |c|^2) exactly
        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dx = e.x[i] - spec.center.x, dy = e.y[i] - spec.center.y;
            spread += dx * dx + dy * dy;
        }
        double s_pos = std::sqrt(2.0 * spec.sigma * spec.sigma * nn / spread);
        for (std::size_t i = 0; i < n; ++i) {
            e.x[i] = spec.center.x + s_pos * (e.x[i] - spec.center.x);
            e.y[i] = spec.center.y + s_pos * (e.y[i] - spec.center.y);
        }
    }

    // recenter velocities on the bulk value
    double mvx = 0.0, mvy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mvx += e.vx[i];
        mvy += e.vy[i];
    }
    mvx = mvx / nn - spec.bulk_velocity.x;
    mvy = mvy / nn - spec.bulk_velocity.y;
    for (std::size_t i = 0; i < n; ++i) {
        e.vx[i] -= mvx;
        e.vy[i] -= mvy;
    }
    if (!thermal || !scale_spread) return;

    // kill position-velocity correlation so Xm = 2 M c . u exactly, then
    // scale the thermal part so K = M (|u|^2 + 2)
    double cross = 0.0, pos2 = 0.0, th2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = e.x[i] - spec.center.x, dy = e.y[i] - spec.center.y;
        double tx = e.vx[i] - spec.bulk_velocity.x, ty = e.vy[i] - spec.bulk_velocity.y;
        cross += dx * tx + dy * ty;
        pos2 += dx * dx + dy * dy;
    }
    double lam = cross / pos2;
    for (std::size_t i = 0; i < n; ++i) {
        e.vx[i] -= lam * (e.x[i] - spec.center.x);
        e.vy[i] -= lam * (e.y[i] - spec.center.y);
        double tx = e.vx[i] - spec.bulk_velocity.x, ty = e.vy[i] - spec.bulk_velocity.y;
        th2 += tx * tx + ty * ty;
    }
    double s_vel = std::sqrt(2.0 * nn / th2);
    for (std::size_t i = 0; i < n; ++i) {
        e.vx[i] = spec.bulk_velocity.x + s_vel * (e.vx[i] - spec.bulk_velocity.x);
        e.vy[i] = spec.bulk_velocity.y + s_vel * (e.vy[i] - spec.bulk_velocity.y);
    }
}

}  // namespace ksfluid
