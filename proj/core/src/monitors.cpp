#include "ksfluid/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ksfluid {

namespace {
constexpr double kPi = std::numbers::pi;
const double kCritical = 8.0 * kPi;

MonitorSlack make_slack(std::string name, double lhs, double rhs, double tol,
                        bool applicable = true) {
    MonitorSlack s;
    s.name = std::move(name);
    s.lhs = lhs;
    s.rhs = rhs;
    s.slack = rhs - lhs;
    s.tol = tol;
    s.pass = !applicable || s.slack >= -tol;
    s.applicable = applicable;
    return s;
}
}  // namespace

MassRegime classify_mass(double mass) {
    if (!(mass > 0.0)) throw std::invalid_argument("classify_mass: mass must be positive");
    if (std::abs(mass - kCritical) <= 1e-9 * kCritical) return MassRegime::critical;
    return mass < kCritical ? MassRegime::subcritical : MassRegime::supercritical;
}

BoundConstants bound_constants(double mass) {
    BoundConstants c;
    c.mass = mass;
    c.beta = 2.0 * (1.0 - mass / kCritical);
    c.drift = 4.0 * mass * (1.0 - mass / kCritical);
    c.c_of_m = loghls_constant(mass);
    // Cauchy weight for |Xm| <= eps X2 + K/eps, midpoint of the band
    // (1/3, 1 - 3 beta/10) on which both kappas stay positive for beta <= 2.
    c.eps_star = 2.0 / 3.0 - 3.0 * c.beta / 20.0;
    c.kappa_k = 3.0 - 1.0 / c.eps_star;
    c.kappa_x = 1.0 - c.eps_star - 3.0 * c.beta / 10.0;
    c.coef_e = 10.0 + c.beta / c.kappa_x;
    c.c_b = 1.0 / (3.0 * c.eps_star * c.kappa_k) + c.beta * c.coef_e / 10.0;
    c.j_const = 3.0 * mass / (4.0 * kPi) * c.c_of_m +
                3.0 * c.beta * mass * std::log(10.0 * kPi / mass);
    c.c1 = 3.0 * mass / (4.0 * kPi) * c.c_of_m;

    double g2 = mass / (4.0 * kPi) * c.c_of_m + c.beta * mass * std::log(kPi / mass) +
                22.0 * c.beta * c.beta * mass + c.c_b * c.j_const;
    c.c2 = std::max({c.beta * mass, 1.0 / 3.0 + c.c_b, g2});

    c.c3 = mass * std::log(mass / kPi) - 22.0 * c.beta * mass -
           c.coef_e / 10.0 * c.j_const;
    c.c6 = std::max({22.0 * c.beta * mass, c.coef_e, c.coef_e * c.j_const});
    return c;
}

double BoundConstants::c4(double e0) const {
    return mass + std::max(coef_e / 10.0 - 1.0, 0.0) * std::max(e0, 0.0) / std::log(10.0);
}

double BoundConstants::c5(double e0) const {
    if (!(beta > 0.0))
        throw std::invalid_argument("BoundConstants::c5: entropy cap needs M < 8 pi");
    return (mass / (4.0 * kPi) * c_of_m + e0 / 3.0 +
            (e0 + j_const) / (3.0 * eps_star * kappa_k)) /
           beta;
}

std::vector<MonitorSlack> base_inequality_monitors(const DiagnosticsRecord& rec,
                                                   const DiagnosticsRecord& rec0,
                                                   double tol) {
    const double m = rec0.mass;
    const BoundConstants c = bound_constants(m);
    const double big_t = rec.t - rec0.t;
    const double iv = rec0.second_moment + rec0.cross_moment;
    const double ie = rec0.kinetic + 2.0 * rec0.entropy - rec0.interaction;

    std::vector<MonitorSlack> out;
    out.push_back(make_slack(
        "moment_virial_bound", 0.5 * rec.second_moment,
        c.drift * big_t + 2.0 * rec.kinetic + rec.dissipation + iv, tol));
    out.push_back(make_slack(
        "entropy_dissipation_bound",
        rec.kinetic + rec.dissipation + c.beta * rec.entropy,
        m / (4.0 * kPi) * c.c_of_m + ie, tol));
    return out;
}

std::vector<MonitorSlack> envelope_monitors(const DiagnosticsRecord& rec,
                                            const DiagnosticsRecord& rec0,
                                            MassRegime regime, double tol) {
    const double m = rec0.mass;
    if (classify_mass(m) != regime)
        throw std::invalid_argument("envelope_monitors: regime does not match mass");

    const BoundConstants c = bound_constants(m);
    const double big_t = rec.t - rec0.t;
    const double iv = rec0.second_moment + rec0.cross_moment;
    const double ie = rec0.kinetic + 2.0 * rec0.entropy - rec0.interaction;
    const double e0 = initial_energy(rec0);
    const bool e0_ok = e0 >= 0.0;  // envelope derivations assume E0 >= 0

    std::vector<MonitorSlack> out;

    // Jensen floor, valid for every mass.
    out.push_back(make_slack(
        "jensen_entropy_floor",
        m * std::log(m) - m * std::log(kPi * (10.0 + big_t)) -
            rec.second_moment / (10.0 + big_t),
        rec.entropy, tol));

    // Combined collapse inequality (A) + 2(B); drives the blow-up bound but
    // holds for every mass.
    out.push_back(make_slack(
        "collapse_moment_bound",
        0.5 * rec.second_moment + rec.dissipation + 2.0 * c.beta * rec.entropy,
        c.drift * big_t + m / (2.0 * kPi) * c.c_of_m + iv + 2.0 * ie, tol));

    if (regime == MassRegime::critical) {
        // (A) + 3(B) at beta = 0: 1/2 X2 + K + D <= C1 + E0 (2D weakened to D).
        out.push_back(make_slack(
            "critical_energy_envelope",
            0.5 * rec.second_moment + rec.kinetic + rec.dissipation, c.c1 + e0, tol,
            e0_ok));
    }

    if (regime == MassRegime::subcritical) {
        // Exact-chain bounds (tight, carry the measured initial data):
        //   P(T) = (M/4pi) C + I_e + beta M log(pi/M) + beta M log(10+T)
        double p_t = m / (4.0 * kPi) * c.c_of_m + ie + c.beta * m * std::log(kPi / m) +
                     c.beta * m * std::log(10.0 + big_t);
        out.push_back(make_slack(
            "kinetic_dissipation_chain", rec.kinetic + rec.dissipation,
            p_t + c.beta * rec.second_moment / (10.0 + big_t), tol));
        out.push_back(make_slack("second_moment_chain", rec.second_moment,
                                 10.0 * (c.drift * big_t + 2.0 * p_t + iv), tol));
        out.push_back(make_slack("entropy_upper_chain", rec.entropy,
                                 (m / (4.0 * kPi) * c.c_of_m + ie) / c.beta, tol));

        // Envelope forms with constants depending on (M, E0) only:
        out.push_back(make_slack(
            "kinetic_dissipation_envelope", rec.kinetic + rec.dissipation,
            c.c2 * (1.0 + std::log(10.0 + big_t) + e0), tol, e0_ok));
        out.push_back(make_slack("second_moment_envelope", rec.second_moment,
                                 c.c6 * (1.0 + big_t + e0), tol, e0_ok));
        out.push_back(make_slack("entropy_upper_envelope", rec.entropy, c.c5(e0), tol,
                                 e0_ok));
        out.push_back(make_slack(
            "entropy_lower_envelope",
            c.c3 - e0 - c.c4(e0) * std::log(10.0 + big_t), rec.entropy, tol, e0_ok));
    }
    return out;
}

double BlowupBound::rhs(double t) const {
    return drift * t + growth * std::pow(t, alpha) + offset;
}

BlowupBound blowup_bound(const DiagnosticsRecord& rec0, double alpha, double c_alpha,
                         double mass) {
    if (!(mass > kCritical))
        throw std::invalid_argument("blowup_bound: needs supercritical mass M > 8 pi");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("blowup_bound: alpha must lie in (0, 1)");
    if (!(c_alpha >= 0.0))
        throw std::invalid_argument("blowup_bound: C_alpha must be >= 0");

    const double ie = rec0.kinetic + 2.0 * rec0.entropy - rec0.interaction;
    const double e0 = initial_energy(rec0);
    const double excess = mass / kCritical - 1.0;  // M/8pi - 1 > 0

    BlowupBound b;
    b.drift = 4.0 * mass * (1.0 - mass / kCritical);
    b.alpha = alpha;
    b.growth = 4.0 * excess * c_alpha;
    double ctilde1 = mass / (2.0 * kPi) * loghls_constant(mass) +
                     4.0 * excess * rec0.entropy - ie;
    b.offset = ctilde1 + e0;

    if (b.offset <= 0.0) {
        b.latest_time = 0.0;
        return b;
    }
    if (b.growth == 0.0) {
        b.latest_time = b.offset / (-b.drift);
        return b;
    }
    // rhs rises to a single peak then decreases linearly; bracket past the
    // peak and bisect.
    double t_peak = std::pow(-b.growth * alpha / b.drift, 1.0 / (1.0 - alpha));
    double lo = t_peak, hi = std::max(2.0 * t_peak, 1.0);
    int guard = 0;
    while (b.rhs(hi) > 0.0 && guard++ < 200) hi *= 2.0;
    if (b.rhs(hi) > 0.0) {
        b.latest_time = std::numeric_limits<double>::infinity();
        return b;
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (b.rhs(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    b.latest_time = 0.5 * (lo + hi);
    return b;
}

}  // namespace ksfluid
