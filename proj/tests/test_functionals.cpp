// Integral diagnostics, the sharp log-interaction constant, virial identity
// residuals, inequality monitors, and the collapse-time bound.
#include "doctest.h"

#include "ksfluid/functionals.hpp"
#include "ksfluid/monitors.hpp"
#include "ksfluid/poisson.hpp"
#include "ksfluid/state.hpp"

#include <cmath>
#include <numbers>

using namespace ksfluid;

namespace {
const double kPi = std::numbers::pi;

DiagnosticsRecord gaussian_record(double mass, double sigma, double L, int n) {
    GridSpec g = make_grid(L, n);
    ModelParams par = ModelParams::scaled(mass, L);
    GaussianSpec spec;
    spec.mass = mass;
    spec.sigma = sigma;
    FluidState s = gaussian_state(g, spec, par, nullptr);
    return diagnostics(s, solve_fft(s.rho), par, 0.0, 0.0);
}

// closed forms for the isotropic Gaussian of mass M, width sigma:
//   X2 = 2 M sigma^2
//   S  = M (log(M / 2 pi sigma^2) - 1)
//   W  = -(M^2/2pi) (log(sqrt 2 sigma) + (log 2 - gamma)/2)
double gauss_x2(double m, double s) { return 2.0 * m * s * s; }
double gauss_entropy(double m, double s) {
    return m * (std::log(m / (2.0 * kPi * s * s)) - 1.0);
}
double gauss_interaction(double m, double s) {
    const double g_euler = 0.57721566490153286;
    return -(m * m / (2.0 * kPi)) *
           (std::log(std::sqrt(2.0) * s) + (std::log(2.0) - g_euler) / 2.0);
}
}  // namespace

TEST_CASE("sharp constant C(M) = M (1 + log pi - log M)") {
    CHECK(loghls_constant(kPi) == doctest::Approx(kPi).epsilon(1e-14));
    // 8 pi (1 - 3 log 2), the value the critical-mass margin hangs on
    CHECK(loghls_constant(8.0 * kPi) ==
          doctest::Approx(-27.129324938568100).epsilon(1e-12));
    CHECK(std::abs(loghls_constant(kPi * std::exp(1.0))) <= 1e-13);  // zero crossing
    CHECK(loghls_functional(2.0, 3.0, 4.0 * kPi) ==
          doctest::Approx(-1.0).epsilon(1e-14));  // S - (4pi/M) W
}

TEST_CASE("gaussian diagnostics match the closed forms") {
    double mass = 4.0 * kPi, sigma = 1.0;
    DiagnosticsRecord r = gaussian_record(mass, sigma, 10.0, 256);
    CHECK(r.mass == doctest::Approx(mass).epsilon(1e-12));
    CHECK(r.second_moment == doctest::Approx(gauss_x2(mass, sigma)).epsilon(1e-8));
    CHECK(r.cross_moment == 0.0);
    CHECK(r.kinetic == 0.0);
    CHECK(r.entropy == doctest::Approx(gauss_entropy(mass, sigma)).epsilon(1e-8));
    // the quadrature of W carries the solver's O(dx^2) error, ~3e-4 here
    CHECK(r.interaction == doctest::Approx(gauss_interaction(mass, sigma)).epsilon(1e-3));
    CHECK(r.log_hls ==
          doctest::Approx(loghls_functional(r.entropy, r.interaction, r.mass))
              .epsilon(1e-14));
    CHECK(r.rho_max == doctest::Approx(mass / (2.0 * kPi)).epsilon(2e-3));
    // frozen spot values
    CHECK(gauss_x2(mass, sigma) == doctest::Approx(25.132741228718).epsilon(1e-12));
    CHECK(gauss_entropy(mass, sigma) == doctest::Approx(-3.856026253145).epsilon(1e-11));
    CHECK(gauss_interaction(mass, sigma) ==
          doctest::Approx(-10.167182752862).epsilon(1e-11));
}

TEST_CASE("log-interaction combination is scale invariant and above its floor") {
    // F = S - (4pi/M) W depends only on M for a Gaussian; for M = 4pi it is
    // 6.31116, a fixed 1.457 above the floor -C(4pi).
    double mass = 4.0 * kPi;
    double f1 = gaussian_record(mass, 1.0, 10.0, 256).log_hls;
    double f2 = gaussian_record(mass, 0.5, 10.0, 256).log_hls;
    CHECK(f1 == doctest::Approx(6.3111564997).epsilon(1e-2));
    CHECK(std::abs(f1 - f2) <= 0.05);
    double floor = -loghls_constant(mass);
    CHECK(f1 - floor >= 1.0);
    CHECK(f2 - floor >= 1.0);
}

TEST_CASE("virial right-hand side 4M(1 - M/8pi) + 2K") {
    CHECK(virial_rhs(4.0 * kPi, 0.0) == doctest::Approx(8.0 * kPi).epsilon(1e-14));
    CHECK(std::abs(virial_rhs(8.0 * kPi, 0.0)) <= 1e-12);   // critical: drift dies
    CHECK(virial_rhs(16.0 * kPi, 0.0) ==
          doctest::Approx(-64.0 * kPi).epsilon(1e-14));     // collapse drift
    CHECK(virial_rhs(4.0 * kPi, 3.0) ==
          doctest::Approx(8.0 * kPi + 6.0).epsilon(1e-14));
}

TEST_CASE("virial residuals vanish on an exactly linear trajectory") {
    // X2 + Xm growing at exactly 4M(1-M/8pi) + 2K with constant K must give
    // zero integrated and pointwise residual.
    double mass = 4.0 * kPi, kin = 1.5;
    double slope = virial_rhs(mass, kin);
    std::vector<DiagnosticsRecord> recs;
    for (int k = 0; k <= 20; ++k) {
        DiagnosticsRecord r;
        r.t = 0.1 * k;
        r.mass = mass;
        r.second_moment = 30.0 + slope * r.t;
        r.cross_moment = 0.0;
        r.kinetic = kin;
        r.dissipation = 2.0 * kin * r.t;
        recs.push_back(r);
    }
    CHECK(std::abs(integrated_virial_residual(recs.front(), recs.back())) <= 1e-10);
    fill_virial_residuals(recs);
    for (const auto& r : recs) CHECK(std::abs(r.virial_residual) <= 1e-9);
}

TEST_CASE("initial energy combines the time-zero functionals") {
    DiagnosticsRecord r;
    r.kinetic = 1.0;
    r.entropy = 2.0;
    r.interaction = 3.0;
    r.second_moment = 4.0;
    r.cross_moment = 5.0;
    // 3 (K + 2S - W) + X2 + Xm = 3 (1 + 4 - 3) + 9
    CHECK(initial_energy(r) == doctest::Approx(15.0).epsilon(1e-14));
}

TEST_CASE("entropy growth fit recovers synthetic power laws") {
    auto records_for = [](auto f) {
        std::vector<DiagnosticsRecord> recs;
        DiagnosticsRecord r0;
        r0.t = 0.0;
        r0.entropy = f(0.0);
        recs.push_back(r0);
        for (int k = 0; k < 50; ++k) {
            DiagnosticsRecord r;
            r.t = 10.0 + k * (990.0 / 49.0);
            r.entropy = f(r.t);
            recs.push_back(r);
        }
        return recs;
    };

    SUBCASE("square root growth is accepted with the right exponent") {
        EntropyFit fit = entropy_growth_fit(records_for([](double t) {
            return t == 0.0 ? 0.0 : 5.0 * std::sqrt(t);
        }));
        CHECK(fit.hypothesis_ok);
        CHECK(fit.n_used == 50);
        // the +1 regularizer in log(S - S0 + 1) biases the exponent slightly
        CHECK(fit.alpha == doctest::Approx(0.4912).epsilon(1e-2));
        CHECK(fit.coeff == doctest::Approx(5.331).epsilon(2e-2));
        CHECK(fit.rms <= 0.05);
    }

    SUBCASE("linear growth is rejected: exponent outside (0, 0.95)") {
        EntropyFit fit =
            entropy_growth_fit(records_for([](double t) { return 2.0 * t; }));
        CHECK_FALSE(fit.hypothesis_ok);
        CHECK(fit.alpha == doctest::Approx(0.9943).epsilon(1e-2));
    }

    SUBCASE("flat entropy leaves nothing to fit") {
        EntropyFit fit =
            entropy_growth_fit(records_for([](double) { return 1.0; }));
        CHECK(fit.n_used == 0);
        CHECK_FALSE(fit.hypothesis_ok);
        CHECK(fit.alpha == 0.0);
    }

    SUBCASE("a window with no time spread is rejected loudly") {
        std::vector<DiagnosticsRecord> recs;
        DiagnosticsRecord r0;
        recs.push_back(r0);
        for (int k = 0; k < 12; ++k) {
            DiagnosticsRecord r;
            r.t = 5.0;
            r.entropy = 2.0;
            recs.push_back(r);
        }
        CHECK_THROWS_AS(entropy_growth_fit(recs), std::invalid_argument);
    }
}

TEST_CASE("mass classification with a guard band at 8 pi") {
    CHECK(classify_mass(4.0 * kPi) == MassRegime::subcritical);
    CHECK(classify_mass(8.0 * kPi) == MassRegime::critical);
    CHECK(classify_mass(8.0 * kPi * (1.0 + 1e-10)) == MassRegime::critical);
    CHECK(classify_mass(8.0 * kPi * 1.01) == MassRegime::supercritical);
    CHECK(classify_mass(8.0 * kPi * 0.99) == MassRegime::subcritical);
    CHECK_THROWS_AS(classify_mass(0.0), std::invalid_argument);
    CHECK_THROWS_AS(classify_mass(-1.0), std::invalid_argument);
}

TEST_CASE("envelope constants at M = 4 pi (frozen, independently recomputed)") {
    BoundConstants c = bound_constants(4.0 * kPi);
    CHECK(c.beta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.drift == doctest::Approx(25.132741228718).epsilon(1e-12));
    CHECK(c.c_of_m == doctest::Approx(-4.854318108070).epsilon(1e-11));
    CHECK(c.eps_star == doctest::Approx(0.516666666667).epsilon(1e-11));
    CHECK(c.kappa_k == doctest::Approx(1.064516129032).epsilon(1e-11));
    CHECK(c.kappa_x == doctest::Approx(0.183333333333).epsilon(1e-11));
    CHECK(c.coef_e == doctest::Approx(15.454545454545).epsilon(1e-11));
    CHECK(c.c_b == doctest::Approx(2.151515151515).epsilon(1e-11));
    CHECK(c.j_const == doctest::Approx(19.980392457490).epsilon(1e-11));
    CHECK(c.c1 == doctest::Approx(-14.562954324209).epsilon(1e-11));
    CHECK(c.c2 == doctest::Approx(297.173263790913).epsilon(1e-11));
    CHECK(c.c3 == doctest::Approx(-289.918253136867).epsilon(1e-11));
    CHECK(c.c6 == doctest::Approx(308.787883433939).epsilon(1e-11));
    CHECK(c.c4(32.52) == doctest::Approx(20.269965096992).epsilon(1e-11));
    CHECK(c.c5(32.52) == doctest::Approx(37.804101563137).epsilon(1e-11));
}

TEST_CASE("envelope constants at M = 2 pi (frozen, independently recomputed)") {
    BoundConstants c = bound_constants(2.0 * kPi);
    CHECK(c.c1 == doctest::Approx(2.892019689859).epsilon(1e-11));
    CHECK(c.c2 == doctest::Approx(528.202919041389).epsilon(1e-11));
    CHECK(c.c3 == doctest::Approx(-318.400092360536).epsilon(1e-11));
    CHECK(c.c6 == doctest::Approx(1154.101494042173).epsilon(1e-11));
    CHECK(c.j_const == doctest::Approx(48.397804588865).epsilon(1e-11));
}

TEST_CASE("entropy cap constant requires subcritical mass") {
    CHECK_THROWS_AS(bound_constants(8.0 * kPi).c5(1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_constants(16.0 * kPi).c5(1.0), std::invalid_argument);
}

TEST_CASE("base inequality monitors at time zero") {
    double mass = 4.0 * kPi;
    DiagnosticsRecord r0 = gaussian_record(mass, 1.0, 10.0, 256);
    auto slacks = base_inequality_monitors(r0, r0, 0.1);
    REQUIRE(slacks.size() == 2);
    CHECK(slacks[0].name == "moment_virial_bound");
    // self-comparison: rhs - lhs = I_v - X2/2 = X2/2 for rest data
    CHECK(slacks[0].slack ==
          doctest::Approx(0.5 * r0.second_moment).epsilon(1e-12));
    CHECK(slacks[0].pass);
    CHECK(slacks[1].name == "entropy_dissipation_bound");
    double want = mass / (4.0 * kPi) * loghls_constant(mass) + r0.entropy -
                  r0.interaction;  // C + I_e - beta S with beta = 1, K = D = 0
    CHECK(slacks[1].slack == doctest::Approx(want).epsilon(1e-12));
    CHECK(slacks[1].pass);
}

TEST_CASE("envelope monitors: membership by regime and sane time-zero slacks") {
    double tol = 0.1;
    DiagnosticsRecord sub = gaussian_record(4.0 * kPi, 1.0, 10.0, 256);
    auto s = envelope_monitors(sub, sub, MassRegime::subcritical, tol);
    REQUIRE(s.size() == 9);
    CHECK(s[0].name == "jensen_entropy_floor");
    CHECK(s[1].name == "collapse_moment_bound");
    CHECK(s[2].name == "kinetic_dissipation_chain");
    CHECK(s[3].name == "second_moment_chain");
    CHECK(s[4].name == "entropy_upper_chain");
    CHECK(s[5].name == "kinetic_dissipation_envelope");
    CHECK(s[6].name == "second_moment_envelope");
    CHECK(s[7].name == "entropy_upper_envelope");
    CHECK(s[8].name == "entropy_lower_envelope");
    for (const auto& m : s) {
        CHECK(m.applicable);  // Gaussian data has E0 = 32.5 > 0
        CHECK(m.pass);
        CHECK(m.slack > 0.0);  // strict at t = 0 for this data
        CHECK(m.slack == doctest::Approx(m.rhs - m.lhs).epsilon(1e-14));
    }

    DiagnosticsRecord crit = gaussian_record(8.0 * kPi, 1.0, 10.0, 256);
    auto cset = envelope_monitors(crit, crit, MassRegime::critical, tol);
    REQUIRE(cset.size() == 3);
    CHECK(cset[2].name == "critical_energy_envelope");
    for (const auto& m : cset) CHECK(m.pass);

    DiagnosticsRecord sup = gaussian_record(16.0 * kPi, 0.5, 10.0, 256);
    auto pset = envelope_monitors(sup, sup, MassRegime::supercritical, tol);
    REQUIRE(pset.size() == 2);
    CHECK(pset[0].name == "jensen_entropy_floor");
    CHECK(pset[1].name == "collapse_moment_bound");

    CHECK_THROWS_AS(envelope_monitors(sub, sub, MassRegime::critical, tol),
                    std::invalid_argument);
}

TEST_CASE("negative initial energy disarms the envelope monitors only") {
    // shrink the second moment and entropy until E0 < 0; the E0-based
    // envelopes must flag themselves not applicable instead of misfiring
    DiagnosticsRecord r0 = gaussian_record(4.0 * kPi, 1.0, 10.0, 256);
    r0.entropy = -40.0;  // E0 = 3(K + 2S - W) + X2 + Xm turns negative
    CHECK(initial_energy(r0) < 0.0);
    auto s = envelope_monitors(r0, r0, MassRegime::subcritical, 0.1);
    REQUIRE(s.size() == 9);
    for (const auto& m : s) {
        bool envelope = m.name == "kinetic_dissipation_envelope" ||
                        m.name == "second_moment_envelope" ||
                        m.name == "entropy_upper_envelope" ||
                        m.name == "entropy_lower_envelope";
        CHECK(m.applicable == !envelope);
        if (envelope) CHECK(m.pass);  // not-applicable never reads as a failure
    }
}

TEST_CASE("collapse-time bound: gates, linear root, and curved root") {
    DiagnosticsRecord r0;
    r0.mass = 16.0 * kPi;
    r0.second_moment = 800.0;
    r0.entropy = 0.0;
    r0.interaction = 0.0;
    r0.kinetic = 0.0;
    r0.cross_moment = 0.0;

    CHECK_THROWS_AS(blowup_bound(r0, 0.5, 1.0, 4.0 * kPi), std::invalid_argument);
    CHECK_THROWS_AS(blowup_bound(r0, 0.0, 1.0, 16.0 * kPi), std::invalid_argument);
    CHECK_THROWS_AS(blowup_bound(r0, 1.0, 1.0, 16.0 * kPi), std::invalid_argument);
    CHECK_THROWS_AS(blowup_bound(r0, 0.5, -1.0, 16.0 * kPi), std::invalid_argument);

    SUBCASE("no entropy growth: the root is linear in the offset") {
        BlowupBound b = blowup_bound(r0, 0.5, 0.0, 16.0 * kPi);
        CHECK(b.growth == 0.0);
        CHECK(b.drift == doctest::Approx(-64.0 * kPi).epsilon(1e-13));
        // offset = (M/2pi) C(M) + 4 (M/8pi - 1) S0 - I_e + E0, by hand:
        double c16 = loghls_constant(16.0 * kPi);
        double offset = 8.0 * c16 + 800.0;  // S0 = W0 = K0 = Xm = 0
        CHECK(b.offset == doctest::Approx(offset).epsilon(1e-12));
        CHECK(b.latest_time == doctest::Approx(offset / (64.0 * kPi)).epsilon(1e-12));
        CHECK(b.rhs(0.0) == doctest::Approx(offset).epsilon(1e-12));
    }

    SUBCASE("nonpositive offset means already past the latest time") {
        DiagnosticsRecord tight = r0;
        tight.second_moment = 0.0;  // offset = 8 C(16pi) < 0
        BlowupBound b = blowup_bound(tight, 0.5, 0.0, 16.0 * kPi);
        CHECK(b.latest_time == 0.0);
    }

    SUBCASE("with entropy growth the bracketed root sits past the peak") {
        BlowupBound b = blowup_bound(r0, 0.5, 5.0, 16.0 * kPi);
        CHECK(b.growth == doctest::Approx(20.0).epsilon(1e-13));
        double t_peak = std::pow(-b.growth * b.alpha / b.drift, 1.0 / (1.0 - b.alpha));
        CHECK(b.latest_time > t_peak);
        CHECK(std::abs(b.rhs(b.latest_time)) <= 1e-6 * std::abs(b.offset));
        CHECK(b.rhs(b.latest_time + 1.0) < 0.0);
    }

    SUBCASE("near-critical mass pushes the bound far out") {
        DiagnosticsRecord near = r0;
        near.mass = 8.0 * kPi * (1.0 + 1e-6);
        BlowupBound b = blowup_bound(near, 0.5, 0.0, near.mass);
        CHECK(b.latest_time > 1e4);
    }
}
