// Grids, fields, Gaussian initial data, desingularized velocity, snapshots.
#include "doctest.h"

#include "ksfluid/grid.hpp"
#include "ksfluid/snapshot.hpp"
#include "ksfluid/state.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

using namespace ksfluid;

namespace {
const double kPi = std::numbers::pi;

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("make_grid geometry") {
    GridSpec g = make_grid(1.0, 8);
    CHECK(g.dx == 0.25);
    CHECK(g.cell_x(0) == doctest::Approx(-0.875).epsilon(1e-15));
    CHECK(g.cell_y(0) == doctest::Approx(-0.875).epsilon(1e-15));
    CHECK(g.cell_x(7) == doctest::Approx(0.875).epsilon(1e-15));

    GridSpec big = make_grid(10.0, 256);
    CHECK(big.dx == 0.078125);  // power-of-two spacing is exact
    CHECK(big.cells() == 256u * 256u);

    // storage is row-major with the x index fastest
    CHECK(g.index(3, 2) == 2u * 8u + 3u);
    CHECK(g.index(0, 0) == 0u);
    CHECK(g.index(7, 7) == 63u);
}

TEST_CASE("make_grid invariants: symmetry and area") {
    for (auto [L, n] : {std::pair{1.0, 8}, {10.0, 256}, {7.3, 48}}) {
        GridSpec g = make_grid(L, n);
        // centers symmetric about the origin
        for (int i = 0; i < g.n; ++i)
            CHECK(std::abs(g.cell_x(i) + g.cell_x(g.n - 1 - i)) <= 1e-14 * L);
        // total area matches the box
        CHECK(double(g.n) * g.n * g.dx * g.dx ==
              doctest::Approx(4.0 * L * L).epsilon(1e-14));
    }
}

TEST_CASE("make_grid rejects bad arguments") {
    CHECK_THROWS_AS(make_grid(1.0, 7), std::invalid_argument);   // odd
    CHECK_THROWS_AS(make_grid(1.0, 6), std::invalid_argument);   // too few cells
    CHECK_THROWS_AS(make_grid(0.0, 8), std::invalid_argument);   // empty box
    CHECK_THROWS_AS(make_grid(-2.0, 8), std::invalid_argument);
}

TEST_CASE("compensated summation survives catastrophic cancellation") {
    KahanSum s;
    s.add(1e16);
    s.add(1.0);   // lost by a naive double accumulator
    s.add(-1e16);
    CHECK(s.value() == 1.0);
}

TEST_CASE("scalar field reductions") {
    GridSpec g = make_grid(2.0, 16);
    ScalarField f(g, 0.75);
    CHECK(f.integral() == doctest::Approx(0.75 * 16.0).epsilon(1e-15));
    f(3, 5) = -9.0;
    CHECK(f.max_abs() == 9.0);
    CHECK(f.max_value() == 0.75);
    CHECK(f.all_finite());
    f(0, 0) = std::nan("");
    CHECK_FALSE(f.all_finite());
}

TEST_CASE("gaussian_state hits the requested mass exactly") {
    GridSpec g = make_grid(10.0, 256);
    double m = 4.0 * kPi;
    ModelParams par = ModelParams::scaled(m, 10.0);
    GaussianSpec spec;
    spec.mass = m;
    spec.sigma = 1.0;
    double clamp = -1.0;
    FluidState s = gaussian_state(g, spec, par, &clamp);
    CHECK(std::abs(s.rho.integral() - m) <= 1e-12 * m);
    CHECK(clamp >= 0.0);
    CHECK(clamp <= 1e-3 * m);
    // second moment of the isotropic Gaussian: 2 M sigma^2
    KahanSum x2;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            x2.add((g.cell_x(i) * g.cell_x(i) + g.cell_y(j) * g.cell_y(j)) * s.rho(i, j));
    CHECK(x2.value() * g.cell_area() ==
          doctest::Approx(2.0 * m * spec.sigma * spec.sigma).epsilon(1e-2));
}

TEST_CASE("gaussian_state entropy matches the closed form") {
    // int rho log rho = M (log(M / 2 pi sigma^2) - 1) for the 2D Gaussian
    GridSpec g = make_grid(10.0, 256);
    double m = 8.0 * kPi;
    ModelParams par = ModelParams::scaled(m, 10.0);
    GaussianSpec spec;
    spec.mass = m;
    spec.sigma = 1.0;
    FluidState s = gaussian_state(g, spec, par, nullptr);
    KahanSum ent;
    for (double v : s.rho.values) ent.add(v * std::log(v));
    double want = m * (std::log(m / (2.0 * kPi)) - 1.0);
    CHECK(ent.value() * g.cell_area() == doctest::Approx(want).epsilon(1e-2));
}

TEST_CASE("gaussian_state with bulk velocity carries M |u|^2 kinetic energy") {
    GridSpec g = make_grid(8.0, 128);
    ModelParams par = ModelParams::scaled(1.0, 8.0);
    GaussianSpec spec;
    spec.mass = 1.0;
    spec.sigma = 1.0;
    spec.bulk_velocity = {1.0, 0.0};
    FluidState s = gaussian_state(g, spec, par, nullptr);
    KahanSum kin;
    for (std::size_t k = 0; k < s.rho.values.size(); ++k) {
        double rho = s.rho.values[k];
        kin.add((s.mom.x[k] * s.mom.x[k] + s.mom.y[k] * s.mom.y[k]) / rho);
    }
    CHECK(std::abs(kin.value() * g.cell_area() - 1.0) <= 1e-10);
}

TEST_CASE("gaussian_state rejects under-resolved or ill-fitting bumps") {
    GridSpec g = make_grid(2.0, 16);  // dx = 0.25
    ModelParams par;
    GaussianSpec spec;
    spec.sigma = 0.1;  // < 2 dx
    CHECK_THROWS_WITH_AS(static_cast<void>(gaussian_state(g, spec, par, nullptr)),
                         doctest::Contains("sigma"), std::invalid_argument);

    GridSpec g2 = make_grid(6.0, 64);
    GaussianSpec off;
    off.sigma = 1.0;
    off.center = {5.0, 0.0};  // margin 1 < 5 sigma
    CHECK_THROWS_WITH_AS(static_cast<void>(gaussian_state(g2, off, par, nullptr)),
                         doctest::Contains("box too small"), std::invalid_argument);
}

TEST_CASE("centered gaussian_state is reflection symmetric") {
    GridSpec g = make_grid(10.0, 256);
    double m = 4.0 * kPi;
    ModelParams par = ModelParams::scaled(m, 10.0);
    GaussianSpec spec;
    spec.mass = m;
    spec.sigma = 1.0;
    FluidState s = gaussian_state(g, spec, par, nullptr);
    double rho_max = s.rho.max_value();
    double worst = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            worst = std::max(worst, std::abs(s.rho(i, j) - s.rho(g.n - 1 - i, j)));
            worst = std::max(worst, std::abs(s.rho(i, j) - s.rho(i, g.n - 1 - j)));
        }
    CHECK(worst <= 1e-13 * rho_max);
}

TEST_CASE("velocity desingularization") {
    ModelParams par;  // eps_velocity = 1e-10

    SUBCASE("matches m / rho away from vacuum") {
        Vec2 u = velocity(1.0, {2.0, 0.0}, par);
        CHECK(std::abs(u.x - 2.0) <= 1e-15 * 2.0);
        CHECK(u.y == 0.0);
    }
    SUBCASE("zero momentum gives zero velocity") {
        Vec2 u = velocity(1e-12, {0.0, 0.0}, par);
        CHECK(u.x == 0.0);
        CHECK(u.y == 0.0);
    }
    SUBCASE("at rho = eps the map returns half of m/rho") {
        Vec2 u = velocity(par.eps_velocity, {par.eps_velocity, 0.0}, par);
        CHECK(u.x == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(u.y == 0.0);
    }
    SUBCASE("globally bounded by |m| / (2 eps)") {
        for (double rho : {0.0, 1e-14, 1e-10, 1e-6, 0.3}) {
            Vec2 u = velocity(rho, {0.7, -0.4}, par);
            double bound = std::hypot(0.7, -0.4) / (2.0 * par.eps_velocity);
            CHECK(std::hypot(u.x, u.y) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("scaled model parameters put the floor twelve orders under the mean density") {
    ModelParams par = ModelParams::scaled(4.0 * kPi, 10.0);
    CHECK(par.rho_floor == doctest::Approx(1e-12 * 4.0 * kPi / 100.0).epsilon(1e-15));
    CHECK(par.sound_speed == 1.0);
    CHECK(par.friction == 1.0);
}

TEST_CASE("snapshot round trip is bit exact") {
    GridSpec g = make_grid(2.5, 16);
    ScalarField f(g);
    for (std::size_t k = 0; k < f.values.size(); ++k)
        f.values[k] = std::sin(0.1 * double(k)) * 3.7;
    std::string path = temp_path("ksfluid_test_roundtrip.ksf1");
    write_snapshot(path, f, 0.625);
    Snapshot back = read_snapshot(path);
    CHECK(back.time == 0.625);
    CHECK(back.field.grid == g);
    CHECK(back.field.values == f.values);
    std::filesystem::remove(path);
}

TEST_CASE("snapshot header layout is pinned byte for byte") {
    GridSpec g = make_grid(2.5, 16);
    ScalarField f(g, 1.0);
    std::string path = temp_path("ksfluid_test_header.ksf1");
    write_snapshot(path, f, 0.625);

    std::ifstream in(path, std::ios::binary);
    unsigned char header[32];
    in.read(reinterpret_cast<char*>(header), 32);
    REQUIRE(in.gcount() == 32);

    CHECK(std::memcmp(header, "KSF1", 4) == 0);
    std::uint32_t n = 0;
    double half_width = 0.0, time = 0.0;
    std::memcpy(&n, header + 4, 4);
    std::memcpy(&half_width, header + 8, 8);
    std::memcpy(&time, header + 16, 8);
    CHECK(n == 16u);
    CHECK(half_width == 2.5);
    CHECK(time == 0.625);
    for (int k = 24; k < 32; ++k) CHECK(header[k] == 0);  // reserved

    // payload starts at byte 32 and is row-major float64
    double first = 0.0;
    in.read(reinterpret_cast<char*>(&first), 8);
    CHECK(first == 1.0);
    std::filesystem::remove(path);
}

TEST_CASE("snapshot reader rejects damaged files") {
    CHECK_THROWS_AS(static_cast<void>(read_snapshot(temp_path("ksfluid_no_such_file.ksf1"))),
                    std::runtime_error);

    std::string bad = temp_path("ksfluid_bad_magic.ksf1");
    {
        std::ofstream out(bad, std::ios::binary);
        char junk[64] = {'X', 'X', 'X', 'X'};
        out.write(junk, sizeof junk);
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(read_snapshot(bad)),
                         doctest::Contains("bad magic"), std::runtime_error);
    std::filesystem::remove(bad);

    GridSpec g = make_grid(1.0, 8);
    ScalarField f(g, 2.0);
    std::string trunc = temp_path("ksfluid_truncated.ksf1");
    write_snapshot(trunc, f, 0.0);
    std::filesystem::resize_file(trunc, 32 + 12);  // chop the payload
    CHECK_THROWS_WITH_AS(static_cast<void>(read_snapshot(trunc)),
                         doctest::Contains("truncated"), std::runtime_error);
    std::filesystem::remove(trunc);
}
