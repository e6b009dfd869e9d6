#include <doctest.h>

#include <cmath>
#include <random>

#include "etcsim/control.hpp"
#include "etcsim/plant.hpp"

using namespace etcsim;

TEST_CASE("waterbox constants are consistent") {
    const PlantModel p = PlantModel::waterbox();
    CHECK_NOTHROW(p.validate());
    CHECK(p.A.max_abs() == 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(p.h_ref[j] == 0.06);
        CHECK(p.h_low[j] == 0.03);
    }
    CHECK(p.alpha_bar[0] == Vector{503.5950, 422.4378, 428.5839});
    CHECK(p.alpha_bar[1] == Vector{84.5099, 68.2069, 72.8442});
}

TEST_CASE("equilibrium input holds the state") {
    const PlantModel p = PlantModel::waterbox();
    for (Mode m : {Mode::WeakPump, Mode::BothPumps}) {
        PlantState s{Vector(3), m, 0.0};
        for (double dt : {0.01, 1.0, 37.0}) {
            const PlantState n = step(s, p.equilibrium(m), dt, p);
            CHECK(n.xi == Vector(3));
            CHECK(n.time == dt);
        }
    }
    const Vector xi{0.01, -0.02, 0.005};
    const PlantState n = step({xi, Mode::BothPumps, 0.0}, p.equilibrium(Mode::BothPumps), 13.0, p);
    CHECK(n.xi == xi);
}

TEST_CASE("closed valves drain at -B2 alpha2") {
    const PlantModel p = PlantModel::waterbox();
    const PlantState n = step({Vector(3), Mode::BothPumps, 0.0}, Vector(3), 1.0, p);
    const Vector ref = -(p.input_matrix(Mode::BothPumps) * p.equilibrium(Mode::BothPumps));
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(n.xi[j] == doctest::Approx(ref[j]).epsilon(1e-14));
        CHECK(n.xi[j] < 0.0);
    }
}

TEST_CASE("weak pump cannot hold the levels with valves fully open") {
    const PlantModel p = PlantModel::waterbox();
    const Vector rate = drift(p, Vector(3), Vector::constant(3, 360.0), Mode::WeakPump);
    for (std::size_t j = 0; j < 3; ++j) CHECK(rate[j] < 0.0);
}

TEST_CASE("step is additive in time for constant input") {
    const PlantModel p = PlantModel::waterbox();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.01, 0.01), v(0.0, 360.0), t(0.01, 2.0);
    for (int k = 0; k < 200; ++k) {
        const Vector xi{u(rng), u(rng), u(rng)};
        const Vector in{v(rng), v(rng), v(rng)};
        const double dt1 = t(rng), dt2 = t(rng);
        const PlantState a = step(step({xi, Mode::BothPumps, 0.0}, in, dt1, p), in, dt2, p);
        const PlantState b = step({xi, Mode::BothPumps, 0.0}, in, dt1 + dt2, p);
        for (std::size_t j = 0; j < 3; ++j) CHECK(a.xi[j] == doctest::Approx(b.xi[j]).epsilon(1e-12));
    }
}

TEST_CASE("levels are clipped at the tank floor") {
    const PlantModel p = PlantModel::waterbox();
    PlantState s{Vector::constant(3, -0.059), Mode::BothPumps, 0.0};
    s = step(s, Vector(3), 100.0, p);
    for (std::size_t j = 0; j < 3; ++j) CHECK(s.xi[j] == -p.h_ref[j]);
}

TEST_CASE("step rejects non-positive dt") {
    const PlantModel p = PlantModel::waterbox();
    CHECK_THROWS_AS(step({Vector(3), Mode::BothPumps, 0.0}, Vector(3), 0.0, p), std::invalid_argument);
    CHECK_THROWS_AS(step({Vector(3), Mode::BothPumps, 0.0}, Vector(3), -1.0, p), std::invalid_argument);
}

TEST_CASE("sensing") {
    const PlantState s{Vector{0.01, -0.02, 0.03}, Mode::BothPumps, 0.0};
    SUBCASE("zero noise is exact") {
        SensorNoise n({0.0, 5});
        CHECK(sense(s, n) == s.xi);
    }
    SUBCASE("fixed seed reproduces the sequence") {
        SensorNoise a({0.0005, 42}), b({0.0005, 42});
        for (int k = 0; k < 100; ++k) CHECK(sense(s, a) == sense(s, b));
    }
    SUBCASE("sample standard deviation") {
        SensorNoise n({0.0005, 9});
        const int N = 100000;
        double sum = 0.0, sq = 0.0;
        for (int k = 0; k < N; ++k) {
            const double w = 0.0005 * n.next_standard_normal();
            sum += w;
            sq += w * w;
        }
        const double mean = sum / N;
        const double sd = std::sqrt(sq / N - mean * mean);
        CHECK(std::abs(sd - 0.0005) < 0.02 * 0.0005);
    }
}

TEST_CASE("valve map") {
    CHECK(saturate_quantize(84.5099) == 80.0);
    CHECK(saturate_quantize(-5.0) == 0.0);
    CHECK(saturate_quantize(375.0) == 360.0);
    CHECK(saturate_quantize(360.0) == 360.0);
    CHECK(saturate_quantize(9.999) == 0.0);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-100.0, 500.0);
    for (int k = 0; k < 10000; ++k) {
        const double a = u(rng), b = u(rng);
        const double sa = saturate_quantize(a);
        CHECK(saturate_quantize(sa) == sa);
        if (a <= b) CHECK(sa <= saturate_quantize(b));
    }
}

TEST_CASE("compute_input") {
    const ControllerGains g = ControllerGains::waterbox();
    CHECK(compute_input(Vector(3), Mode::BothPumps, g) == Vector{80, 60, 70});
    CHECK(compute_input(Vector(3), Mode::WeakPump, g) == Vector{360, 360, 360});

    // Levels far above the reference push every raw command negative.
    const Vector v = compute_input(Vector::constant(3, 0.05), Mode::BothPumps, g);
    const Vector raw = -(g.gain(Mode::BothPumps) * Vector::constant(3, 0.05)) + g.offset(Mode::BothPumps);
    for (std::size_t j = 0; j < 3; ++j)
        if (raw[j] < 0.0) CHECK(v[j] == 0.0);
    CHECK(raw.values() != std::vector<double>{});
}

TEST_CASE("closed-loop gains are stabilising") {
    CHECK_NOTHROW(ControllerGains::waterbox().validate(PlantModel::waterbox()));
    ControllerGains bad = ControllerGains::waterbox();
    bad.K[1] = -bad.K[1];
    CHECK_THROWS(bad.validate(PlantModel::waterbox()));
}

TEST_CASE("mode automaton guards") {
    const ModeGuards guards = ModeGuards::from_plant(PlantModel::waterbox());

    ModeAutomaton a(Mode::WeakPump);
    CHECK_FALSE(a.update(Vector{0.0, -0.0299, 0.0}, Vector{0, 0, 0}, 1.0, guards));
    CHECK(a.update(Vector{0.0, -0.03, 0.0}, Vector{0, 0, 0}, 2.0, guards));
    CHECK(a.mode() == Mode::BothPumps);

    ModeAutomaton b(Mode::BothPumps);
    CHECK_FALSE(b.update(Vector(3), Vector{80, 60, 70}, 1.0, guards));
    CHECK_FALSE(b.update(Vector(3), Vector{60, 60, 60}, 2.0, guards));  // exactly 180 stays
    CHECK(b.mode() == Mode::BothPumps);
    CHECK(b.update(Vector(3), Vector{50, 60, 60}, 3.0, guards));
    CHECK(b.mode() == Mode::WeakPump);
    REQUIRE(b.first_release_time().has_value());
    CHECK(*b.first_release_time() == 3.0);
}

TEST_CASE("mode automaton alternates and records increasing switch times") {
    const ModeGuards guards = ModeGuards::from_plant(PlantModel::waterbox());
    ModeAutomaton a(Mode::BothPumps);
    const Vector low{-0.05, 0, 0}, open{0, 0, 0};
    double t = 0.0;
    for (int k = 0; k < 10; ++k) {
        // One call flips at most once even when both guards would hold.
        t += 1.0;
        CHECK(a.update(low, open, t, guards));
    }
    CHECK(a.switch_count() == 10);
    for (std::size_t k = 1; k < a.switch_times().size(); ++k) CHECK(a.switch_times()[k] > a.switch_times()[k - 1]);
    CHECK(*a.first_release_time() == 1.0);
    CHECK_THROWS_AS(a.update(low, open, t, guards), std::logic_error);
}
