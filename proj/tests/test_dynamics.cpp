#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "icedem/dynamics.hpp"
#include "icedem/presets.hpp"

using namespace icedem;
using Catch::Approx;

namespace {

Particle grain(int id, const Vec3& pos, double r = 3e-3) {
    return Particle::sphere(id, pos, r, 916.7);
}

Scene two_grain_scene() {
    Scene s;
    s.material = *ice_preset(-5.0);
    s.temperature = s.material.T_ref;
    s.gravity = {};
    s.particles = {grain(0, {0.0, 0.0, 0.0}), grain(1, {7e-3, 0.0, 0.0})};
    return s;
}

// Two equal masses joined by a linear spring, driven through the public
// predictor/corrector. Analytic relative motion: L(t) = rest + A cos(w t).
struct SpringPair {
    Particle a, b;
    double k = 50.0;
    double rest = 6e-3;

    explicit SpringPair(double amplitude) {
        a = grain(0, {0.0, 0.0, 0.0});
        b = grain(1, {rest + amplitude, 0.0, 0.0});
        const Vec3 f = force_on_a();
        a.acceleration = f / a.mass;
        b.acceleration = -1.0 * f / b.mass;
    }
    Vec3 force_on_a() const {
        const Vec3 d = b.position - a.position;
        const double L = norm(d);
        return k * (L - rest) * (d / L);
    }
    void step(double dt) {
        a = gear_predict(a, dt);
        b = gear_predict(b, dt);
        const Vec3 f = force_on_a();
        a = gear_correct(a, f, {}, dt);
        b = gear_correct(b, -1.0 * f, {}, dt);
    }
    double length() const { return norm(b.position - a.position); }
    double omega() const { return std::sqrt(k / (0.5 * a.mass)); }
    double energy() const {
        const double L = length();
        const Vec3 vrel = b.velocity - a.velocity;
        return 0.5 * (0.5 * a.mass) * norm_sq(vrel) + 0.5 * k * (L - rest) * (L - rest);
    }
};

}  // namespace

TEST_CASE("gear_predict: rest state, drift, and Taylor exactness") {
    Particle p = grain(0, {1.0, 2.0, 3.0});
    const Particle q = gear_predict(p, 1e-3);
    CHECK(q.position == p.position);
    CHECK(q.velocity == p.velocity);

    p.velocity = {2.0, 0.0, 0.0};
    const Particle r = gear_predict(p, 1e-3);
    CHECK(r.position.x == Approx(1.0 + 2e-3).epsilon(1e-15));

    // cubic trajectory x = t^3 is predicted exactly (the expansion carries
    // the full third derivative)
    const double t = 0.7, dt = 1e-2;
    Particle c = grain(0, {t * t * t, 0.0, 0.0});
    c.velocity = {3.0 * t * t, 0.0, 0.0};
    c.acceleration = {6.0 * t, 0.0, 0.0};
    c.jerk = {6.0, 0.0, 0.0};
    const double xc = gear_predict(c, dt).position.x;
    CHECK(xc == Approx(std::pow(t + dt, 3)).epsilon(1e-14));

    // quartic trajectory: one-step prediction error is exactly dt^4
    Particle q4 = grain(0, {t * t * t * t, 0.0, 0.0});
    q4.velocity = {4.0 * t * t * t, 0.0, 0.0};
    q4.acceleration = {12.0 * t * t, 0.0, 0.0};
    q4.jerk = {24.0 * t, 0.0, 0.0};
    for (const double h : {1e-2, 5e-3, 2.5e-3}) {
        const double err = std::abs(gear_predict(q4, h).position.x - std::pow(t + h, 4));
        REQUIRE(err == Approx(h * h * h * h).epsilon(1e-4));
    }
}

TEST_CASE("gear_correct: exact force prediction needs no correction") {
    Particle p = grain(0, {0.0, 0.0, 0.0});
    p.acceleration = {0.5, 0.0, 0.0};
    Particle q = gear_predict(p, 1e-3);
    const Vec3 f = q.mass * q.acceleration;  // matches the predicted acceleration
    const Particle r = gear_correct(q, f, {}, 1e-3);
    CHECK(r.position == q.position);
    CHECK(r.velocity == q.velocity);
    CHECK(r.jerk == q.jerk);
}

TEST_CASE("gear_correct: free fall from rest follows the parabola") {
    Particle p = grain(0, {0.0, 0.0, 0.0});
    const Vec3 g{0.0, 0.0, -9.81};
    p.acceleration = g;  // consistent start: gravity acts from t = 0
    const double dt = 1e-4;
    for (int k = 0; k < 10000; ++k) {
        p = gear_predict(p, dt);
        p = gear_correct(p, {}, g, dt);
    }
    const double t = 10000 * dt;
    CHECK(p.position.z == Approx(-0.5 * 9.81 * t * t).epsilon(1e-10));
    CHECK(p.velocity.z == Approx(-9.81 * t).epsilon(1e-10));
}

TEST_CASE("gear integrator: two-body oscillation energy drift below 1e-4") {
    SpringPair s(5e-4);
    const double T = 2.0 * std::numbers::pi / s.omega();
    const double dt = T / 1000.0;
    const double e0 = s.energy();
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {  // 10 periods
        s.step(dt);
        worst = std::max(worst, std::abs(s.energy() - e0) / e0);
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("gear integrator: convergence order at least 2 on the two-body test") {
    const double A = 5e-4;
    SpringPair probe(A);
    const double T = 2.0 * std::numbers::pi / probe.omega();
    const double t_end = 10.0 * T;

    auto global_err = [&](double dt) {
        SpringPair s(A);
        const long n = std::lround(t_end / dt);
        for (long k = 0; k < n; ++k) s.step(dt);
        const double exact = s.rest + A * std::cos(s.omega() * (n * dt));
        return std::abs(s.length() - exact);
    };

    const double e250 = global_err(T / 250.0);
    const double e500 = global_err(T / 500.0);
    const double e1000 = global_err(T / 1000.0);
    const double slope1 = std::log2(e250 / e500);
    const double slope2 = std::log2(e500 / e1000);
    INFO("errors " << e250 << " " << e500 << " " << e1000);
    CHECK(slope1 >= 2.0);
    CHECK(slope2 >= 2.0);
}

TEST_CASE("critical_dt: arithmetic and scaling") {
    Scene s = two_grain_scene();
    s.material.k_i = 9e3;
    s.particles[0].mass = 1e-6;
    s.particles[1].mass = 2e-6;
    const double want = 0.1 * std::sqrt(1e-6 / 9e3);
    CHECK(critical_dt(s) == Approx(want).epsilon(1e-12));

    s.particles[0].mass = 0.5e-6;
    CHECK(critical_dt(s) == Approx(want / std::sqrt(2.0)).epsilon(1e-12));

    Scene empty;
    empty.material = *ice_preset(-5.0);
    CHECK(std::isinf(critical_dt(empty)));
}

TEST_CASE("stability: spring test stable at half the bound, diverging far above it") {
    // The four-value scheme stays stable well past the safety estimate; the
    // measured instability onset for the two-body spring sits near
    // omega*dt ~ 1.5, i.e. ~10x the bound. Checked at 0.5x and 15x.
    const double A = 5e-4;
    auto run_energy_ratio = [&](double dt_factor) {
        SpringPair s(A);
        // translate the per-particle bound to this two-body test
        const double dt_c = 0.1 * std::sqrt(s.a.mass / s.k);
        const double dt = dt_factor * dt_c;
        const double e0 = s.energy();
        for (int k = 0; k < 4000; ++k) {
            s.step(dt);
            if (!std::isfinite(s.energy()) || s.energy() > 100.0 * e0) return 1e9;
        }
        return s.energy() / e0;
    };
    CHECK(run_energy_ratio(0.5) == Approx(1.0).epsilon(1e-3));
    CHECK(run_energy_ratio(15.0) > 10.0);
}

TEST_CASE("update_orientation: identity, full turn, norm maintenance") {
    Particle p = grain(0, {});
    const Quat q0 = p.orientation;
    p = update_orientation(p, 1e-3);
    CHECK(p.orientation == q0);

    // one full revolution about z in 1000 steps returns to the start
    p.angular_velocity = {0.0, 0.0, 2.0 * std::numbers::pi};
    for (int k = 0; k < 1000; ++k) p = update_orientation(p, 1e-3);
    CHECK(std::abs(std::abs(p.orientation.w) - 1.0) < 1e-6);
    CHECK(std::abs(p.orientation.z) < 1e-6);

    std::mt19937 rng(5);
    std::normal_distribution<double> wd(0.0, 20.0);
    p.angular_velocity = {wd(rng), wd(rng), wd(rng)};
    for (int k = 0; k < 100000; ++k) {
        p = update_orientation(p, 1e-4);
    }
    CHECK(std::abs(norm(p.orientation) - 1.0) < 1e-9);
}

TEST_CASE("neighbor_search: trivial cases") {
    Scene s = two_grain_scene();
    CHECK(neighbor_search(s).empty());  // 7 mm apart, out of reach

    s.particles[1].position = {5.9e-3, 0.0, 0.0};  // overlapping
    auto p = neighbor_search(s);
    REQUIRE(p.size() == 1);
    CHECK(p[0] == PairKey{0, 1});

    // bonded pairs stay listed regardless of the gap
    s.particles[1].position = {50e-3, 0.0, 0.0};
    Bond b = create_bond(0, 1, 1e-5, 1.5e-3, 6e-3, 0.0, s.material, s.fracture, 6e-3);
    s.bonds.emplace(PairKey{0, 1}, b);
    auto pb = neighbor_search(s);
    REQUIRE(pb.size() == 1);
    CHECK(pb[0] == PairKey{0, 1});
}

TEST_CASE("neighbor_search: equals brute force on random scenes") {
    std::mt19937 rng(20260810);
    std::uniform_real_distribution<double> pos(0.0, 0.08);
    std::uniform_real_distribution<double> rad(1e-3, 3e-3);
    Scene s;
    s.material = *ice_preset(-5.0);
    s.temperature = s.material.T_ref;
    for (int i = 0; i < 1000; ++i)
        s.particles.push_back(grain(i, {pos(rng), pos(rng), pos(rng)}, rad(rng)));

    double r_min = 1e9;
    for (const auto& p : s.particles) r_min = std::min(r_min, p.radius);
    const double skin = s.skin_fraction * r_min;

    std::vector<PairKey> brute;
    for (std::size_t i = 0; i < s.particles.size(); ++i)
        for (std::size_t j = i + 1; j < s.particles.size(); ++j) {
            const double reach = s.particles[i].radius + s.particles[j].radius + skin;
            if (norm_sq(s.particles[i].position - s.particles[j].position) < reach * reach)
                brute.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    std::sort(brute.begin(), brute.end());

    const auto got = neighbor_search(s);
    REQUIRE(got.size() == brute.size());
    CHECK(got == brute);
}

TEST_CASE("step: empty scene only advances time") {
    Scene s;
    s.material = *ice_preset(-5.0);
    s.temperature = s.material.T_ref;
    step(s);
    CHECK(s.time == Approx(s.dt));
}

TEST_CASE("step: single particle in gravity free-falls") {
    Scene s;
    s.material = *ice_preset(-5.0);
    s.temperature = s.material.T_ref;
    s.particles = {grain(0, {0.0, 0.0, 0.0})};
    s.dt = 1e-4;
    prime_accelerations(s);
    for (int k = 0; k < 1000; ++k) step(s);
    const double t = s.time;
    CHECK(s.particles[0].position.z == Approx(-0.5 * 9.81 * t * t).epsilon(1e-9));
}

TEST_CASE("step: head-on impact conserves linear momentum per step") {
    Scene s = two_grain_scene();
    s.bonding = false;
    s.dt = 1e-6;
    s.particles[1].position = {6.1e-3, 0.0, 0.0};
    s.particles[0].velocity = {0.5, 0.0, 0.0};
    s.particles[1].velocity = {-0.5, 0.0, 0.0};
    const double scale = s.particles[0].mass * norm(s.particles[0].velocity) +
                         s.particles[1].mass * norm(s.particles[1].velocity);
    const Vec3 p0 = linear_momentum(s);
    for (int k = 0; k < 2000; ++k) {
        step(s);
        REQUIRE(norm(linear_momentum(s) - p0) / scale < 1e-12);
    }
    // they must actually have collided and separated
    CHECK(s.particles[0].velocity.x < 0.0);
    CHECK(s.particles[1].velocity.x > 0.0);
}

TEST_CASE("step: trajectories are bitwise identical across worker counts") {
    auto build = [] {
        Scene s;
        s.material = *ice_preset(-5.0);
        s.temperature = s.material.T_ref;
        s.dt = 1e-6;
        s.walls.push_back(Wall{{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}});
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> xy(0.0, 0.02);
        std::uniform_real_distribution<double> z(3e-3, 0.015);
        for (int i = 0; i < 12; ++i) {
            auto p = grain(i, {xy(rng), xy(rng), z(rng)});
            p.velocity = {0.0, 0.0, -0.3};
            s.particles.push_back(p);
        }
        return s;
    };
    Scene a = build();
    a.threads = 1;
    Scene b = build();
    b.threads = 4;
    for (int k = 0; k < 300; ++k) {
        step(a);
        step(b);
    }
    for (std::size_t i = 0; i < a.particles.size(); ++i) {
        REQUIRE(a.particles[i].position == b.particles[i].position);
        REQUIRE(a.particles[i].velocity == b.particles[i].velocity);
        REQUIRE(a.particles[i].angular_velocity == b.particles[i].angular_velocity);
    }
    CHECK(a.bonds.size() == b.bonds.size());
}

TEST_CASE("step: friction cap holds during an oblique wall impact") {
    Scene s;
    s.material = *ice_preset(-5.0);
    s.temperature = s.material.T_ref;
    s.bonding = false;
    s.gravity = {0.0, 0.0, -9.81};
    s.dt = 5e-7;
    s.walls.push_back(Wall{{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}});
    auto p = grain(0, {0.0, 0.0, 3.05e-3});
    p.velocity = {0.4, 0.0, -0.8};
    s.particles = {p};

    for (int k = 0; k < 4000; ++k) {
        step(s);
        if (!s.wall_contacts.empty()) {
            const auto& cs = s.wall_contacts.begin()->second;
            const double f_n = cs.normal.f_prev;
            const double f_t = std::abs(cs.tangential.f_prev);
            REQUIRE(f_t <= s.friction.mu_s * std::max(f_n, 0.0) + 1e-12);
        }
    }
}
