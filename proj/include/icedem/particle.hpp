#ifndef ICEDEM_PARTICLE_HPP
#define ICEDEM_PARTICLE_HPP

#include <numbers>
#include <stdexcept>

#include "icedem/quat.hpp"
#include "icedem/vec3.hpp"

namespace icedem {

/// Rigid spherical grain. Carries the full kinematic state the multi-value
/// integrator needs (up to the third position derivative) plus a unit
/// quaternion orientation.
struct Particle {
    int id = -1;
    double radius = 0.0;
    double mass = 0.0;
    double inertia = 0.0;  ///< sphere: (2/5) m r^2

    Vec3 position{};
    Vec3 velocity{};
    Vec3 acceleration{};
    Vec3 jerk{};

    Quat orientation{};
    Vec3 angular_velocity{};

    double temperature = 0.0;  ///< K; 0 means "inherit the scene default"
    bool fixed = false;        ///< kinematically held (walls, drivers)

    static Particle sphere(int id, const Vec3& pos, double radius, double density) {
        if (!(radius > 0.0) || !(density > 0.0))
            throw std::invalid_argument("Particle::sphere: radius and density must be positive");
        Particle p;
        p.id = id;
        p.position = pos;
        p.radius = radius;
        p.mass = density * 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
        p.inertia = 0.4 * p.mass * radius * radius;
        return p;
    }

    double kinetic_energy() const {
        return 0.5 * mass * norm_sq(velocity) + 0.5 * inertia * norm_sq(angular_velocity);
    }
};

}  // namespace icedem

#endif  // ICEDEM_PARTICLE_HPP
