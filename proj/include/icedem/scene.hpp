#ifndef ICEDEM_SCENE_HPP
#define ICEDEM_SCENE_HPP

#include <map>
#include <utility>
#include <vector>

#include "icedem/bond.hpp"
#include "icedem/contact.hpp"
#include "icedem/errors.hpp"
#include "icedem/particle.hpp"

namespace icedem {

/// Rigid half-space boundary. The outward normal points into the domain;
/// contacts use the particle's own radius as the reduced radius.
struct Wall {
    Vec3 point{};
    Vec3 normal{0.0, 0.0, 1.0};
};

using PairKey = std::pair<int, int>;

/// Complete simulation state plus global conditions. Registries are ordered
/// maps so that iteration, reduction, and serialization follow one fixed
/// pair order regardless of history or worker count.
struct Scene {
    std::vector<Particle> particles;
    std::vector<Wall> walls;

    std::map<PairKey, ContactState> contacts;       ///< particle-particle
    std::map<PairKey, ContactState> wall_contacts;  ///< (particle, wall)
    std::map<PairKey, Bond> bonds;

    BurgersParams material;
    FractureConfig fracture;
    FrictionConfig friction;

    Vec3 gravity{0.0, 0.0, -9.81};
    double dt = 1e-5;
    double time = 0.0;
    double temperature = 272.15;  ///< K, default for particles without their own

    bool bonding = true;
    /// Unit scale applied to the welded-beam moduli on top of the stored
    /// Burgers constants (declared by scene configs; the creep constants are
    /// kept exactly as fitted).
    double bond_modulus_scale = 1e6;
    double skin_fraction = 0.1;  ///< neighbor skin as a fraction of the min radius

    int threads = 1;
    unsigned seed = 0;

    /// Per-particle applied load, set by scenario drivers before each step.
    std::vector<Vec3> external_force;

    void validate() const {
        material.validate();
        fracture.validate();
        friction.validate();
        if (!(dt > 0.0)) throw ConfigError("Scene: dt must be positive");
        if (!(temperature >= 150.0) || !(temperature <= 273.16))
            throw ConfigError("Scene: temperature outside 150..273.16 K");
        for (std::size_t i = 0; i < particles.size(); ++i) {
            const auto& p = particles[i];
            if (p.id != static_cast<int>(i)) throw ConfigError("Scene: particle ids must equal indices");
            if (!(p.mass > 0.0) || !(p.radius > 0.0) || !(p.inertia > 0.0))
                throw ConfigError("Scene: particle mass, radius, inertia must be positive");
        }
    }

    double particle_temperature(int i) const {
        const double t = particles[static_cast<std::size_t>(i)].temperature;
        return t > 0.0 ? t : temperature;
    }
};

/// Material bundle for one pair at its local temperature.
inline PairMaterial pair_material(const Scene& s, double T) {
    PairMaterial m;
    m.normal = material_at_temperature(s.material, T);
    m.transverse = transverse_params(m.normal, 0.3);
    m.friction = s.friction;
    m.fracture = s.fracture;
    m.bond_modulus_scale = s.bond_modulus_scale;
    m.bonding = s.bonding;
    return m;
}

inline double kinetic_energy(const Scene& s) {
    double e = 0.0;
    for (const auto& p : s.particles) e += p.kinetic_energy();
    return e;
}

inline Vec3 linear_momentum(const Scene& s) {
    Vec3 m{};
    for (const auto& p : s.particles) m += p.mass * p.velocity;
    return m;
}

}  // namespace icedem

#endif  // ICEDEM_SCENE_HPP
