#ifndef ICEDEM_DYNAMICS_HPP
#define ICEDEM_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "icedem/parallel.hpp"
#include "icedem/scene.hpp"

namespace icedem {

/// Taylor prediction of the translational state (fourth-order, four values:
/// position, velocity, acceleration, jerk).
inline Particle gear_predict(Particle p, double dt) {
    const Vec3 a = p.acceleration;
    const Vec3 j = p.jerk;
    p.position += p.velocity * dt + 0.5 * a * dt * dt + (dt * dt * dt / 6.0) * j;
    p.velocity += a * dt + 0.5 * j * dt * dt;
    p.acceleration += j * dt;
    return p;
}

/// Correction from the force evaluated at the predicted state. The jerk
/// closes the four-value scheme with the standard corrector column.
inline Particle gear_correct(Particle p, const Vec3& total_force, const Vec3& g, double dt) {
    const Vec3 delta = total_force / p.mass + g - p.acceleration;
    p.acceleration += delta;
    p.velocity += (5.0 / 12.0) * dt * delta;
    p.position += (1.0 / 12.0) * dt * dt * delta;
    p.jerk += delta / dt;
    return p;
}

/// Angular velocity update from the summed torque (spheres: scalar inertia).
inline Particle integrate_spin(Particle p, const Vec3& total_torque, double dt) {
    p.angular_velocity += total_torque * (dt / p.inertia);
    return p;
}

/// Advance the orientation quaternion from the angular velocity and
/// renormalize; norms stay within 1e-9 of unity indefinitely.
inline Particle update_orientation(Particle p, double dt) {
    p.orientation = normalized(rotation_increment(p.angular_velocity, dt) * p.orientation);
    return p;
}

/// Seed the stored accelerations with the body forces acting at rest. The
/// multi-value corrector assumes a consistent derivative stack; starting a
/// loaded particle from a zeroed acceleration leaves a permanent O(dt)
/// velocity offset. Call once when building a scene from rest, never on a
/// restored snapshot.
inline void prime_accelerations(Scene& s) {
    s.external_force.resize(s.particles.size());
    for (std::size_t i = 0; i < s.particles.size(); ++i) {
        auto& p = s.particles[i];
        if (!p.fixed) p.acceleration = s.gravity + s.external_force[i] / p.mass;
    }
}

/// Stability estimate for the explicit scheme: 0.1 sqrt(m_min / k_i).
inline double critical_dt(const Scene& s) {
    double m_min = std::numeric_limits<double>::infinity();
    for (const auto& p : s.particles)
        if (!p.fixed) m_min = std::min(m_min, p.mass);
    if (!std::isfinite(m_min)) return std::numeric_limits<double>::infinity();
    return 0.1 * std::sqrt(m_min / s.material.k_i);
}

/// All pairs whose surface gap is below the skin distance, plus every bonded
/// pair regardless of gap. Uniform cell grid with cells at least one maximum
/// diameter plus skin wide; output sorted, so downstream reductions follow a
/// fixed order.
inline std::vector<PairKey> neighbor_search(const Scene& s) {
    std::vector<PairKey> pairs;
    const auto n = s.particles.size();
    if (n >= 2) {
        double r_min = std::numeric_limits<double>::infinity();
        double r_max = 0.0;
        for (const auto& p : s.particles) {
            r_min = std::min(r_min, p.radius);
            r_max = std::max(r_max, p.radius);
        }
        const double skin = s.skin_fraction * r_min;
        const double cell = 2.0 * r_max + skin;

        auto key = [cell](const Vec3& x) -> std::uint64_t {
            const auto ix = static_cast<std::int64_t>(std::floor(x.x / cell)) + (1LL << 20);
            const auto iy = static_cast<std::int64_t>(std::floor(x.y / cell)) + (1LL << 20);
            const auto iz = static_cast<std::int64_t>(std::floor(x.z / cell)) + (1LL << 20);
            return (static_cast<std::uint64_t>(ix) << 42) | (static_cast<std::uint64_t>(iy) << 21) |
                   static_cast<std::uint64_t>(iz);
        };

        std::unordered_map<std::uint64_t, std::vector<int>> grid;
        grid.reserve(n);
        for (std::size_t i = 0; i < n; ++i) grid[key(s.particles[i].position)].push_back(static_cast<int>(i));

        for (std::size_t i = 0; i < n; ++i) {
            const auto& pi = s.particles[i];
            for (int dx = -1; dx <= 1; ++dx)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dz = -1; dz <= 1; ++dz) {
                        const Vec3 probe = pi.position + Vec3{dx * cell, dy * cell, dz * cell};
                        const auto it = grid.find(key(probe));
                        if (it == grid.end()) continue;
                        for (int j : it->second) {
                            if (j <= static_cast<int>(i)) continue;
                            const auto& pj = s.particles[static_cast<std::size_t>(j)];
                            const double reach = pi.radius + pj.radius + skin;
                            if (norm_sq(pi.position - pj.position) < reach * reach)
                                pairs.emplace_back(static_cast<int>(i), j);
                        }
                    }
        }
    }
    for (const auto& [k, b] : s.bonds) pairs.push_back(k);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

namespace detail {

struct PairRecord {
    PairForces forces;
    double u_n = 0.0;
    double distance = 0.0;
    double r_ij = 0.0;
    double inelastic_indent = 0.0;
    Vec3 n{};
    bool active = false;
    bool lose_contact = false;
    bool bond_broken = false;
    bool want_bond = false;
};

}  // namespace detail

/// Advance the scene by one step: predict, find neighbors, evaluate every
/// pair (bond growth, beam loads, failure, softening, contact forces),
/// reduce in fixed pair order, correct, update orientations. Registry
/// mutations (bond creation, broken-bond and lost-contact removal) happen
/// serially after the parallel evaluation, so trajectories are bitwise
/// identical for any worker count.
inline void step(Scene& s) {
    const auto n = s.particles.size();
    s.external_force.resize(n);

    static thread_local bool warned = false;
    const double dt = s.dt;
    const double dt_crit = critical_dt(s);
    if (dt > dt_crit && !warned) {
        std::cerr << "icedem: dt " << dt << " exceeds the stability estimate " << dt_crit << "\n";
        warned = true;
    }

    // predict (fixed particles move kinematically at their set velocity)
    parallel_for(n, s.threads, [&](std::size_t i) {
        auto& p = s.particles[i];
        if (p.fixed) {
            p.position += p.velocity * dt;
        } else {
            p = gear_predict(p, dt);
        }
    });

    const auto pairs = neighbor_search(s);

    // contact states must exist before the parallel phase (map nodes are
    // stable; values are mutated concurrently, the map itself is not)
    for (const auto& [i, j] : pairs) {
        const auto& pi = s.particles[static_cast<std::size_t>(i)];
        const auto& pj = s.particles[static_cast<std::size_t>(j)];
        const double reach = pi.radius + pj.radius;
        if (norm_sq(pi.position - pj.position) < reach * reach) {
            auto [it, fresh] = s.contacts.try_emplace({i, j});
            if (fresh) {
                it->second.i = i;
                it->second.j = j;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t w = 0; w < s.walls.size(); ++w) {
            const auto& p = s.particles[i];
            const auto& wall = s.walls[w];
            if (dot(p.position - wall.point, wall.normal) < p.radius) {
                auto [it, fresh] = s.wall_contacts.try_emplace({static_cast<int>(i), static_cast<int>(w)});
                if (fresh) {
                    it->second.i = static_cast<int>(i);
                    it->second.j = -1 - static_cast<int>(w);
                }
            }
        }
    }

    // pair evaluation
    std::vector<detail::PairRecord> rec(pairs.size());
    parallel_for(pairs.size(), s.threads, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        auto& r = rec[k];
        const auto& pi = s.particles[static_cast<std::size_t>(i)];
        const auto& pj = s.particles[static_cast<std::size_t>(j)];
        const auto kin = contact_kinematics(pi, pj, dt);
        const auto bit = s.bonds.find({i, j});
        Bond* bond = bit != s.bonds.end() ? &bit->second : nullptr;
        if (kin.u_n <= 0.0 && bond == nullptr) {
            r.lose_contact = s.contacts.count({i, j}) > 0;
            return;
        }
        const auto cit = s.contacts.find({i, j});
        ContactState* cs = cit != s.contacts.end() ? &cit->second : nullptr;
        const double T = 0.5 * (s.particle_temperature(i) + s.particle_temperature(j));
        const auto mat = pair_material(s, T);
        r.forces = assemble_pair(cs, bond, kin, mat, dt);
        r.active = true;
        r.u_n = kin.u_n;
        r.distance = kin.distance;
        r.r_ij = kin.r_ij;
        r.n = kin.n;
        r.inelastic_indent = kin.u_n - r.forces.f_n_contact / mat.normal.k_i;
        r.lose_contact = cs != nullptr && kin.u_n <= 0.0;
        r.bond_broken = bond != nullptr && bond->state == BondState::broken;
        r.want_bond = s.bonding && bond == nullptr && kin.u_n > 0.0 &&
                      r.forces.f_n_contact > 0.0 && r.inelastic_indent > 0.0;
    });

    // wall evaluation
    std::vector<std::pair<PairKey, detail::PairRecord>> wrec;
    for (const auto& [key, st] : s.wall_contacts) wrec.push_back({key, {}});
    parallel_for(wrec.size(), s.threads, [&](std::size_t k) {
        const auto [ip, iw] = wrec[k].first;
        auto& r = wrec[k].second;
        const auto& p = s.particles[static_cast<std::size_t>(ip)];
        const auto& wall = s.walls[static_cast<std::size_t>(iw)];
        const auto kin = wall_kinematics(p, wall.point, wall.normal, dt);
        if (kin.u_n <= 0.0) {
            r.lose_contact = true;
            return;
        }
        auto& cs = s.wall_contacts.at({ip, iw});
        const auto mat = pair_material(s, s.particle_temperature(ip));
        r.forces = assemble_pair(&cs, nullptr, kin, mat, dt);
        r.active = true;
    });

    // ordered reduction
    std::vector<Vec3> force(n), torque(n);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& r = rec[k];
        if (!r.active) continue;
        const auto [i, j] = pairs[k];
        force[static_cast<std::size_t>(i)] += r.forces.f_i;
        force[static_cast<std::size_t>(j)] -= r.forces.f_i;
        torque[static_cast<std::size_t>(i)] += r.forces.t_i;
        torque[static_cast<std::size_t>(j)] += r.forces.t_j;
        if (!is_finite(r.forces.f_i) || !is_finite(r.forces.t_i) || !is_finite(r.forces.t_j))
            throw NumericalError("non-finite force between particles " + std::to_string(i) +
                                 " and " + std::to_string(j) + " at t=" + std::to_string(s.time));
    }
    for (const auto& [key, r] : wrec) {
        if (!r.active) continue;
        force[static_cast<std::size_t>(key.first)] += r.forces.f_i;
        torque[static_cast<std::size_t>(key.first)] += r.forces.t_i;
        if (!is_finite(r.forces.f_i) || !is_finite(r.forces.t_i))
            throw NumericalError("non-finite force between particle " + std::to_string(key.first) +
                                 " and wall " + std::to_string(key.second) +
                                 " at t=" + std::to_string(s.time));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_finite(s.external_force[i]))
            throw NumericalError("non-finite external force on particle " + std::to_string(i));
        force[i] += s.external_force[i];
    }

    // registry maintenance, fixed order
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& r = rec[k];
        const auto key = pairs[k];
        if (r.lose_contact) s.contacts.erase(key);
        if (r.bond_broken) s.bonds.erase(key);
        if (r.want_bond) {
            const double grain_d =
                s.particles[static_cast<std::size_t>(key.first)].radius +
                s.particles[static_cast<std::size_t>(key.second)].radius;
            const double T =
                0.5 * (s.particle_temperature(key.first) + s.particle_temperature(key.second));
            const auto mat = material_at_temperature(s.material, T);
            Bond b = create_bond(key.first, key.second, r.inelastic_indent, r.r_ij, r.distance,
                                 s.time, mat, s.fracture, grain_d, s.bond_modulus_scale);
            b.normal_prev = r.n;
            s.bonds.emplace(key, b);
        }
    }
    for (const auto& [key, r] : wrec)
        if (r.lose_contact) s.wall_contacts.erase(key);

    // correct
    parallel_for(n, s.threads, [&](std::size_t i) {
        auto& p = s.particles[i];
        if (!p.fixed) {
            p = gear_correct(p, force[i], s.gravity, dt);
            p = integrate_spin(p, torque[i], dt);
        }
        p = update_orientation(p, dt);
    });

    s.time += dt;
}

}  // namespace icedem

#endif  // ICEDEM_DYNAMICS_HPP
