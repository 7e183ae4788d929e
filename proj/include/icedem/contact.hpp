#ifndef ICEDEM_CONTACT_HPP
#define ICEDEM_CONTACT_HPP

#include <cmath>
#include <stdexcept>

#include "icedem/bond.hpp"
#include "icedem/particle.hpp"
#include "icedem/rheology.hpp"
#include "icedem/vec3.hpp"

namespace icedem {

/// Friction and rolling-resistance coefficients for the granular phase.
struct FrictionConfig {
    double mu_s = 0.5;   ///< static friction
    double mu_k = 0.45;  ///< kinetic friction (close to static for ice)
    double mu_r = 0.1;   ///< rolling plastic-moment coefficient
    double C_r = 0.0;    ///< rolling viscous damping (N m s)
    /// Once sliding, stick is re-entered only below this relative tangential
    /// speed; the bare static/kinetic rule chatters at the boundary.
    double stick_speed_tol = 1e-6;

    void validate() const {
        if (!(mu_k >= 0.0) || !(mu_s >= mu_k))
            throw std::invalid_argument("FrictionConfig: need 0 <= mu_k <= mu_s");
        if (!(mu_r >= 0.0) || !(C_r >= 0.0))
            throw std::invalid_argument("FrictionConfig: rolling coefficients must be non-negative");
    }
};

/// Persistent per-pair state for an unbonded (granular) contact. Cleared on
/// contact loss; re-contact starts from rest.
struct ContactState {
    int i = -1, j = -1;
    BurgersState normal;          ///< Burgers history of the overlap
    BurgersState tangential;      ///< scalar Burgers history of |tangential_accum|
    Vec3 tangential_accum{};      ///< accumulated tangential displacement of i past j (m)
    Vec3 rolling_angle{};         ///< accumulated relative rolling angle (rad)
    Vec3 prev_normal{};           ///< contact normal at last evaluation
    bool sliding = false;
    double age = 0.0;             ///< s since first touch
};

/// Geometry and relative motion of a particle pair at one instant. The
/// normal points from particle j to particle i; the overlap is positive in
/// compression.
struct ContactKinematics {
    Vec3 n{};               ///< unit normal, j -> i
    double distance = 0.0;  ///< center distance (m)
    double u_n = 0.0;       ///< overlap r_i + r_j - distance (m)
    double u_n_rate = 0.0;  ///< d(overlap)/dt (m/s), positive while compressing
    Vec3 u_t_inc{};         ///< tangential displacement increment this step (m)
    Vec3 v_rt{};            ///< rolling relative velocity (m/s)
    Vec3 v_rn{};            ///< twisting relative velocity (m/s)
    Vec3 omega_rel{};       ///< angular velocity of i relative to j (rad/s)
    double r_ij = 0.0;      ///< reduced radius (m)
    double r_ij_corr = 0.0; ///< overlap-corrected reduced radius (m)
};

inline ContactKinematics contact_kinematics(const Particle& pi, const Particle& pj, double dt) {
    const Vec3 d = pi.position - pj.position;
    const double dist = norm(d);
    if (!(dist > 0.0))
        throw std::invalid_argument("contact_kinematics: coincident particle centers");
    ContactKinematics k;
    k.n = d / dist;
    k.distance = dist;
    k.u_n = pi.radius + pj.radius - dist;
    const Vec3 v_rel = pi.velocity - pj.velocity;
    k.u_n_rate = -dot(v_rel, k.n);
    k.u_t_inc = dt * tangential_part(v_rel, k.n);
    k.r_ij = pi.radius * pj.radius / (pi.radius + pj.radius);
    k.r_ij_corr = (pi.radius - k.u_n) * (pj.radius - k.u_n) / (pi.radius + pj.radius - k.u_n);
    k.omega_rel = pi.angular_velocity - pj.angular_velocity;
    k.v_rt = -k.r_ij_corr * (cross(k.n, pi.angular_velocity) - cross(k.n, pj.angular_velocity));
    k.v_rn = k.r_ij * dot(k.omega_rel, k.n) * k.n;
    return k;
}

/// Kinematics against a static wall (half-space). The wall acts as a plane
/// through `point` with outward unit `normal`; the effective radius is the
/// particle's own.
inline ContactKinematics wall_kinematics(const Particle& pi, const Vec3& point, const Vec3& normal,
                                         double dt) {
    ContactKinematics k;
    k.n = normal;
    const double gap = dot(pi.position - point, normal);
    k.distance = gap;
    k.u_n = pi.radius - gap;
    k.u_n_rate = -dot(pi.velocity, normal);
    k.u_t_inc = dt * tangential_part(pi.velocity, normal);
    k.r_ij = pi.radius;
    k.r_ij_corr = pi.radius - k.u_n;
    k.omega_rel = pi.angular_velocity;
    k.v_rt = -k.r_ij_corr * cross(k.n, pi.angular_velocity);
    k.v_rn = k.r_ij * dot(k.omega_rel, k.n) * k.n;
    return k;
}

/// Compressive Burgers force of the overlap. The granular contact cannot
/// pull: when the viscoelastic solution turns tensile the force is clamped
/// at zero and the delayed displacement keeps relaxing force-free (tension
/// is carried by bonds only). Updates the state in place.
inline double normal_force(ContactState& st, const BurgersParams& p, double u_n, double dt) {
    if (!(u_n >= 0.0)) throw std::invalid_argument("normal_force: overlap must be non-negative");
    const auto r = burgers_step(p, st.normal, u_n, dt);
    if (r.force >= 0.0) {
        st.normal = r.state;
        return r.force;
    }
    st.normal = burgers_advance_with_force(p, st.normal, u_n, 0.0, dt);
    return 0.0;
}

struct FrictionResult {
    Vec3 f_t{};
    bool sliding = false;
};

/// Coulomb friction: keep the trial force while below the static limit,
/// otherwise slide at the kinetic level along the trial direction.
inline FrictionResult friction_force(const Vec3& f_t_trial, double f_n, const FrictionConfig& cfg) {
    if (!(f_n >= 0.0)) throw std::invalid_argument("friction_force: f_n must be non-negative");
    const double trial = norm(f_t_trial);
    if (trial < cfg.mu_s * f_n) return {f_t_trial, false};
    const Vec3 dir = trial > 0.0 ? f_t_trial / trial : Vec3{};
    return {cfg.mu_k * f_n * dir, true};
}

/// Rolling resistance moment: elastic spring on the accumulated rolling
/// angle, clamped at the plastic moment mu_r * r_ij * f_n, plus viscous
/// damping on the rolling rate.
inline Vec3 rolling_resistance(const Vec3& theta_r, const Vec3& theta_dot, double k_t, double r_ij,
                               double f_n, const FrictionConfig& cfg) {
    if (!(f_n >= 0.0)) throw std::invalid_argument("rolling_resistance: f_n must be non-negative");
    const double k_r = k_t * r_ij * r_ij;
    const double elastic = k_r * norm(theta_r);
    const double plastic = cfg.mu_r * r_ij * f_n;
    const double gamma = (elastic <= plastic || elastic == 0.0) ? 1.0 : plastic / elastic;
    return -k_r * gamma * theta_r - cfg.C_r * theta_dot;
}

/// Everything the pair pipeline needs to know about the scene's material.
struct PairMaterial {
    BurgersParams normal;      ///< Burgers constants at the pair temperature
    BurgersParams transverse;  ///< transverse conversion of the above
    FrictionConfig friction;
    FractureConfig fracture;
    double bond_modulus_scale = 1.0;
    bool bonding = true;
};

/// Force and torque on particle i from one pair interaction; particle j
/// receives the exact negation of the force and `t_j` as torque.
struct PairForces {
    Vec3 f_i{};
    Vec3 t_i{};
    Vec3 t_j{};
    bool bonded = false;    ///< bond carried load this step
    double f_n_contact = 0.0;
    double f_n_bond = 0.0;  ///< tensile bond load (diagnostic)
};

namespace detail {

/// Granular tangential trial force: the accumulated tangential displacement
/// drives a scalar transverse Burgers element along its own direction.
inline Vec3 tangential_trial(ContactState& st, const BurgersParams& transverse,
                             const Vec3& u_t_inc, const Vec3& n, double dt) {
    st.tangential_accum = tangential_part(st.tangential_accum, n) + u_t_inc;
    const double mag = norm(st.tangential_accum);
    const auto r = burgers_step(transverse, st.tangential, mag, dt);
    st.tangential = r.state;
    if (mag == 0.0) return Vec3{};
    return (-r.force / mag) * st.tangential_accum;
}

/// Scale the tangential memory down to the slid force level so the spring
/// does not wind up while sliding.
inline void rewind_tangential(ContactState& st, double f_capped) {
    const double f_prev = std::abs(st.tangential.f_prev);
    if (f_prev <= f_capped || f_prev == 0.0) return;
    const double s = f_capped / f_prev;
    st.tangential_accum *= s;
    st.tangential.f_prev *= s;
    st.tangential.u_prev *= s;
    st.tangential.u_d *= s;
}

}  // namespace detail

/// Full pair interaction: bond pipeline (growth, beam loads, failure,
/// softening) when a bond is present, granular contact (Burgers normal,
/// capped tangential, rolling resistance) otherwise; the two are blended by
/// the bonded indicator exactly as the force-split prescribes. `cs` may be
/// null when there is no overlap (bond-only stretch); `bond` may be null for
/// a plain granular pair.
inline PairForces assemble_pair(ContactState* cs, Bond* bond, const ContactKinematics& kin,
                                const PairMaterial& mat, double dt) {
    PairForces out;
    const bool overlapping = kin.u_n > 0.0 && cs != nullptr;

    // --- granular contact ---
    double f_n_c = 0.0;
    Vec3 f_t_c{};
    Vec3 m_roll{};
    if (overlapping) {
        f_n_c = normal_force(*cs, mat.normal, kin.u_n, dt);
        cs->age += dt;
        cs->prev_normal = kin.n;
    }

    const bool zeta = bond != nullptr && bond->state != BondState::broken;

    if (overlapping && !zeta) {
        const Vec3 trial = detail::tangential_trial(*cs, mat.transverse, kin.u_t_inc, kin.n, dt);
        const double v_t = norm(kin.u_t_inc) / dt;
        if (cs->sliding && v_t < mat.friction.stick_speed_tol) cs->sliding = false;
        auto fr = friction_force(trial, f_n_c, mat.friction);
        if (cs->sliding && !fr.sliding) {
            // hysteresis: stay kinetic until the slip speed drops below tol
            const double trial_mag = norm(trial);
            const Vec3 dir = trial_mag > 0.0 ? trial / trial_mag : Vec3{};
            fr = {mat.friction.mu_k * f_n_c * dir, true};
        }
        cs->sliding = fr.sliding;
        if (fr.sliding) detail::rewind_tangential(*cs, mat.friction.mu_k * f_n_c);
        f_t_c = fr.f_t;

        cs->rolling_angle += dt * tangential_part(kin.omega_rel, kin.n);
        const Vec3 roll_rate = tangential_part(kin.omega_rel, kin.n);
        m_roll = rolling_resistance(cs->rolling_angle, roll_rate, mat.transverse.k_i, kin.r_ij,
                                    f_n_c, mat.friction);
    } else if (overlapping) {
        // bond carries shear and rotation; granular memory stays clean
        cs->tangential_accum = {};
        cs->tangential = {};
        cs->rolling_angle = {};
        cs->sliding = false;
    }

    // --- bond ---
    double f_n_b = 0.0;
    Vec3 f_t_b{};
    Vec3 t_bond{};
    if (zeta) {
        Bond& b = *bond;
        rotate_bond_frame(b, kin.n);
        b.length = kin.distance;

        const bool compressing = kin.u_n > 0.0 && kin.u_n_rate >= 0.0;
        double elong_rate = 0.0;
        if (compressing) {
            // the weld reference follows the pair while pressure persists
            b.ref_length = kin.distance;
            b.elong = 0.0;
        } else {
            const double elong_new = kin.distance - b.ref_length;
            elong_rate = (elong_new - b.elong) / dt;
            b.elong = elong_new;
        }

        const Vec3 bend_rate = tangential_part(kin.omega_rel, kin.n);
        const double twist_rate = dot(kin.omega_rel, kin.n);
        b.shear_u = tangential_part(b.shear_u, kin.n) + kin.u_t_inc;
        b.bend += dt * bend_rate;
        b.twist += dt * twist_rate;

        if (b.state == BondState::intact && overlapping)
            grow_bond(b, f_n_c, kin.u_n - f_n_c / mat.normal.k_i, mat.normal,
                      mat.bond_modulus_scale);

        BondRates rates;
        rates.u_n = elong_rate;
        rates.u_t = kin.u_t_inc / dt;
        rates.phi = twist_rate;
        rates.theta = bend_rate;

        BondLoads loads;
        if (b.state == BondState::intact) {
            loads = bond_forces(b, b.elong, b.shear_u, b.twist, b.bend, rates);
            const auto mode = check_failure(b, loads.f_n, norm(loads.f_t), norm(loads.t_theta),
                                            std::abs(loads.t_phi), f_n_c, mat.fracture);
            if (mode != FailureMode::none)
                begin_softening(b, b.elong, b.shear_u, b.twist, b.bend, loads, f_n_c, mat.fracture);
        } else {
            loads = softening_forces(b, mat.fracture, b.elong, b.shear_u, b.twist, b.bend);
        }
        b.stored_shear = loads.f_t;
        b.stored_bending = loads.t_theta;
        b.stored_torsion = loads.t_phi;

        // the bond's normal channel only acts while unloading or in tension
        if (!compressing) f_n_b = loads.f_n;
        f_t_b = loads.f_t;
        t_bond = loads.t_theta + loads.t_phi * kin.n;
        out.bonded = true;
    }

    // --- blend & lever arms ---
    out.f_n_contact = f_n_c;
    out.f_n_bond = f_n_b;
    const Vec3 f_t_on_i = zeta ? -1.0 * f_t_b : f_t_c;  // contact f_t_c already restoring
    out.f_i = (f_n_c - f_n_b) * kin.n + f_t_on_i;
    if (zeta) {
        // bonded torque is the beam's own bending + torsion, as a pure pair
        out.t_i = -1.0 * t_bond;
        out.t_j = t_bond;
    } else {
        // contact torque: tangential force at the reduced-radius lever on
        // both partners, plus the rolling-resistance pair
        const Vec3 lever_torque = cross(-kin.r_ij * kin.n, f_t_on_i);
        out.t_i = lever_torque + m_roll;
        out.t_j = lever_torque - m_roll;
    }
    return out;
}

}  // namespace icedem

#endif  // ICEDEM_CONTACT_HPP
