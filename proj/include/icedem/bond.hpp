#ifndef ICEDEM_BOND_HPP
#define ICEDEM_BOND_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "icedem/quat.hpp"
#include "icedem/rheology.hpp"
#include "icedem/vec3.hpp"

namespace icedem {

enum class BondState { intact, softening, broken };
enum class FailureMode { none, tensile, shear };

/// How the cohesion term of the shear-strength line is obtained.
enum class CohesionMode {
    tau_ice,  ///< cohesion equals the grain-size-adjusted ice strength
    zero,     ///< frictional shear strength only
};

/// Strength and post-peak configuration for the bond lattice.
struct FractureConfig {
    /// Softening steepness (Pa/m): the decay length of a channel's tail is
    /// strength / G_f. Larger values dissipate the stored energy faster.
    double G_f = 6.0e9;
    double tau_0 = 0.6e6;    ///< baseline strength (Pa), ice near -10 degC
    double k_hp = 0.002e6;   ///< grain-size strengthening coefficient (Pa sqrt(m))
    double x_hp = 0.5;       ///< grain-size exponent
    double mu_s = 0.5;       ///< static friction in the shear-strength line
    CohesionMode cohesion_mode = CohesionMode::tau_ice;
    /// A softening bond is dropped once every channel has decayed below this
    /// fraction of its frozen peak load.
    double broken_fraction = 0.01;

    void validate() const {
        if (!(tau_0 > 0.0)) throw std::invalid_argument("FractureConfig: tau_0 must be positive");
        if (!(mu_s >= 0.0)) throw std::invalid_argument("FractureConfig: mu_s must be non-negative");
        if (!(G_f > 0.0)) throw std::invalid_argument("FractureConfig: G_f must be positive");
        if (!(broken_fraction > 0.0) || !(broken_fraction < 1.0))
            throw std::invalid_argument("FractureConfig: broken_fraction must be in (0, 1)");
    }
};

/// Grain-size-adjusted strength: tau_0 + k d^x.
inline double hall_petch_strength(const FractureConfig& cfg, double d_grain) {
    if (!(d_grain > 0.0))
        throw std::invalid_argument("hall_petch_strength: grain size must be positive");
    return cfg.tau_0 + cfg.k_hp * std::pow(d_grain, cfg.x_hp);
}

/// Elastic and viscous constants of a cylindrical bond welded at indentation
/// depth d. Values inherit the unit scale of the Burgers constants; scene
/// configs declare any additional scale applied on top.
struct BondElasticConstants {
    double E = 0.0;
    double G = 0.0;
    double eta = 0.0;  ///< eta_n == eta_t
};

inline BondElasticConstants bond_elastic_constants(const BurgersParams& p, double d) {
    if (!(d > 0.0)) throw std::invalid_argument("bond_elastic_constants: indentation must be positive");
    BondElasticConstants c;
    c.E = (p.k_i + p.k_d) * d;
    c.G = c.E / (2.0 * (1.0 + 0.3));
    c.eta = p.c_i * d;
    return c;
}

/// Cylindrical viscoelastic beam welded between a particle pair.
///
/// Kinematic accumulators (elongation, shear displacement, twist, bending)
/// and the cached loads all live in the global frame; rotate_frame keeps
/// them attached to the cross-section as the pair reorients. The weld
/// reference length follows the pair while the contact is being compressed,
/// so the normal channel only ever measures separation from the most recent
/// welded configuration.
struct Bond {
    int i = -1, j = -1;

    double r_ij = 0.0;       ///< reduced radius at creation (m)
    double area = 0.0;       ///< cross-section, non-decreasing (m^2)
    double radius_b = 0.0;   ///< cross-section radius (m)
    double length = 0.0;     ///< current center distance (m)
    double ref_length = 0.0; ///< zero-force separation (m)

    double E = 0.0, G = 0.0;
    double eta_n = 0.0, eta_t = 0.0;
    double tau_n = 0.0;      ///< tensile strength (Pa)
    double cohesion = 0.0;   ///< cohesive part of the shear-strength line (Pa)
    double f0_b = 0.0;       ///< load-independent tensile capacity (N)

    // accumulated kinematics, global frame
    double elong = 0.0;      ///< normal separation from the weld reference (m)
    Vec3 shear_u{};          ///< accumulated shear displacement (m)
    double twist = 0.0;      ///< accumulated twist angle (rad)
    Vec3 bend{};             ///< accumulated bending angle (rad)

    // loads at last evaluation, global frame
    Vec3 stored_shear{};     ///< shear force (N)
    Vec3 stored_bending{};   ///< bending torque (N m)
    double stored_torsion = 0.0;  ///< torsion torque along the normal (N m)

    Vec3 normal_prev{};      ///< unit normal at last evaluation
    BondState state = BondState::intact;

    // softening bookkeeping, frozen at failure onset
    double u_nl = 0.0, u_tl = 0.0, phi_l = 0.0, theta_l = 0.0;
    double lim_f_n = 0.0, lim_f_t = 0.0, lim_t_phi = 0.0, lim_t_theta = 0.0;
    double tau_s_frozen = 0.0;

    double created_at = 0.0;

    double max_indentation() const {
        return r_ij > 0.0 ? area / (std::numbers::pi * r_ij) : 0.0;
    }
};

/// Weld a new bond for a pair in compressive contact. `indentation` is the
/// inelastic (creep) part of the overlap; the cross-section welded by
/// pressure sintering is pi * r_ij * indentation.
inline Bond create_bond(int i, int j, double indentation, double r_ij, double center_distance,
                        double now, const BurgersParams& mat, const FractureConfig& cfg,
                        double grain_diameter, double modulus_scale = 1.0) {
    if (!(indentation > 0.0))
        throw std::invalid_argument("create_bond: requires compressive contact (indentation > 0)");
    if (!(r_ij > 0.0)) throw std::invalid_argument("create_bond: reduced radius must be positive");
    Bond b;
    b.i = i;
    b.j = j;
    b.r_ij = r_ij;
    b.area = std::numbers::pi * r_ij * indentation;
    b.radius_b = std::sqrt(b.area / std::numbers::pi);
    b.length = center_distance;
    b.ref_length = center_distance;
    const auto ec = bond_elastic_constants(mat, indentation);
    b.E = ec.E * modulus_scale;
    b.G = ec.G * modulus_scale;
    b.eta_n = ec.eta * modulus_scale;
    b.eta_t = ec.eta * modulus_scale;
    b.tau_n = hall_petch_strength(cfg, grain_diameter);
    b.cohesion = cfg.cohesion_mode == CohesionMode::tau_ice ? b.tau_n : 0.0;
    b.f0_b = mat.f0_b;
    b.created_at = now;
    return b;
}

/// Update the welded cross-section under continued compression. Growth
/// follows the inelastic indentation and never reverses: pressure-melted
/// liquid freezes back into the neck, unloading does not un-weld it.
inline void grow_bond(Bond& b, double f_n_c, double indentation, const BurgersParams& mat,
                      double modulus_scale = 1.0) {
    if (b.state != BondState::intact) return;
    if (!(f_n_c > 0.0)) return;  // growth requires interface pressure
    if (!(indentation > b.max_indentation())) return;
    b.area = std::numbers::pi * b.r_ij * indentation;
    b.radius_b = std::sqrt(b.area / std::numbers::pi);
    const auto ec = bond_elastic_constants(mat, indentation);
    b.E = ec.E * modulus_scale;
    b.G = ec.G * modulus_scale;
    b.eta_n = ec.eta * modulus_scale;
    b.eta_t = ec.eta * modulus_scale;
}

/// Loads carried by a bond: tensile force, shear force, torsion and bending
/// torques. Signs/directions follow the kinematic inputs.
struct BondLoads {
    double f_n = 0.0;
    Vec3 f_t{};
    double t_phi = 0.0;
    Vec3 t_theta{};
};

struct BondRates {
    double u_n = 0.0;
    Vec3 u_t{};
    double phi = 0.0;
    Vec3 theta{};
};

/// Kelvin-type (spring parallel to dashpot) beam response for each channel.
inline BondLoads bond_forces(const Bond& b, double u_n, const Vec3& u_t, double phi,
                             const Vec3& theta, const BondRates& rates) {
    if (b.state == BondState::broken)
        throw std::invalid_argument("bond_forces: called on a broken bond");
    const double A = b.area;
    const double rb = b.radius_b;
    const double lb = b.length;
    const double rb4 = rb * rb * rb * rb;
    constexpr double pi = std::numbers::pi;
    BondLoads out;
    out.f_n = b.eta_n * A * rates.u_n / lb + b.E * A * u_n / lb;
    out.f_t = b.eta_t * A / (2.0 * rb) * rates.u_t + b.G * A / (2.0 * rb) * u_t;
    out.t_phi = b.eta_t * pi * rb4 / (2.0 * lb) * rates.phi + b.G * pi * rb4 / (2.0 * lb) * phi;
    out.t_theta = b.eta_n * pi * rb4 / (4.0 * lb) * rates.theta + b.E * pi * rb4 / (4.0 * lb) * theta;
    return out;
}

/// Failure test for an intact bond. Tensile: axial plus outer-fiber bending
/// stress against the tensile capacity (which includes the load-independent
/// component f0_b). Shear: shear plus outer-fiber torsion stress against the
/// Mohr-Coulomb line from the current compressive contact force. If both
/// criteria trip in one step the larger overshoot wins; ties go tensile.
/// Inputs are load magnitudes.
inline FailureMode check_failure(const Bond& b, double f_n_b, double f_t_b, double t_theta,
                                 double t_phi, double f_n_c, const FractureConfig& cfg) {
    if (b.state != BondState::intact)
        throw std::invalid_argument("check_failure: bond is not intact");
    // Written in force units (stress criteria multiplied by area) so that a
    // vanishing cross-section degenerates gracefully to the f0_b capacity.
    const double tens_load = std::max(0.0, f_n_b) + 4.0 * t_theta / b.radius_b;
    const double tens_cap = b.tau_n * b.area + b.f0_b;
    const double shear_load = f_t_b + 4.0 * t_phi / b.radius_b;
    const double C = cfg.cohesion_mode == CohesionMode::tau_ice ? b.cohesion : 0.0;
    const double shear_cap = cfg.mu_s * std::max(0.0, f_n_c) + C * b.area;
    const double rt = tens_cap > 0.0 ? tens_load / tens_cap : 0.0;
    const double rs = shear_cap > 0.0 ? shear_load / shear_cap : 0.0;
    if (rt < 1.0 && rs < 1.0) return FailureMode::none;
    return rt >= rs ? FailureMode::tensile : FailureMode::shear;
}

/// Freeze the failure-onset kinematics and loads and enter the softening
/// branch. The shear strength is frozen too since its frictional part
/// depends on the contact force at onset.
inline void begin_softening(Bond& b, double u_n, const Vec3& u_t, double phi, const Vec3& theta,
                            const BondLoads& loads, double f_n_c, const FractureConfig& cfg) {
    if (b.state != BondState::intact)
        throw std::invalid_argument("begin_softening: bond is not intact");
    b.u_nl = u_n;
    b.u_tl = norm(u_t);
    b.phi_l = std::abs(phi);
    b.theta_l = norm(theta);
    b.lim_f_n = std::max(0.0, loads.f_n);
    b.lim_f_t = norm(loads.f_t);
    b.lim_t_phi = std::abs(loads.t_phi);
    b.lim_t_theta = norm(loads.t_theta);
    const double C = cfg.cohesion_mode == CohesionMode::tau_ice ? b.cohesion : 0.0;
    b.tau_s_frozen = cfg.mu_s * std::max(0.0, f_n_c) / b.area + C;
    b.state = BondState::softening;
}

/// Post-peak response: each channel decays exponentially from its frozen
/// peak load as the corresponding displacement opens past its failure-onset
/// value. The exponent is clamped at zero, so the force never exceeds the
/// peak if a channel momentarily closes. Marks the bond broken once every
/// channel is below cfg.broken_fraction of its peak.
inline BondLoads softening_forces(Bond& b, const FractureConfig& cfg, double u_n, const Vec3& u_t,
                                  double phi, const Vec3& theta) {
    if (b.state != BondState::softening)
        throw std::invalid_argument("softening_forces: bond is not softening");
    const double kn = cfg.G_f / b.tau_n;
    const double ks = b.tau_s_frozen > 0.0 ? cfg.G_f / b.tau_s_frozen : kn;
    BondLoads out;
    out.f_n = b.lim_f_n * std::exp(-kn * std::max(0.0, u_n - b.u_nl));
    const double ut_mag = norm(u_t);
    const double ft = b.lim_f_t * std::exp(-ks * std::max(0.0, ut_mag - b.u_tl));
    out.f_t = ut_mag > 0.0 ? u_t * (ft / ut_mag) : Vec3{};
    const double tp = b.lim_t_phi * std::exp(-ks * b.radius_b * std::max(0.0, std::abs(phi) - b.phi_l));
    out.t_phi = phi >= 0.0 ? tp : -tp;
    const double th_mag = norm(theta);
    const double tt = b.lim_t_theta * std::exp(-kn * b.radius_b * std::max(0.0, th_mag - b.theta_l));
    out.t_theta = th_mag > 0.0 ? theta * (tt / th_mag) : Vec3{};

    const double frac = cfg.broken_fraction;
    auto decayed = [frac](double now, double lim) { return lim == 0.0 || now <= frac * lim; };
    if (decayed(out.f_n, b.lim_f_n) && decayed(ft, b.lim_f_t) && decayed(tp, b.lim_t_phi) &&
        decayed(tt, b.lim_t_theta))
        b.state = BondState::broken;
    return out;
}

/// Track the rotating pair frame: rotate every stored global-frame vector by
/// the rotation taking the previous normal onto the new one (axis from the
/// cross product, angle from its magnitude; per-step rotations stay well
/// below 90 degrees).
inline void rotate_bond_frame(Bond& b, const Vec3& n_new) {
    if (b.normal_prev == Vec3{}) {
        b.normal_prev = n_new;
        return;
    }
    const Vec3 axis = cross(b.normal_prev, n_new);
    const double s = norm(axis);
    if (s < 1e-15) {
        b.normal_prev = n_new;
        return;
    }
    const double angle = std::asin(std::min(1.0, s));
    const Quat q = from_axis_angle(axis / s, angle);
    b.shear_u = rotate(q, b.shear_u);
    b.bend = rotate(q, b.bend);
    b.stored_shear = rotate(q, b.stored_shear);
    b.stored_bending = rotate(q, b.stored_bending);
    b.normal_prev = n_new;
}

}  // namespace icedem

#endif  // ICEDEM_BOND_HPP
