#ifndef ICEDEM_RHEOLOGY_HPP
#define ICEDEM_RHEOLOGY_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace icedem {

/// Four-parameter Burgers material in force-displacement form: a Maxwell unit
/// (spring k_i, dashpot c_i, in series) in series with a Kelvin unit (spring
/// k_d parallel to dashpot c_d). k_i/c_i govern the instantaneous response and
/// steady flow, k_d/c_d the delayed (recoverable) response. f0_b is the
/// load-independent cohesive capacity a freshly welded contact carries, valid
/// at the reference temperature T_ref.
struct BurgersParams {
    double k_i = 0.0;   ///< instantaneous stiffness (N/m)
    double k_d = 0.0;   ///< delayed stiffness (N/m)
    double c_i = 0.0;   ///< instantaneous viscosity (N s/m)
    double c_d = 0.0;   ///< delayed viscosity (N s/m)
    double f0_b = 0.0;  ///< load-independent sintering capacity (N)
    double T_ref = 272.15;  ///< temperature the constants are valid at (K)

    /// Exponential rate of delayed recovery (1/s). Dimensionally a rate, not
    /// a time: the creep solution carries exp(-t * relaxation_rate()).
    double relaxation_rate() const { return k_d / c_d; }

    void validate() const {
        if (!(k_i > 0.0) || !(k_d > 0.0) || !(c_i > 0.0) || !(c_d > 0.0))
            throw std::invalid_argument("BurgersParams: stiffnesses and viscosities must be positive");
        if (!(f0_b >= 0.0)) throw std::invalid_argument("BurgersParams: f0_b must be non-negative");
        if (!std::isfinite(k_i) || !std::isfinite(k_d) || !std::isfinite(c_i) ||
            !std::isfinite(c_d) || !std::isfinite(f0_b) || !std::isfinite(T_ref))
            throw std::invalid_argument("BurgersParams: non-finite value");
        if (!std::isfinite(relaxation_rate()) || !(relaxation_rate() > 0.0))
            throw std::invalid_argument("BurgersParams: k_d/c_d must be finite and positive");
    }
};

/// History carried by one Burgers element between steps. A fresh contact
/// starts from rest: zero delayed displacement, zero force.
struct BurgersState {
    double u_d = 0.0;     ///< delayed (Kelvin) displacement (m)
    double f_prev = 0.0;  ///< force at previous step (N)
    double u_prev = 0.0;  ///< total displacement at previous step (m)
};

struct BurgersStepResult {
    double force = 0.0;
    BurgersState state;
};

/// One finite-difference update of the Burgers element: given the total
/// displacement at the end of the step, returns the new force and state.
///
/// The update uses the trapezoidal (central) discretization of both the
/// Kelvin displacement and the Maxwell flow. The displacement entering the
/// force update is the increment over the step relative to state.u_prev;
/// the total-displacement reading does not reproduce the closed-form creep
/// response in the dt -> 0 limit, the incremental one does (checked against
/// the analytic creep curve in the test suite).
inline BurgersStepResult burgers_step(const BurgersParams& p, const BurgersState& s,
                                      double u_new, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("burgers_step: dt must be positive");
    if (!std::isfinite(u_new) || !std::isfinite(dt) || !std::isfinite(s.u_d) ||
        !std::isfinite(s.f_prev) || !std::isfinite(s.u_prev))
        throw std::invalid_argument("burgers_step: non-finite input");

    const double A = 1.0 + p.k_d * dt / (2.0 * p.c_d);
    const double B = 1.0 - p.k_d * dt / (2.0 * p.c_d);
    const double C = dt / (2.0 * p.c_d * A) + 1.0 / p.k_i + dt / (2.0 * p.c_i);
    const double D = dt / (2.0 * p.c_d * A) - 1.0 / p.k_i + dt / (2.0 * p.c_i);

    const double du = u_new - s.u_prev;
    const double f_new = (du + s.u_d * (1.0 - B / A) - s.f_prev * D) / C;
    const double u_d_new = (B * s.u_d + dt / (2.0 * p.c_d) * (f_new + s.f_prev)) / A;

    return {f_new, BurgersState{u_d_new, f_new, u_new}};
}

/// Advance the element state with the end-of-step force imposed (e.g. after
/// clamping a contact that cannot pull). Only the delayed displacement
/// depends on the force history, so it is re-integrated with f_new.
inline BurgersState burgers_advance_with_force(const BurgersParams& p, const BurgersState& s,
                                               double u_new, double f_new, double dt) {
    const double A = 1.0 + p.k_d * dt / (2.0 * p.c_d);
    const double B = 1.0 - p.k_d * dt / (2.0 * p.c_d);
    const double u_d_new = (B * s.u_d + dt / (2.0 * p.c_d) * (f_new + s.f_prev)) / A;
    return BurgersState{u_d_new, f_new, u_new};
}

/// Displacement increment that would produce the requested force at the end
/// of the step. Inverse of burgers_step in u; used by force-controlled
/// drivers and tests.
inline double burgers_displacement_for_force(const BurgersParams& p, const BurgersState& s,
                                             double f_target, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("burgers_displacement_for_force: dt must be positive");
    const double A = 1.0 + p.k_d * dt / (2.0 * p.c_d);
    const double B = 1.0 - p.k_d * dt / (2.0 * p.c_d);
    const double C = dt / (2.0 * p.c_d * A) + 1.0 / p.k_i + dt / (2.0 * p.c_i);
    const double D = dt / (2.0 * p.c_d * A) - 1.0 / p.k_i + dt / (2.0 * p.c_i);
    const double du = f_target * C + s.f_prev * D - s.u_d * (1.0 - B / A);
    return s.u_prev + du;
}

/// Closed-form creep displacement under a constant force f0 applied at t = 0:
/// instantaneous elastic part, steady viscous flow, and saturating delayed
/// part recovering at relaxation_rate().
inline double creep_displacement(const BurgersParams& p, double f0, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("creep_displacement: t must be non-negative");
    const double tr = p.relaxation_rate();
    return f0 * (1.0 / p.k_i + t / p.c_i + (1.0 - std::exp(-t * tr)) / p.k_d);
}

/// Time derivative of creep_displacement.
inline double creep_rate(const BurgersParams& p, double f0, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("creep_rate: t must be non-negative");
    const double tr = p.relaxation_rate();
    return f0 * (1.0 / p.c_i + tr / p.k_d * std::exp(-t * tr));
}

/// Convert all four constants to their transverse (shear-direction) values
/// for a given Poisson ratio: P' = P / (2 (1 + nu)). Capacity and reference
/// temperature are direction-independent and pass through.
inline BurgersParams transverse_params(const BurgersParams& p, double nu) {
    if (!(nu > -1.0) || !(nu <= 0.5))
        throw std::invalid_argument("transverse_params: Poisson ratio out of (-1, 0.5]");
    const double s = 1.0 / (2.0 * (1.0 + nu));
    BurgersParams q = p;
    q.k_i *= s;
    q.k_d *= s;
    q.c_i *= s;
    q.c_d *= s;
    return q;
}

/// Steady-state oscillatory response at angular frequency omega.
struct ComplexCompliance {
    double g_storage = 0.0;  ///< in-phase compliance (m/N)
    double g_loss = 0.0;     ///< quadrature compliance (m/N)
    double g_mag = 0.0;      ///< dynamic compliance, |g| (m/N)
    double phase = 0.0;      ///< displacement lag behind force (rad)
};

/// Frequency-domain compliance of the Burgers element. Closed forms of the
/// Maxwell and Kelvin contributions; equals the rational transfer function
/// of the governing ODE evaluated on the imaginary axis.
inline ComplexCompliance complex_compliance(const BurgersParams& p, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("complex_compliance: omega must be positive");
    const double km = p.k_i, cm = p.c_i;  // Maxwell pair
    const double kk = p.k_d, ck = p.c_d;  // Kelvin pair
    const double den = kk * kk + omega * omega * ck * ck;
    ComplexCompliance g;
    g.g_storage = 1.0 / km + kk / den;
    g.g_loss = 1.0 / (omega * cm) + omega * ck / den;
    g.g_mag = std::sqrt(g.g_storage * g.g_storage + g.g_loss * g.g_loss);
    g.phase = std::atan2(g.g_loss, g.g_storage);
    return g;
}

/// Williams-Landel-Ferry time-temperature shift factor.
struct WlfConstants {
    double c1 = 0.0;  ///< dimensionless
    double c2 = 0.0;  ///< K
};

inline double wlf_shift(double T, double T0, double c1, double c2) {
    const double dT = T - T0;
    const double den = c2 + dT;
    if (den == 0.0 || !std::isfinite(den))
        throw std::invalid_argument("wlf_shift: singular denominator C2 + (T - T0)");
    return std::exp(-c1 * dT / den);
}

inline double wlf_shift(double T, double T0, const WlfConstants& c) {
    return wlf_shift(T, T0, c.c1, c.c2);
}

/// Anchor temperature of the empirical shift fits below (K).
inline constexpr double kWlfAnchorTemperature = 272.15;

/// Empirical shift constants for polycrystalline ice, fitted on short-time
/// creep parameter sets between -23 and -1 degC and anchored at 272.15 K.
inline constexpr WlfConstants kWlfDelayedViscosity{-2.571, -6.154};
inline constexpr WlfConstants kWlfInstantaneousViscosity{-2.586, -7.706};
inline constexpr WlfConstants kWlfRelaxationTime{1.472e4, 2.431e5};

enum class ViscosityKind { instantaneous, delayed, relaxation_rate };

/// Temperature-scaled viscosity constants. Both viscosities grow as the
/// temperature drops; the recovery rate slows accordingly (its empirical law
/// is fitted on the time scale c_d/k_d, so the rate scales by the inverse).
/// Constants are rescaled from p.T_ref via the anchored empirical fits.
inline double viscosity_at_temperature(const BurgersParams& p, double T, ViscosityKind kind) {
    if (!(T >= 150.0) || !(T <= 273.16))
        throw std::invalid_argument("viscosity_at_temperature: T outside 150..273.16 K");
    const double T0 = kWlfAnchorTemperature;
    switch (kind) {
        case ViscosityKind::instantaneous:
            return p.c_i * wlf_shift(T, T0, kWlfInstantaneousViscosity) /
                   wlf_shift(p.T_ref, T0, kWlfInstantaneousViscosity);
        case ViscosityKind::delayed:
            return p.c_d * wlf_shift(T, T0, kWlfDelayedViscosity) /
                   wlf_shift(p.T_ref, T0, kWlfDelayedViscosity);
        case ViscosityKind::relaxation_rate:
            return p.relaxation_rate() * wlf_shift(p.T_ref, T0, kWlfRelaxationTime) /
                   wlf_shift(T, T0, kWlfRelaxationTime);
    }
    throw std::invalid_argument("viscosity_at_temperature: unknown kind");
}

/// Parameter set rescaled from p.T_ref to temperature T. Elastic constants
/// are temperature-independent; the viscosities follow the empirical shifts.
/// f0_b has no fitted temperature law and passes through unchanged.
inline BurgersParams material_at_temperature(const BurgersParams& p, double T) {
    BurgersParams q = p;
    q.c_i = viscosity_at_temperature(p, T, ViscosityKind::instantaneous);
    q.c_d = viscosity_at_temperature(p, T, ViscosityKind::delayed);
    q.T_ref = T;
    return q;
}

/// Arrhenius-type thermally activated creep rate: c * exp(-Q / (R T)).
/// Alternative temperature model; the default pipeline uses the WLF shifts.
inline double arrhenius_rate(double c, double Q, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("arrhenius_rate: T must be positive");
    constexpr double R = 8.314;  // J/(mol K)
    return c * std::exp(-Q / (R * T));
}

}  // namespace icedem

#endif  // ICEDEM_RHEOLOGY_HPP
