#ifndef ICEDEM_QUAT_HPP
#define ICEDEM_QUAT_HPP

#include <cmath>

#include "icedem/vec3.hpp"

namespace icedem {

/// Unit quaternion for particle orientations (w + xi + yj + zk).
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    constexpr Quat() = default;
    constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
};

constexpr Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr bool operator==(const Quat& a, const Quat& b) {
    return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
}

inline double norm(const Quat& q) { return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z); }

inline Quat normalized(const Quat& q) {
    const double n = norm(q);
    return {q.w / n, q.x / n, q.y / n, q.z / n};
}

inline Quat from_axis_angle(const Vec3& axis, double angle) {
    const double h = 0.5 * angle;
    const double s = std::sin(h);
    return {std::cos(h), s * axis.x, s * axis.y, s * axis.z};
}

/// Rotate a vector by a unit quaternion: v' = q v q*.
inline Vec3 rotate(const Quat& q, const Vec3& v) {
    const Vec3 u{q.x, q.y, q.z};
    const Vec3 c = cross(u, v);
    return v + 2.0 * q.w * c + 2.0 * cross(u, c);
}

/// Incremental rotation for a body spinning at `omega` (world frame) over dt.
/// Series fallback keeps the map smooth through omega -> 0.
inline Quat rotation_increment(const Vec3& omega, double dt) {
    const double w = norm(omega);
    const double h = 0.5 * dt;
    double s;  // sin(w*h)/w
    if (w * h < 1e-8) {
        s = h - h * h * h * w * w / 6.0;
    } else {
        s = std::sin(w * h) / w;
    }
    return {std::cos(w * h), s * omega.x, s * omega.y, s * omega.z};
}

inline bool is_finite(const Quat& q) {
    return std::isfinite(q.w) && std::isfinite(q.x) && std::isfinite(q.y) && std::isfinite(q.z);
}

}  // namespace icedem

#endif  // ICEDEM_QUAT_HPP
