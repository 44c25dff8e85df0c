#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cspace {

inline constexpr const char* kVersion = "0.1.0";

// Bad user input: dimension mismatches, invalid flags, nonpositive counts.
// The CLI maps this to exit code 2.
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A structurally invalid spec (non-unit joint axis, nonpositive radius, ...).
struct spec_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Rejection sampling gave up; message names the violated constraint.
struct generation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite value mid-computation; message carries the layer/batch context.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation on a model in the wrong state (e.g. predict before train).
struct state_error : std::logic_error {
    using std::logic_error::logic_error;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Unit quaternion (w, x, y, z) for rigid-body orientation.
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    static Quat identity() { return {}; }

    static Quat from_axis_angle(const Vec3& axis, double angle) {
        const double h = 0.5 * angle;
        const double s = std::sin(h);
        return {std::cos(h), axis.x * s, axis.y * s, axis.z * s};
    }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quat normalized() const {
        const double n = norm();
        return {w / n, x / n, y / n, z / n};
    }

    // Hamilton product: this * o applies o first, then this.
    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    Quat conj() const { return {w, -x, -y, -z}; }

    Vec3 rotate(const Vec3& v) const {
        // v' = v + 2*q_vec x (q_vec x v + w*v)
        const Vec3 qv{x, y, z};
        const Vec3 t{2.0 * (qv.y * v.z - qv.z * v.y), 2.0 * (qv.z * v.x - qv.x * v.z),
                     2.0 * (qv.x * v.y - qv.y * v.x)};
        return {v.x + w * t.x + (qv.y * t.z - qv.z * t.y),
                v.y + w * t.y + (qv.z * t.x - qv.x * t.z),
                v.z + w * t.z + (qv.x * t.y - qv.y * t.x)};
    }
};

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t v);

}  // namespace cspace
