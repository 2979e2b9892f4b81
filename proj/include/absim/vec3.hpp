#pragma once

#include <cmath>
#include <stdexcept>

namespace absim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Unit vector, normalized on construction; rejects near-zero input.
struct UnitVec3 : Vec3 {
    UnitVec3() : Vec3(0, 0, 1) {}
    explicit UnitVec3(const Vec3& v) : Vec3(v) {
        double n = v.norm();
        if (!(n > 1e-14) || !v.finite()) throw std::invalid_argument("UnitVec3: cannot normalize");
        x /= n;
        y /= n;
        z /= n;
    }
    UnitVec3(double x_, double y_, double z_) : UnitVec3(Vec3{x_, y_, z_}) {}
};

// Two unit vectors completing rhs to an orthonormal frame.
inline void orthonormal_frame(const Vec3& n, Vec3& e1, Vec3& e2) {
    Vec3 seed = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    e1 = seed - n * seed.dot(n);
    e1 = e1 / e1.norm();
    e2 = n.cross(e1);
}

}  // namespace absim
