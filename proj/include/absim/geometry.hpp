#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absim/errors.hpp"
#include "absim/vec3.hpp"

namespace absim {

// Solid torus with circular core: all points within `minor_radius` of the core
// circle (radius `major_radius` about `axis` through `center`).  `orientation`
// fixes the traversal sense of the core circle (right-handed about
// axis*orientation).
struct TorusComponent {
    Vec3 center;
    UnitVec3 axis;
    double major_radius = 1.0;
    double minor_radius = 0.25;
    int orientation = +1;

    // Core-circle normal including the orientation sign.
    Vec3 oriented_normal() const { return Vec3(axis) * static_cast<double>(orientation); }
    // Point on the core circle at angle theta.
    Vec3 core_point(double theta) const;
    void validate() const;
};

struct BallComponent {
    Vec3 center;
    double radius = 1.0;
    void validate() const;
};

using Component = std::variant<TorusComponent, BallComponent>;

// Disjoint union of solid tori and balls, all inside the open ball of radius
// enclosing_radius about the origin.
struct MagnetAssembly {
    std::vector<Component> components;
    double enclosing_radius = 1.0;

    std::vector<int> torus_indices() const;  // indices into components that are tori
    const TorusComponent& torus(int k) const;
    std::size_t num_tori() const { return torus_indices().size(); }

    // Euclidean distance from a point to the union (0 inside).
    double distance(const Vec3& x) const;
    bool contains(const Vec3& x) const { return distance(x) <= 0.0; }

    // Throws std::invalid_argument when invariants fail; `sampling` controls the
    // surface sampling density of the pairwise-disjointness check.
    void validate(int sampling = 48) const;
};

struct OrientedLine {
    Vec3 base;
    UnitVec3 direction;

    OrientedLine() = default;
    OrientedLine(const Vec3& b, const UnitVec3& d) : base(b), direction(d) {
        if (!b.finite()) throw std::invalid_argument("OrientedLine: non-finite base point");
    }
    Vec3 at(double s) const { return base + Vec3(direction) * s; }
};

enum class LineClass { Hit, Out, Hole };

// Classification of a full straight line against the assembly.  For Hole, the
// signature holds one signed crossing count per torus component (indexed as in
// MagnetAssembly::torus_indices()); Out carries the all-zero signature.
struct LineClassification {
    LineClass kind = LineClass::Out;
    std::vector<int> signature;  // empty for Hit

    bool is_hit() const { return kind == LineClass::Hit; }
    bool is_out() const { return kind == LineClass::Out; }
    bool is_hole() const { return kind == LineClass::Hole; }
    std::string to_string() const;
};

// Minimal distance between an infinite line and a circle in 3-D, found by
// bounded minimization over the circle parameter.
double line_circle_distance(const OrientedLine& line, const Vec3& center, const Vec3& unit_normal,
                            double radius, double tol = 1e-12);

// Signed crossing of the line with the oriented flat spanning disk of a torus
// core circle.  Returns the crossing parameter s (line.at(s) on the disk) and
// the sign, or nullopt when the line misses the open disk.  Throws Degenerate
// when the line is parallel to the disk plane within tolerance and the
// in-plane geometry cannot be resolved.
struct DiskCrossing {
    double s = 0.0;
    int sign = 0;
};
std::optional<DiskCrossing> disk_crossing(const OrientedLine& line, const TorusComponent& torus,
                                          double tangency_tol = 1e-9);

// Signed linking number of the line (closed through an arc far outside the
// assembly) with the torus core circle.  Precondition: the line misses the
// solid torus.
int linking_number(const OrientedLine& line, const TorusComponent& torus);

LineClassification classify_line(const OrientedLine& line, const MagnetAssembly& magnet);

// True when both lines thread the same holes in the same direction.  Throws
// ClassMismatch if either line hits the magnet.
bool same_class(const OrientedLine& a, const OrientedLine& b, const MagnetAssembly& magnet);

// Membership in the simply-connected transit domain attached to `cls` (a Hole
// signature or Out) for direction v.  Hit classifications are rejected.
bool in_region_C(const Vec3& x, const LineClassification& cls, const UnitVec3& v,
                 const MagnetAssembly& magnet);

// Deterministic search for a line realizing the signature of `cls` along v.
// Throws UnrealizedClass when the scan finds none.
OrientedLine representative_line(const LineClassification& cls, const UnitVec3& v,
                                 const MagnetAssembly& magnet);

}  // namespace absim
