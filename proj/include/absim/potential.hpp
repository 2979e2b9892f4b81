#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "absim/geometry.hpp"
#include "absim/vec3.hpp"

namespace absim {

// Dimensionless circulation prescribed per torus component.
struct FluxAssignment {
    std::vector<double> phi;  // indexed like MagnetAssembly::torus_indices()

    double operator[](std::size_t j) const { return phi.at(j); }
    std::size_t size() const { return phi.size(); }
    bool all_zero() const;
    void validate(const MagnetAssembly& magnet) const;
};

enum class GaugeTag { SolidAngle, Compactified };

// Short-range scalar potential profile.
struct ElectricPotential {
    enum class Profile { None, InversePower, MagnetIndicator };
    Profile profile = Profile::None;
    double v0 = 0.0;
    double alpha = 2.0;  // decay exponent, must exceed 1
    Vec3 center;

    double operator()(const Vec3& x, const MagnetAssembly& magnet) const;
    void validate() const;
};

// Curl-free exterior vector potential with prescribed circulations.
//
// The base construction superposes, per torus, the loop field
//   (phi_j / 4pi) * \oint dl' x (x - x') / |x - x'|^3
// over the oriented core circle, evaluated by M-segment midpoint quadrature.
// This field is curl-free away from the core circles, has circulation phi_j
// around any loop linking core j once, and decays like a dipole.
//
// The Compactified tag applies the gauge transformation that removes the
// potential outside the enclosing ball while preserving every circulation.
class PotentialField {
public:
    PotentialField(MagnetAssembly magnet, FluxAssignment flux, GaugeTag gauge = GaugeTag::SolidAngle,
                   int quadrature_segments = 2048, ElectricPotential electric = {});

    const MagnetAssembly& magnet() const { return magnet_; }
    const FluxAssignment& flux() const { return flux_; }
    GaugeTag gauge() const { return gauge_; }
    int quadrature_segments() const { return segments_; }
    const ElectricPotential& electric() const { return electric_; }

    Vec3 eval_A(const Vec3& x) const;
    double eval_V(const Vec3& x) const;

    // line integral of A along a polyline, adaptive composite Gauss quadrature
    double circulation(const std::vector<Vec3>& loop) const;

    // \int_0^t  v . A(x + tau v) dtau ; t may be +/- infinity
    double line_integral_L(const Vec3& x, const UnitVec3& v, double t) const;

    // circulation along the through-hole closure of any line in class h
    double flux_F_h(const std::vector<int>& signature) const;

    // Signed potential of the oriented spanning disk of torus j: the scalar
    // whose gradient times phi_j/4pi reproduces that torus' loop field away
    // from the disk (branch cut across the open disk, jump -4pi along +normal).
    double disk_potential(int j, const Vec3& x) const;

    // Single-valued scalar with gradient A outside the ball of radius
    // R(1-eps); zero at the gauge base point.  Defined for |x| >= R(1-eps).
    double lambda_exterior(const Vec3& x) const;

    // Smooth radial cutoff used by the compactified gauge: 1 for |x|>=R,
    // 0 for |x|<=R-eps.
    double chi_exterior(double r) const;
    double chi_exterior_deriv(double r) const;

    Vec3 gauge_base_point(const UnitVec3& v) const;

    // Gauge function on the transit domain of `cls`: value at x of the path
    // integral of A from the base point along the canonical path.  Fast route
    // via disk potentials and crossing corrections; `via_path_quadrature`
    // switches to explicit polyline quadrature (the verification oracle).
    double gauge_lambda(const LineClassification& cls, const UnitVec3& v, const Vec3& x,
                        bool via_path_quadrature = false) const;

    PotentialField compactify() const;

    static constexpr double kSingularDistance = 1e-9;

private:
    struct CoreQuadrature {
        std::vector<Vec3> points;    // segment midpoints on the core circle
        std::vector<Vec3> weighted_tangents;  // oriented tangent * arc length
        Vec3 center;
        Vec3 normal;  // oriented
        double radius = 0.0;
    };

    Vec3 base_A(const Vec3& x) const;  // solid-angle-gauge field
    double segment_integral(const Vec3& a, const Vec3& b) const;
    std::vector<Vec3> canonical_path(const LineClassification& cls, const UnitVec3& v,
                                     const Vec3& x) const;

    MagnetAssembly magnet_;
    FluxAssignment flux_;
    GaugeTag gauge_;
    int segments_;
    ElectricPotential electric_;
    std::vector<CoreQuadrature> cores_;  // one per torus index
    double compact_eps_ = 0.0;           // shell thickness for the compactified gauge
    Vec3 ext_base_;                      // base point of lambda_exterior
};

}  // namespace absim
