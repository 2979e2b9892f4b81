#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "absim/potential.hpp"
#include "absim/quantum.hpp"

namespace absim {

// Per-grid-point classification of the straight line along v, shared by the
// packet decomposition, the transit-domain masks and the phase fields.  For an
// axis-aligned v the classification is computed once per transverse column.
class ClassMap {
public:
    ClassMap(const MagnetAssembly& magnet, const GridSpec& grid, const UnitVec3& v);

    const GridSpec& grid() const { return grid_; }
    const UnitVec3& direction() const { return v_; }

    int class_id(std::size_t idx) const { return ids_[idx]; }
    const LineClassification& classification(int id) const { return table_.at(id); }
    int num_classes() const { return int(table_.size()); }
    int id_of(const LineClassification& cls) const;  // -1 when absent

    // distance from the point's line to the magnet surface (negative: hit)
    double clearance(std::size_t idx) const { return clearance_[idx]; }

    // signed crossing of torus j's spanning disk on the ray strictly behind
    // the point, and on the full line
    int crossing_behind(int j, std::size_t idx) const { return behind_[j][idx]; }
    int crossing_full(int j, std::size_t idx) const { return full_[j][idx]; }

    static constexpr int kHitId = 0;

private:
    GridSpec grid_;
    UnitVec3 v_;
    std::vector<std::int16_t> ids_;
    std::vector<float> clearance_;
    std::vector<std::vector<std::int8_t>> behind_;  // [torus][point]
    std::vector<std::vector<std::int8_t>> full_;
    std::vector<LineClassification> table_;
};

// Shared per-(field, grid, direction) tables: classification, disk potentials
// and the phase fields entering the Ansatz and the leading-order expressions.
class AnsatzWorkspace {
public:
    AnsatzWorkspace(const PotentialField& field, const GridSpec& grid, const UnitVec3& v);

    const PotentialField& field() const { return *field_; }
    const GridSpec& grid() const { return grid_; }
    const UnitVec3& direction() const { return v_; }
    const ClassMap& class_map() const { return class_map_; }

    // transit-domain indicator of `cls` sampled on grid points
    std::vector<std::uint8_t> region_mask(const LineClassification& cls) const;

    // gauge function of `cls` on grid points (valid where the mask is 1)
    std::vector<double> lambda_field(const LineClassification& cls) const;

    // masked Dirac factor: exp(i lambda) on the domain, 0 elsewhere
    std::vector<cplx> dirac_phase(const LineClassification& cls) const;

    // phase accumulated along the incoming half line through each point
    const std::vector<double>& incoming_phase() const;
    // circulation along the full line through each point (the hole flux of its class)
    const std::vector<double>& full_line_phase() const;

    std::vector<LineClassification> realized_classes() const;  // Hole and Out entries

private:
    const std::vector<double>& disk_potential_grid(int j) const;

    const PotentialField* field_;
    GridSpec grid_;
    UnitVec3 v_;
    ClassMap class_map_;
    mutable std::vector<std::vector<double>> omega_;  // per torus, lazy
    mutable std::vector<bool> omega_ready_;
    mutable std::vector<double> incoming_, full_line_;
};

struct PacketDecomposition {
    struct Part {
        LineClassification cls;
        WaveField component;
    };
    std::vector<Part> parts;  // hole classes first, Out last when present
    UnitVec3 direction;
    double parent_norm2 = 0.0;
};

// Splits a packet by the class of the line through each grid point.  Classes
// holding less than 1e-14 of the squared norm are dropped; more than 1e-6 of
// squared norm on Hit lines raises SupportViolation.
PacketDecomposition decompose(const WaveField& phi0, const UnitVec3& v,
                              const MagnetAssembly& magnet);

// One dressed component of the Ansatz: mask * e^{i lambda} * free(phi, t).
WaveField ab_component(const WaveField& phi_component, double t, const LineClassification& cls,
                       const AnsatzWorkspace& ws);

WaveField ab_total(const PacketDecomposition& dec, double t, const AnsatzWorkspace& ws);

enum class ApproxVariant { psi_371, phi_372 };

// Leading-order approximate solutions, parametrized by the distance z = v t
// and the matching distance Z: below Z both variants apply the incoming phase
// after free evolution; beyond Z they differ in where the phase acts.
WaveField approx_solution(ApproxVariant variant, double Z, double z, const WaveField& phi_v,
                          double speed, const AnsatzWorkspace& ws);

// incoming leading-order expression at distance z (the z <= Z branch formula)
WaveField incoming_leading_order(double z, const WaveField& phi_v, double speed,
                                 const AnsatzWorkspace& ws);

}  // namespace absim
