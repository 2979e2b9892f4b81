#pragma once

#include <optional>
#include <string>
#include <vector>

#include "absim/ansatz.hpp"
#include "absim/config.hpp"

namespace absim {

struct ErrorCurve {
    struct Row {
        double v = 0.0;
        double sup_error = 0.0;
        double floor_error = 0.0;  // zero-flux reference at the same v
        double guard_mass = 0.0;
        std::vector<double> z;          // sampled distances
        std::vector<double> errors;     // per-z Ansatz error
    };
    std::vector<Row> rows;
    double slope = 0.0;      // log-log fit of sup_error vs v
    double intercept = 0.0;  // log(error) at log(v) = 0
    double delta_equivalent() const { return 1.0 + slope; }
};

// least-squares slope/intercept of log(err) vs log(v); throws FitUnderdetermined
// for fewer than 3 points
void fit_loglog(const std::vector<double>& v, const std::vector<double>& err, double& slope,
                double& intercept);

// Error-vs-velocity scan of the Ansatz against the exactly evolved solution.
// Writes <out>/scan_errors.csv and <out>/scan_summary.csv when out is set.
ErrorCurve run_error_scan(const SimConfig& config, const std::string& out_dir = "");

struct TransitionRecord {
    double v = 0.0, Z = 0.0, L = 0.0;
    std::vector<double> z;
    std::vector<double> d_incoming_vs_psi;  // per z
    std::vector<double> d_incoming_vs_phi;
    std::vector<double> d_psi_vs_phi;
    double max_incoming_vs_psi = 0.0;
    double max_incoming_vs_phi = 0.0;
    double max_psi_vs_phi = 0.0;
};

// Pairwise distances among the leading-order expressions over z in [Z/L, Z L].
TransitionRecord transition_compare(const SimConfig& config, double Z, double L, double v,
                                    int samples = 13);

struct FringeShift {
    double shift = 0.0;       // fitted fringe displacement, radians in (-pi, pi]
    double visibility = 0.0;  // fringe contrast inside the analysis window
    double fringe_k = 0.0;    // fringe wavevector along the analysis axis
};

// Transverse fringe displacement of |psi|^2 on the plane nearest z0 against a
// reference pattern (same geometry, zero flux).  The pattern is collapsed
// along the second transverse axis; fringes run along the first.
FringeShift extract_fringe_shift(const WaveField& psi, double z0, const WaveField& psi_ref,
                                 const UnitVec3& v, double min_visibility = 0.05);

// deterministic RNG helper: draws reproducible lines/loops for property checks
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace absim
