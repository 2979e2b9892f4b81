#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "absim/grid.hpp"
#include "absim/potential.hpp"

namespace absim {

// Units: hbar = 1 and m = 1 unless stated otherwise, so speed equals momentum.
inline constexpr double kMass = 1.0;

struct PacketSpec {
    Vec3 center;
    std::array<double, 3> sigma{1, 1, 1};  // amplitude width per axis
    Vec3 velocity;                         // v = speed * direction

    double speed() const { return velocity.norm(); }
    void validate(const GridSpec& grid) const;  // throws ResolutionGuard
};

// phi_v(x) = N exp(-|x-c|^2 / (4 sigma^2)) exp(i m v.x), unit discrete norm
WaveField make_gaussian(const PacketSpec& spec, const GridSpec& grid);

// Smooth radial momentum bump applied about the packet's carrier momentum m*v:
// passes |p - m v| < m sqrt(v)/16, blocks |p - m v| >= m sqrt(v)/8.
WaveField momentum_cutoff(const WaveField& field, const Vec3& velocity);

// exact spectral free propagator exp(-i t p^2 / 2m)
WaveField free_evolve(const WaveField& field, double t);

// free propagator of the 7-point stencil kinetic operator (diagonal in the
// discrete Fourier basis); useful when comparing against stencil dynamics
WaveField free_evolve_stencil(const WaveField& field, double t);

enum class Scheme {
    SpectralFree,    // A = 0: exact spectral evolution
    LinkKrylov,      // 7-point link-phase stencil + Krylov exponential
    SpectralKrylov,  // spectral kinetic + symmetrized A coupling + Krylov
    SplitSpectral,   // Strang splitting: exact kinetic x Krylov on the A part
};

struct PropagatorConfig {
    double dt = 0.0;  // 0: use 0.5 * min dx / max(speed, 1)
    Scheme scheme = Scheme::SplitSpectral;
    int krylov_dim = 24;
    double krylov_tol = 1e-10;       // per-step residual target
    double confinement_v0 = 0.0;     // optional barrier on the magnet body
    double far_past_t0 = 0.0;        // start time of the interacting run (< 0)
    double far_past_mass_tol = 1e-6; // allowed packet mass within 2 sigma of K
};

// Gauge-invariant 7-point discretization of (p - A)^2/2m + V: unit-modulus
// link phases exp(-i \int_edge A.dl) on grid edges (4-point Gauss per edge),
// diagonal electric and confinement terms.
class DiscreteHamiltonian {
public:
    DiscreteHamiltonian(const GridSpec& grid, const PotentialField& field,
                        const PropagatorConfig& config);

    void apply(const std::vector<cplx>& in, std::vector<cplx>& out) const;
    const GridSpec& grid() const { return grid_; }
    double diag_max() const;

private:
    GridSpec grid_;
    std::array<std::vector<cplx>, 3> links_;  // link phase from site to +axis neighbor
    std::vector<double> diag_;                // V + confinement + stencil constant
    std::array<double, 3> hop_;               // 1/(2m dx^2)
};

DiscreteHamiltonian build_hamiltonian(const GridSpec& grid, const PotentialField& field,
                                      const PropagatorConfig& config);

// Spectral-kinetic Hamiltonian with pointwise A, A^2 and V tables; Hermitian by
// construction (symmetrized A.p + p.A form evaluated pseudospectrally).
class SpectralHamiltonian {
public:
    SpectralHamiltonian(const GridSpec& grid, const PotentialField& field,
                        const PropagatorConfig& config);

    void apply(const std::vector<cplx>& in, std::vector<cplx>& out) const;  // full H
    void apply_interaction(const std::vector<cplx>& in, std::vector<cplx>& out) const;  // H - H0
    const GridSpec& grid() const { return grid_; }
    bool interaction_is_zero() const { return zero_interaction_; }

private:
    GridSpec grid_;
    std::array<std::vector<double>, 3> a_;  // vector potential on grid points
    std::vector<double> diag_;              // A^2/2m + V + confinement
    bool zero_interaction_ = true;
};

struct EvolveResult {
    WaveField state;
    double norm_drift = 0.0;      // |norm(t1) - norm(t0)|
    double guard_mass = 0.0;      // packet mass within 2 sigma of the magnet at t0
    int steps = 0;
    std::vector<WaveField> snapshots;
    std::vector<double> snapshot_times;
};

// Evolves the far-past free preparation psi(t0) = free(phi_v, t0) to t1 under
// the interacting Hamiltonian.  `snapshot_times` must be increasing and within
// [t0, t1]; the returned snapshots align with them.
EvolveResult interacting_evolve(const WaveField& phi_v, double t0, double t1,
                                const PotentialField& field, const PropagatorConfig& config,
                                const std::vector<double>& snapshot_times = {},
                                const std::optional<PacketSpec>& packet = std::nullopt);

// Krylov (Lanczos) application of exp(-i dt H) for a Hermitian operator given
// as a matvec; throws KrylovStall when the residual target cannot be met.
void krylov_expm_apply(const std::function<void(const std::vector<cplx>&, std::vector<cplx>&)>& H,
                       std::vector<cplx>& psi, double dt, int max_dim, double tol);

}  // namespace absim
