#pragma once

#include <optional>
#include <string>
#include <vector>

#include "absim/ansatz.hpp"
#include "absim/potential.hpp"
#include "absim/quantum.hpp"

namespace absim {

// Smooth tube truncation applied when preparing packets, so the initial datum
// is compactly supported away from lines that hit the magnet.
struct TruncationSpec {
    enum class Mode { None, ClassSharp, ClassSmooth };
    Mode mode = Mode::ClassSmooth;
    double margin = 0.3;  // clearance over which the smooth cutoff ramps up
};

struct PacketConfig {
    PacketSpec spec;  // velocity holds the direction; speed is set per run
    TruncationSpec truncation;
};

struct ZPolicy {
    enum class Mode { Fixed, PowerOfV };
    Mode mode = Mode::PowerOfV;
    double fixed_Z = 0.0;
    double rho = 0.5;  // Z = v^rho

    double Z(double v) const;
};

struct SimConfig {
    MagnetAssembly magnet;
    FluxAssignment flux;
    GaugeTag gauge = GaugeTag::Compactified;
    int quadrature_segments = 2048;
    ElectricPotential electric;

    std::vector<PacketConfig> packets;
    GridSpec grid;
    PropagatorConfig propagator;

    std::vector<double> velocities;
    double z_min = 0.0, z_max = 0.0;
    int z_count = 0;
    bool clip_z_to_box = true;  // shrink the window so packets stay clear of wrap
    double far_past_z = 0.0;    // start distance of the interacting runs (<= z_min)
    ZPolicy z_policy;
    double transition_L = 2.0;

    std::string output_dir = "out";
    std::uint64_t seed = 1;
    int threads = 0;

    PotentialField make_field() const;
    void validate() const;
};

SimConfig load_config(const std::string& path);
SimConfig parse_config(const std::string& json_text);

// Packet preparation: Gaussian from `pc` at `speed` along its direction,
// multiplied by the tube truncation and renormalized.
WaveField prepare_packet(const PacketConfig& pc, double speed, const GridSpec& grid,
                         const ClassMap& cm);

}  // namespace absim
