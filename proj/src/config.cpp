#include "absim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace absim {

using nlohmann::json;

namespace {

double quintic_smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (t * (6 * t - 15) + 10);
}

[[noreturn]] void schema_fail(const std::string& msg, const std::string& path) {
    throw SchemaError(msg, path);
}

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) schema_fail("missing required field", path + "/" + key);
    return j.at(key);
}

double num(const json& j, const std::string& path) {
    if (!j.is_number()) schema_fail("expected a number", path);
    return j.get<double>();
}

Vec3 vec3(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) schema_fail("expected [x, y, z]", path);
    return {num(j[0], path + "[0]"), num(j[1], path + "[1]"), num(j[2], path + "[2]")};
}

}  // namespace

double ZPolicy::Z(double v) const {
    return mode == Mode::Fixed ? fixed_Z : std::pow(v, rho);
}

PotentialField SimConfig::make_field() const {
    return PotentialField(magnet, flux, gauge, quadrature_segments, electric);
}

void SimConfig::validate() const {
    magnet.validate();
    flux.validate(magnet);
    electric.validate();
    grid.validate();
    if (!velocities.empty()) {
        for (std::size_t i = 1; i < velocities.size(); ++i)
            if (!(velocities[i] > velocities[i - 1]))
                throw SchemaError("velocities must be strictly increasing", "/velocities");
        for (double v : velocities)
            if (!(v > 0)) throw SchemaError("velocities must be positive", "/velocities");
    }
    // magnet clearance from the periodic images along axes transverse to each packet
    for (const auto& pc : packets) {
        double sg = *std::max_element(pc.spec.sigma.begin(), pc.spec.sigma.end());
        for (int ax = 0; ax < 3; ++ax) {
            Vec3 e{ax == 0 ? 1.0 : 0.0, ax == 1 ? 1.0 : 0.0, ax == 2 ? 1.0 : 0.0};
            if (std::abs(pc.spec.velocity.dot(e)) > 0.9 * pc.spec.velocity.norm()) continue;
            if (magnet.enclosing_radius + 4 * sg > 0.5 * grid.extents[ax])
                throw SchemaError("magnet too close to the periodic boundary images",
                                  "/grid/extents");
        }
    }
}

SimConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what(), "/");
    }
    SimConfig cfg;

    const json& jm = require(j, "magnet", "");
    cfg.magnet.enclosing_radius = num(require(jm, "enclosing_radius", "/magnet"), "/magnet/enclosing_radius");
    const json& comps = require(jm, "components", "/magnet");
    if (!comps.is_array()) schema_fail("expected an array", "/magnet/components");
    for (std::size_t i = 0; i < comps.size(); ++i) {
        std::string p = "/magnet/components[" + std::to_string(i) + "]";
        const json& c = comps[i];
        std::string type = require(c, "type", p).get<std::string>();
        if (type == "torus") {
            TorusComponent t;
            t.center = vec3(require(c, "center", p), p + "/center");
            t.axis = UnitVec3(vec3(require(c, "axis", p), p + "/axis"));
            t.major_radius = num(require(c, "major_radius", p), p + "/major_radius");
            t.minor_radius = num(require(c, "minor_radius", p), p + "/minor_radius");
            t.orientation = c.value("orientation", 1);
            cfg.magnet.components.push_back(t);
        } else if (type == "ball") {
            BallComponent b;
            b.center = vec3(require(c, "center", p), p + "/center");
            b.radius = num(require(c, "radius", p), p + "/radius");
            cfg.magnet.components.push_back(b);
        } else {
            schema_fail("unknown component type '" + type + "'", p + "/type");
        }
    }

    if (j.contains("flux")) {
        const json& jf = j["flux"];
        if (!jf.is_array()) schema_fail("expected an array of circulations", "/flux");
        for (std::size_t i = 0; i < jf.size(); ++i)
            cfg.flux.phi.push_back(num(jf[i], "/flux[" + std::to_string(i) + "]"));
    } else {
        cfg.flux.phi.assign(cfg.magnet.num_tori(), 0.0);
    }

    if (j.contains("potential")) {
        const json& jp = j["potential"];
        std::string gauge = jp.value("gauge", "compactified");
        if (gauge == "compactified")
            cfg.gauge = GaugeTag::Compactified;
        else if (gauge == "solid_angle")
            cfg.gauge = GaugeTag::SolidAngle;
        else
            schema_fail("gauge must be 'solid_angle' or 'compactified'", "/potential/gauge");
        cfg.quadrature_segments = jp.value("quadrature_segments", 2048);
        if (jp.contains("electric")) {
            const json& je = jp["electric"];
            std::string prof = je.value("profile", "none");
            if (prof == "none")
                cfg.electric.profile = ElectricPotential::Profile::None;
            else if (prof == "inverse_power")
                cfg.electric.profile = ElectricPotential::Profile::InversePower;
            else if (prof == "magnet_indicator")
                cfg.electric.profile = ElectricPotential::Profile::MagnetIndicator;
            else
                schema_fail("unknown electric profile", "/potential/electric/profile");
            cfg.electric.v0 = je.value("V0", 0.0);
            cfg.electric.alpha = je.value("alpha", 2.0);
            if (je.contains("center")) cfg.electric.center = vec3(je["center"], "/potential/electric/center");
        }
    }

    const json& jg = require(j, "grid", "");
    {
        const json& jn = require(jg, "n", "/grid");
        const json& jx = require(jg, "extents", "/grid");
        if (!jn.is_array() || jn.size() != 3) schema_fail("expected [n1, n2, n3]", "/grid/n");
        if (!jx.is_array() || jx.size() != 3) schema_fail("expected [L1, L2, L3]", "/grid/extents");
        std::array<std::uint32_t, 3> n{};
        std::array<double, 3> L{};
        for (int k = 0; k < 3; ++k) {
            n[k] = jn[k].get<std::uint32_t>();
            L[k] = num(jx[k], "/grid/extents");
        }
        cfg.grid = GridSpec::centered(n, L);
        if (jg.contains("origin")) {
            Vec3 o = vec3(jg["origin"], "/grid/origin");
            cfg.grid.origin = {o.x, o.y, o.z};
        }
    }

    if (j.contains("packets")) {
        const json& jp = j["packets"];
        if (!jp.is_array()) schema_fail("expected an array", "/packets");
        for (std::size_t i = 0; i < jp.size(); ++i) {
            std::string p = "/packets[" + std::to_string(i) + "]";
            const json& c = jp[i];
            PacketConfig pc;
            pc.spec.center = vec3(require(c, "center", p), p + "/center");
            const json& js = require(c, "sigma", p);
            if (js.is_number()) {
                double s = js.get<double>();
                pc.spec.sigma = {s, s, s};
            } else {
                Vec3 s = vec3(js, p + "/sigma");
                pc.spec.sigma = {s.x, s.y, s.z};
            }
            pc.spec.velocity = vec3(require(c, "velocity", p), p + "/velocity");
            if (c.contains("truncation")) {
                const json& jt = c["truncation"];
                std::string mode = jt.value("mode", "class_smooth");
                if (mode == "none")
                    pc.truncation.mode = TruncationSpec::Mode::None;
                else if (mode == "class_sharp")
                    pc.truncation.mode = TruncationSpec::Mode::ClassSharp;
                else if (mode == "class_smooth")
                    pc.truncation.mode = TruncationSpec::Mode::ClassSmooth;
                else
                    schema_fail("unknown truncation mode", p + "/truncation/mode");
                pc.truncation.margin = jt.value("margin", 0.3);
            }
            cfg.packets.push_back(pc);
        }
    }

    if (j.contains("propagator")) {
        const json& jp = j["propagator"];
        cfg.propagator.dt = jp.value("dt", 0.0);
        std::string scheme = jp.value("scheme", "split_spectral");
        if (scheme == "spectral_free")
            cfg.propagator.scheme = Scheme::SpectralFree;
        else if (scheme == "link_krylov")
            cfg.propagator.scheme = Scheme::LinkKrylov;
        else if (scheme == "spectral_krylov")
            cfg.propagator.scheme = Scheme::SpectralKrylov;
        else if (scheme == "split_spectral")
            cfg.propagator.scheme = Scheme::SplitSpectral;
        else
            schema_fail("unknown scheme", "/propagator/scheme");
        cfg.propagator.krylov_dim = jp.value("krylov_dim", 24);
        cfg.propagator.krylov_tol = jp.value("krylov_tol", 1e-10);
        cfg.propagator.confinement_v0 = jp.value("confinement_V0", 0.0);
        cfg.propagator.far_past_mass_tol = jp.value("far_past_mass_tol", 1e-6);
    }

    if (j.contains("velocities"))
        for (const auto& v : j["velocities"]) cfg.velocities.push_back(num(v, "/velocities"));

    if (j.contains("z_samples")) {
        const json& jz = j["z_samples"];
        cfg.z_min = num(require(jz, "min", "/z_samples"), "/z_samples/min");
        cfg.z_max = num(require(jz, "max", "/z_samples"), "/z_samples/max");
        cfg.z_count = require(jz, "count", "/z_samples").get<int>();
        cfg.clip_z_to_box = jz.value("clip_to_box", true);
        cfg.far_past_z = jz.value("far_past_z", cfg.z_min);
    } else {
        double R = cfg.magnet.enclosing_radius;
        cfg.z_min = -3 * R;
        cfg.z_max = 6 * R;
        cfg.z_count = 13;
        cfg.far_past_z = cfg.z_min;
    }

    if (j.contains("z_policy")) {
        const json& jz = j["z_policy"];
        std::string mode = jz.value("mode", "power");
        if (mode == "fixed") {
            cfg.z_policy.mode = ZPolicy::Mode::Fixed;
            cfg.z_policy.fixed_Z = jz.value("Z", 0.0);
        } else if (mode == "power") {
            cfg.z_policy.mode = ZPolicy::Mode::PowerOfV;
            cfg.z_policy.rho = jz.value("rho", 0.5);
            if (!(cfg.z_policy.rho > 0 && cfg.z_policy.rho < 1))
                schema_fail("rho must lie in (0,1)", "/z_policy/rho");
        } else {
            schema_fail("unknown z policy", "/z_policy/mode");
        }
    }
    cfg.transition_L = j.value("transition_L", 2.0);

    cfg.output_dir = j.value("output_dir", "out");
    cfg.seed = j.value("seed", std::uint64_t(1));
    cfg.threads = j.value("threads", 0);

    // environment overrides
    if (const char* s = std::getenv("ABSIM_SEED")) cfg.seed = std::strtoull(s, nullptr, 10);
    if (const char* s = std::getenv("ABSIM_OUT")) cfg.output_dir = s;
    if (const char* s = std::getenv("ABSIM_THREADS")) cfg.threads = std::atoi(s);

    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot open config file '" + path + "'", "/");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

WaveField prepare_packet(const PacketConfig& pc, double speed, const GridSpec& grid,
                         const ClassMap& cm) {
    PacketSpec spec = pc.spec;
    double dirn = spec.velocity.norm();
    if (!(dirn > 0)) throw std::invalid_argument("prepare_packet: zero velocity direction");
    spec.velocity = spec.velocity * (speed / dirn);
    WaveField f = make_gaussian(spec, grid);
    if (pc.truncation.mode != TruncationSpec::Mode::None) {
        for (std::size_t q = 0; q < f.size(); ++q) {
            double c = cm.clearance(q);
            double w;
            if (pc.truncation.mode == TruncationSpec::Mode::ClassSharp)
                w = c > 0 ? 1.0 : 0.0;
            else
                w = quintic_smoothstep(c / pc.truncation.margin);
            f[q] *= w;
        }
        f.normalize();
    }
    return f;
}

}  // namespace absim
