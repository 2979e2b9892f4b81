#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "absim/harness.hpp"
#include "absim/io.hpp"

using namespace absim;

namespace {

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return int(err->kind());
    if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
    return 4;
}

Vec3 parse_vec(const std::string& s) {
    Vec3 v;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &v.x, &v.y, &v.z) != 3)
        throw CLI::ValidationError("expected x,y,z");
    return v;
}

struct Common {
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;

    SimConfig load() const {
        SimConfig cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (threads > 0) cfg.threads = threads;
        if (seed_set) cfg.seed = seed;
        return cfg;
    }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "configuration file (JSON)")
        ->required()
        ->envname("ABSIM_CONFIG");
    cmd->add_option("--out", c.out_dir, "output directory")->envname("ABSIM_OUT");
    cmd->add_option("--threads", c.threads, "worker threads (0 = default)")->envname("ABSIM_THREADS");
    auto* s = cmd->add_option("--seed", c.seed, "random seed")->envname("ABSIM_SEED");
    cmd->callback([&c, s]() { c.seed_set = s->count() > 0; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"abulator: magnetic-exterior wave packet laboratory"};
    app.require_subcommand(1);

    Common c_classify, c_potential, c_evolve, c_ansatz, c_scan, c_transition, c_fringes;

    auto* classify = app.add_subcommand("classify", "classify a straight line against the magnet");
    add_common(classify, c_classify);
    std::string base_s, dir_s;
    classify->add_option("--base", base_s, "line base point x,y,z")->required();
    classify->add_option("--dir", dir_s, "line direction x,y,z")->required();

    auto* potential = app.add_subcommand("potential", "evaluate or validate the vector potential");
    add_common(potential, c_potential);
    std::string at_s;
    bool do_validate = false;
    potential->add_option("--at", at_s, "evaluation point x,y,z");
    potential->add_flag("--validate", do_validate, "run curl/circulation validation");

    auto* evolve = app.add_subcommand("evolve", "exact interacting run with snapshot dumps");
    add_common(evolve, c_evolve);
    int dump_every = 0;
    double evolve_v = 0.0;
    evolve->add_option("--dump-every", dump_every, "dump every K sample times")
        ->envname("ABSIM_DUMP_EVERY");
    evolve->add_option("--velocity", evolve_v, "override packet speed");

    auto* ansatz = app.add_subcommand("ansatz", "build the dressed free Ansatz at sample times");
    add_common(ansatz, c_ansatz);
    double ansatz_v = 0.0;
    ansatz->add_option("--velocity", ansatz_v, "override packet speed");

    auto* scan = app.add_subcommand("scan", "error-vs-velocity scan (CSV output)");
    add_common(scan, c_scan);

    auto* transition = app.add_subcommand("transition", "leading-order transition comparison");
    add_common(transition, c_transition);

    auto* fringes = app.add_subcommand("fringes", "two-path fringe-shift extraction");
    add_common(fringes, c_fringes);
    double plane_z = 0.0;
    bool plane_set = false;
    auto* pz = fringes->add_option("--plane", plane_z, "detection plane distance (default 1.5 R)");
    fringes->callback([&]() { plane_set = pz->count() > 0; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (classify->parsed()) {
            SimConfig cfg = c_classify.load();
            OrientedLine line{parse_vec(base_s), UnitVec3(parse_vec(dir_s))};
            std::cout << classify_line(line, cfg.magnet).to_string() << "\n";
            return 0;
        }

        if (potential->parsed()) {
            SimConfig cfg = c_potential.load();
            PotentialField field = cfg.make_field();
            if (!at_s.empty()) {
                Vec3 x = parse_vec(at_s);
                Vec3 a = field.eval_A(x);
                std::cout << "A = (" << format_full_precision(a.x) << ", "
                          << format_full_precision(a.y) << ", " << format_full_precision(a.z)
                          << ")\nV = " << format_full_precision(field.eval_V(x)) << "\n";
            }
            if (do_validate) {
                // circulation around each generator must reproduce the flux
                auto tori = cfg.magnet.torus_indices();
                for (std::size_t j = 0; j < tori.size(); ++j) {
                    const auto& t = std::get<TorusComponent>(cfg.magnet.components[tori[j]]);
                    Vec3 e1, e2;
                    orthonormal_frame(t.axis, e1, e2);
                    std::vector<Vec3> loop;
                    double ring = std::min(2.0 * t.minor_radius,
                                           0.5 * (t.major_radius + t.minor_radius));
                    for (int s = 0; s < 64; ++s) {
                        double th = 2 * 3.14159265358979323846 * s / 64;
                        Vec3 p = t.center + e1 * (t.major_radius + ring * std::cos(th)) +
                                 Vec3(t.axis) * (ring * std::sin(th)) * t.orientation;
                        loop.push_back(p);
                    }
                    double circ = field.circulation(loop);
                    std::cout << "torus " << j << ": circulation " << format_full_precision(circ)
                              << " (target " << format_full_precision(cfg.flux[j]) << ")\n";
                }
                std::cout << "validation done\n";
            }
            return 0;
        }

        if (scan->parsed()) {
            SimConfig cfg = c_scan.load();
            ErrorCurve curve = run_error_scan(cfg, cfg.output_dir);
            for (const auto& r : curve.rows)
                std::cout << "v = " << r.v << "  sup error = " << r.sup_error
                          << "  zero-flux floor = " << r.floor_error << "\n";
            std::cout << "fitted slope = " << curve.slope
                      << "  (delta-equivalent " << curve.delta_equivalent() << ")\n";
            return 0;
        }

        if (transition->parsed()) {
            SimConfig cfg = c_transition.load();
            std::filesystem::create_directories(cfg.output_dir);
            std::vector<std::vector<double>> rows;
            for (double v : cfg.velocities) {
                double Z = cfg.z_policy.Z(v);
                TransitionRecord rec = transition_compare(cfg, Z, cfg.transition_L, v);
                std::cout << "v = " << v << "  Z = " << Z
                          << "  max|in-psi| = " << rec.max_incoming_vs_psi
                          << "  max|in-phi| = " << rec.max_incoming_vs_phi
                          << "  max|psi-phi| = " << rec.max_psi_vs_phi << "\n";
                for (std::size_t i = 0; i < rec.z.size(); ++i)
                    rows.push_back({v, Z, rec.z[i], rec.d_incoming_vs_psi[i],
                                    rec.d_incoming_vs_phi[i], rec.d_psi_vs_phi[i]});
            }
            write_csv(cfg.output_dir + "/transition.csv",
                      {"v", "Z", "z", "d_in_psi", "d_in_phi", "d_psi_phi"}, rows);
            return 0;
        }

        if (evolve->parsed() || ansatz->parsed() || fringes->parsed()) {
            Common& c = evolve->parsed() ? c_evolve : (ansatz->parsed() ? c_ansatz : c_fringes);
            SimConfig cfg = c.load();
            if (cfg.packets.empty()) throw SchemaError("this command needs a packet", "/packets");
            if (cfg.velocities.empty()) throw SchemaError("need a velocity", "/velocities");
            double v = cfg.velocities.back();
            if (evolve->parsed() && evolve_v > 0) v = evolve_v;
            if (ansatz->parsed() && ansatz_v > 0) v = ansatz_v;
            const UnitVec3 vhat{cfg.packets.front().spec.velocity};

            PotentialField field = cfg.make_field();
            AnsatzWorkspace ws(field, cfg.grid, vhat);

            // combined initial packet over all configured lobes
            WaveField phi_v(cfg.grid);
            for (const auto& pc : cfg.packets) {
                WaveField lobe = prepare_packet(pc, v, cfg.grid, ws.class_map());
                for (std::size_t q = 0; q < phi_v.size(); ++q)
                    phi_v[q] += lobe[q] / std::sqrt(double(cfg.packets.size()));
            }
            phi_v.normalize();

            PacketSpec guard_spec = cfg.packets.front().spec;
            guard_spec.velocity = guard_spec.velocity * (v / guard_spec.velocity.norm());
            auto [zmin, zmax] = std::pair<double, double>{cfg.z_min, cfg.z_max};
            std::vector<double> times;
            for (int i = 0; i < std::max(cfg.z_count, 2); ++i)
                times.push_back((zmin + (zmax - zmin) * i / double(std::max(cfg.z_count, 2) - 1)) / v);

            std::filesystem::create_directories(cfg.output_dir);

            if (ansatz->parsed()) {
                PacketDecomposition dec = decompose(phi_v, vhat, cfg.magnet);
                for (std::size_t i = 0; i < times.size(); ++i) {
                    WaveField ab = ab_total(dec, times[i], ws);
                    std::string path = cfg.output_dir + "/ansatz_" + std::to_string(i) + ".absf";
                    write_field(path, ab);
                    // sidecar metadata with the class labels
                    std::ofstream meta(cfg.output_dir + "/ansatz_" + std::to_string(i) + ".json");
                    meta << "{\"t\": " << format_full_precision(times[i]) << ", \"classes\": [";
                    for (std::size_t p = 0; p < dec.parts.size(); ++p)
                        meta << (p ? ", " : "") << "\"" << dec.parts[p].cls.to_string() << "\"";
                    meta << "]}\n";
                }
                std::cout << "wrote " << times.size() << " Ansatz snapshots to " << cfg.output_dir
                          << "\n";
                return 0;
            }

            double t0 = std::min(cfg.far_past_z, zmin) / v;
            EvolveResult ev = interacting_evolve(phi_v, t0, times.back(), field, cfg.propagator,
                                                 times, guard_spec);
            if (evolve->parsed()) {
                int every = dump_every > 0 ? dump_every : 1;
                int wrote = 0;
                for (std::size_t i = 0; i < ev.snapshots.size(); i += every) {
                    write_field(cfg.output_dir + "/evolve_" + std::to_string(i) + ".absf",
                                ev.snapshots[i]);
                    ++wrote;
                }
                std::cout << "steps " << ev.steps << ", norm drift "
                          << format_full_precision(ev.norm_drift) << ", wrote " << wrote
                          << " snapshots\n";
                return 0;
            }

            // fringes: compare against the zero-flux reference on the chosen plane
            FluxAssignment zero;
            zero.phi.assign(cfg.flux.size(), 0.0);
            PotentialField ref_field(cfg.magnet, zero, cfg.gauge, cfg.quadrature_segments,
                                     cfg.electric);
            EvolveResult ref = interacting_evolve(phi_v, t0, times.back(), ref_field,
                                                  cfg.propagator, times, guard_spec);
            double z0 = plane_set ? plane_z : 1.5 * cfg.magnet.enclosing_radius;
            FringeShift fs = extract_fringe_shift(ev.state, z0, ref.state, vhat);
            std::cout << "fringe shift = " << format_full_precision(fs.shift)
                      << " rad, visibility = " << fs.visibility << ", k = " << fs.fringe_k << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
