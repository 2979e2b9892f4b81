#include "absim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "absim/fft.hpp"
#include "absim/io.hpp"

namespace absim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI{0.0, 1.0};

int beam_axis(const UnitVec3& v) {
    for (int ax = 0; ax < 3; ++ax) {
        Vec3 e{ax == 0 ? 1.0 : 0.0, ax == 1 ? 1.0 : 0.0, ax == 2 ? 1.0 : 0.0};
        if (std::abs(std::abs(Vec3(v).dot(e)) - 1.0) < 1e-12) return ax;
    }
    throw std::invalid_argument("this harness routine needs an axis-aligned beam direction");
}

// widest packet spread over the sampled times (density standard deviation)
double spread_at(const PacketSpec& spec, double t) {
    double s = *std::max_element(spec.sigma.begin(), spec.sigma.end());
    double tau = t / (2 * kMass * s * s);
    return s * std::sqrt(1 + tau * tau);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ull);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

void fit_loglog(const std::vector<double>& v, const std::vector<double>& err, double& slope,
                double& intercept) {
    if (v.size() != err.size() || v.size() < 3)
        throw FitUnderdetermined("fit_loglog: need at least 3 velocities");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0) || !(err[i] > 0))
            throw FitUnderdetermined("fit_loglog: nonpositive sample");
        double x = std::log(v[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    slope = (n * sxy - sx * sy) / denom;
    intercept = (sy - slope * sx) / n;
}

namespace {

// z window clipped so the packet (center at z, spread sigma_t) keeps a
// comfortable margin from the periodic boundary along the beam axis
std::pair<double, double> clipped_window(const SimConfig& cfg, const PacketSpec& spec, double v) {
    double zmin = cfg.z_min, zmax = cfg.z_max;
    if (!cfg.clip_z_to_box) return {zmin, zmax};
    int ax = beam_axis(UnitVec3(spec.velocity));
    double half = 0.5 * cfg.grid.extents[ax];
    auto fits = [&](double z) { return std::abs(z) + 3.2 * spread_at(spec, z / v) <= half; };
    // shrink towards 0 until both ends fit
    for (int k = 0; k < 400 && !(fits(zmax)); ++k) zmax -= 0.05 * cfg.magnet.enclosing_radius;
    for (int k = 0; k < 400 && !(fits(zmin)); ++k) zmin += 0.05 * cfg.magnet.enclosing_radius;
    if (!(zmin < zmax)) throw SchemaError("z window collapsed after box clipping", "/z_samples");
    return {zmin, zmax};
}

}  // namespace

ErrorCurve run_error_scan(const SimConfig& config, const std::string& out_dir) {
    if (config.packets.empty()) throw SchemaError("scan needs a packet", "/packets");
    if (config.velocities.size() < 3)
        throw FitUnderdetermined("scan: need at least 3 velocities for the slope fit");
    const PacketConfig& pc = config.packets.front();
    const UnitVec3 vhat{pc.spec.velocity};

    PotentialField field = config.make_field();
    PotentialField zero_field(config.magnet, FluxAssignment{std::vector<double>(config.flux.size(), 0.0)},
                              config.gauge, config.quadrature_segments, config.electric);

    AnsatzWorkspace ws(field, config.grid, vhat);
    AnsatzWorkspace ws0(zero_field, config.grid, vhat);

    ErrorCurve curve;
    for (double v : config.velocities) {
        PacketSpec boosted = pc.spec;
        boosted.velocity = pc.spec.velocity * (v / pc.spec.velocity.norm());
        auto [zmin, zmax] = clipped_window(config, boosted, v);

        WaveField phi_v = prepare_packet(pc, v, config.grid, ws.class_map());
        PacketDecomposition dec = decompose(phi_v, vhat, config.magnet);

        std::vector<double> zs(config.z_count);
        for (int i = 0; i < config.z_count; ++i)
            zs[i] = zmin + (zmax - zmin) * i / double(config.z_count - 1);
        std::vector<double> times(zs.size());
        for (std::size_t i = 0; i < zs.size(); ++i) times[i] = zs[i] / v;

        double z0 = std::min(config.far_past_z, zmin);
        double t0 = z0 / v;

        ErrorCurve::Row row;
        row.v = v;
        row.z = zs;

        for (int flux_pass = 0; flux_pass < 2; ++flux_pass) {
            const PotentialField& f = flux_pass == 0 ? field : zero_field;
            const AnsatzWorkspace& w = flux_pass == 0 ? ws : ws0;
            EvolveResult ev =
                interacting_evolve(phi_v, t0, times.back(), f, config.propagator, times, boosted);
            if (flux_pass == 0) row.guard_mass = ev.guard_mass;
            double sup = 0.0;
            std::vector<double> errs;
            for (std::size_t i = 0; i < times.size(); ++i) {
                WaveField ab = ab_total(dec, times[i], w);
                double e = (ev.snapshots[i] - ab).norm();
                errs.push_back(e);
                sup = std::max(sup, e);
            }
            if (flux_pass == 0) {
                row.errors = errs;
                row.sup_error = sup;
            } else {
                row.floor_error = sup;
            }
        }
        curve.rows.push_back(std::move(row));
    }

    std::vector<double> vs, sups;
    for (const auto& r : curve.rows) {
        vs.push_back(r.v);
        sups.push_back(r.sup_error);
    }
    fit_loglog(vs, sups, curve.slope, curve.intercept);

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::vector<std::vector<double>> rows;
        for (const auto& r : curve.rows)
            for (std::size_t i = 0; i < r.z.size(); ++i)
                rows.push_back({r.v, r.z[i], r.errors[i]});
        write_csv(out_dir + "/scan_errors.csv", {"v", "z", "error"}, rows);
        std::vector<std::vector<double>> summary;
        for (const auto& r : curve.rows)
            summary.push_back({r.v, r.sup_error, r.floor_error, r.guard_mass});
        summary.push_back({0.0, curve.slope, curve.intercept, 0.0});
        write_csv(out_dir + "/scan_summary.csv",
                  {"v_or_zero_for_fit", "sup_error_or_slope", "floor_or_intercept", "guard_mass"},
                  summary);
    }
    return curve;
}

TransitionRecord transition_compare(const SimConfig& config, double Z, double L, double v,
                                    int samples) {
    if (!(L > 1) || !(Z >= 0)) throw std::invalid_argument("transition_compare: need L > 1, Z >= 0");
    if (config.packets.empty()) throw SchemaError("transition needs a packet", "/packets");
    const PacketConfig& pc = config.packets.front();
    const UnitVec3 vhat{pc.spec.velocity};

    PotentialField field = config.make_field();
    AnsatzWorkspace ws(field, config.grid, vhat);
    WaveField phi_v = prepare_packet(pc, v, config.grid, ws.class_map());

    TransitionRecord rec;
    rec.v = v;
    rec.Z = Z;
    rec.L = L;
    // the three expressions, each extended over the whole window
    WaveField at_Z = incoming_leading_order(Z, phi_v, v, ws);
    WaveField dressed = phi_v;
    {
        const auto& f = ws.full_line_phase();
        for (std::size_t q = 0; q < dressed.size(); ++q) dressed[q] *= std::exp(kI * f[q]);
    }
    for (int i = 0; i < samples; ++i) {
        double z = Z / L + (Z * L - Z / L) * i / double(samples - 1);
        WaveField in = incoming_leading_order(z, phi_v, v, ws);
        WaveField psi = free_evolve(at_Z, (z - Z) / v);
        WaveField phi = free_evolve(dressed, z / v);
        rec.z.push_back(z);
        rec.d_incoming_vs_psi.push_back((in - psi).norm());
        rec.d_incoming_vs_phi.push_back((in - phi).norm());
        rec.d_psi_vs_phi.push_back((psi - phi).norm());
    }
    rec.max_incoming_vs_psi =
        *std::max_element(rec.d_incoming_vs_psi.begin(), rec.d_incoming_vs_psi.end());
    rec.max_incoming_vs_phi =
        *std::max_element(rec.d_incoming_vs_phi.begin(), rec.d_incoming_vs_phi.end());
    rec.max_psi_vs_phi = *std::max_element(rec.d_psi_vs_phi.begin(), rec.d_psi_vs_phi.end());
    return rec;
}

FringeShift extract_fringe_shift(const WaveField& psi, double z0, const WaveField& psi_ref,
                                 const UnitVec3& v, double min_visibility) {
    const GridSpec& g = psi.grid();
    if (!(psi_ref.grid() == g)) throw GridMismatch("extract_fringe_shift: grids differ");
    int ax = beam_axis(v);
    int a1 = (ax + 1) % 3, a2 = (ax + 2) % 3;
    if (a1 > a2) std::swap(a1, a2);  // fringe axis = first transverse axis

    // nearest grid plane to z0 along the beam axis
    std::uint32_t plane = 0;
    double best = 1e300;
    for (std::uint32_t i = 0; i < g.n[ax]; ++i) {
        double c = g.origin[ax] + i * g.dx(ax);
        if (std::abs(c - z0) < best) {
            best = std::abs(c - z0);
            plane = i;
        }
    }

    auto collapse = [&](const WaveField& f) {
        std::vector<double> p(g.n[a1], 0.0);
        std::array<std::uint32_t, 3> id{};
        id[ax] = plane;
        for (std::uint32_t i = 0; i < g.n[a1]; ++i) {
            id[a1] = i;
            double s = 0.0;
            for (std::uint32_t j = 0; j < g.n[a2]; ++j) {
                id[a2] = j;
                s += std::norm(f[g.index(id[0], id[1], id[2])]);
            }
            p[i] = s;
        }
        return p;
    };
    std::vector<double> pat = collapse(psi), ref = collapse(psi_ref);

    // smooth the reference to find the two envelope peaks
    auto smooth = [&](const std::vector<double>& p) {
        std::vector<double> s(p.size(), 0.0);
        int w = std::max<int>(2, int(p.size() / 32));
        for (std::size_t i = 0; i < p.size(); ++i) {
            double acc = 0;
            int cnt = 0;
            for (int d = -w; d <= w; ++d) {
                std::size_t q = (i + p.size() + d) % p.size();
                acc += p[q];
                ++cnt;
            }
            s[i] = acc / cnt;
        }
        return s;
    };
    std::vector<double> env = smooth(ref);
    // two dominant local maxima of the envelope
    std::vector<std::pair<double, int>> peaks;
    for (int i = 0; i < int(env.size()); ++i) {
        double prev = env[(i + env.size() - 1) % env.size()];
        double next = env[(i + 1) % env.size()];
        if (env[i] >= prev && env[i] >= next) peaks.push_back({env[i], i});
    }
    std::sort(peaks.rbegin(), peaks.rend());
    if (peaks.size() < 2) throw LowContrast("extract_fringe_shift: single-beam pattern");
    int p1 = peaks[0].second, p2 = peaks[1].second;
    if (p1 > p2) std::swap(p1, p2);
    int mid = (p1 + p2) / 2;
    int halfwin = std::max(3, (p2 - p1) / 3);

    // Hann window around the overlap midline
    std::vector<double> win(pat.size(), 0.0);
    for (int d = -halfwin; d <= halfwin; ++d) {
        int i = mid + d;
        if (i < 0 || i >= int(win.size())) continue;
        win[i] = 0.5 * (1 + std::cos(kPi * d / double(halfwin)));
    }

    // fringe wavevector from the windowed reference spectrum (excluding DC)
    auto windowed_dft = [&](const std::vector<double>& p, double k) {
        cplx acc{0, 0};
        double w0 = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            double x = g.origin[a1] + i * g.dx(a1);
            acc += win[i] * p[i] * std::exp(-kI * (k * x));
            w0 += win[i] * p[i];
        }
        return std::pair<cplx, double>(acc, w0);
    };
    double kbest = 0, abest = 0;
    int nk = int(g.n[a1]);
    for (int m = 2; m < nk / 2; ++m) {
        double k = 2 * kPi * m / g.extents[a1];
        auto [acc, w0] = windowed_dft(ref, k);
        (void)w0;
        if (std::abs(acc) > abest) {
            abest = std::abs(acc);
            kbest = k;
        }
    }
    if (kbest == 0) throw LowContrast("extract_fringe_shift: no fringe frequency found");
    // refine the frequency on the reference pattern
    double dk = 2 * kPi / g.extents[a1];
    for (double step = dk / 4; step > dk / 1024; step /= 2) {
        for (double cand : {kbest - step, kbest + step}) {
            auto [acc, w0] = windowed_dft(ref, cand);
            (void)w0;
            if (std::abs(acc) > abest) {
                abest = std::abs(acc);
                kbest = cand;
            }
        }
    }

    auto [a_pat, w_pat] = windowed_dft(pat, kbest);
    auto [a_ref, w_ref] = windowed_dft(ref, kbest);
    FringeShift out;
    out.fringe_k = kbest;
    out.visibility = 2.0 * std::abs(a_ref) / std::max(w_ref, 1e-300);
    if (out.visibility < min_visibility)
        throw LowContrast("extract_fringe_shift: visibility " + std::to_string(out.visibility));
    if (2.0 * std::abs(a_pat) / std::max(w_pat, 1e-300) < min_visibility)
        throw LowContrast("extract_fringe_shift: pattern visibility too low");
    out.shift = std::arg(a_pat * std::conj(a_ref));
    return out;
}

}  // namespace absim
