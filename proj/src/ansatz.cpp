#include "absim/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace absim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI{0.0, 1.0};

int axis_of(const UnitVec3& v) {
    for (int ax = 0; ax < 3; ++ax) {
        Vec3 e{ax == 0 ? 1.0 : 0.0, ax == 1 ? 1.0 : 0.0, ax == 2 ? 1.0 : 0.0};
        if (std::abs(std::abs(Vec3(v).dot(e)) - 1.0) < 1e-14) return ax;
    }
    return -1;
}

double line_clearance(const OrientedLine& line, const MagnetAssembly& magnet) {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& comp : magnet.components) {
        if (const auto* t = std::get_if<TorusComponent>(&comp)) {
            c = std::min(c, line_circle_distance(line, t->center, t->axis, t->major_radius) -
                                t->minor_radius);
        } else {
            const auto& b = std::get<BallComponent>(comp);
            Vec3 d = b.center - line.base;
            Vec3 perp = d - Vec3(line.direction) * d.dot(line.direction);
            c = std::min(c, perp.norm() - b.radius);
        }
    }
    return c;
}

}  // namespace

ClassMap::ClassMap(const MagnetAssembly& magnet, const GridSpec& grid, const UnitVec3& v)
    : grid_(grid), v_(v) {
    const std::size_t n = grid.size();
    ids_.assign(n, kHitId);
    clearance_.assign(n, 0.0f);
    auto tori = magnet.torus_indices();
    behind_.assign(tori.size(), std::vector<std::int8_t>(n, 0));
    full_.assign(tori.size(), std::vector<std::int8_t>(n, 0));
    table_.push_back({LineClass::Hit, {}});

    auto id_for = [&](const LineClassification& cls) {
        for (std::size_t i = 0; i < table_.size(); ++i)
            if (table_[i].kind == cls.kind && table_[i].signature == cls.signature) return int(i);
        table_.push_back(cls);
        return int(table_.size() - 1);
    };

    struct LineData {
        int id;
        float clearance;
        std::vector<double> cross_s;  // per torus; NaN = no crossing
        std::vector<int> cross_sign;
    };
    auto analyze = [&](const OrientedLine& line) {
        LineData ld;
        LineClassification cls;
        try {
            cls = classify_line(line, magnet);
        } catch (const Degenerate&) {
            OrientedLine nudged{line.base + Vec3{1, 1, 1} * (1e-6 * magnet.enclosing_radius),
                                line.direction};
            cls = classify_line(nudged, magnet);
        }
        ld.id = id_for(cls);
        ld.clearance = float(line_clearance(line, magnet));
        ld.cross_s.assign(tori.size(), std::numeric_limits<double>::quiet_NaN());
        ld.cross_sign.assign(tori.size(), 0);
        for (std::size_t j = 0; j < tori.size(); ++j) {
            try {
                auto c = disk_crossing(line, std::get<TorusComponent>(magnet.components[tori[j]]));
                if (c) {
                    ld.cross_s[j] = c->s;
                    ld.cross_sign[j] = c->sign;
                }
            } catch (const Degenerate&) {
                // a parallel grazing line: treat as no crossing; the class id
                // came from the nudged line
            }
        }
        return ld;
    };

    const int ax = axis_of(v);
    if (ax >= 0) {
        // lines coincide along one grid axis; classify each transverse column once
        const double sign = Vec3(v)[ax] > 0 ? 1.0 : -1.0;
        (void)sign;
        std::array<int, 2> tr{};
        int t = 0;
        for (int a = 0; a < 3; ++a)
            if (a != ax) tr[t++] = a;
        std::array<std::uint32_t, 3> ids{};
        for (std::uint32_t u = 0; u < grid.n[tr[0]]; ++u) {
            for (std::uint32_t w = 0; w < grid.n[tr[1]]; ++w) {
                ids[tr[0]] = u;
                ids[tr[1]] = w;
                ids[ax] = 0;
                Vec3 base = grid.point(ids[0], ids[1], ids[2]);
                OrientedLine line{base, v};
                LineData ld = analyze(line);
                for (std::uint32_t s = 0; s < grid.n[ax]; ++s) {
                    ids[ax] = s;
                    std::size_t idx = grid.index(ids[0], ids[1], ids[2]);
                    ids_[idx] = std::int16_t(ld.id);
                    clearance_[idx] = ld.clearance;
                    Vec3 x = grid.point(ids[0], ids[1], ids[2]);
                    double s_here = (x - base).dot(v);
                    for (std::size_t j = 0; j < tori.size(); ++j) {
                        if (ld.cross_sign[j] == 0) continue;
                        full_[j][idx] = std::int8_t(ld.cross_sign[j]);
                        if (ld.cross_s[j] < s_here) behind_[j][idx] = std::int8_t(ld.cross_sign[j]);
                    }
                }
            }
        }
    } else {
        std::size_t idx = 0;
        for (std::uint32_t i = 0; i < grid.n[0]; ++i)
            for (std::uint32_t j2 = 0; j2 < grid.n[1]; ++j2)
                for (std::uint32_t k = 0; k < grid.n[2]; ++k, ++idx) {
                    OrientedLine line{grid.point(i, j2, k), v};
                    LineData ld = analyze(line);
                    ids_[idx] = std::int16_t(ld.id);
                    clearance_[idx] = ld.clearance;
                    for (std::size_t j = 0; j < tori.size(); ++j) {
                        if (ld.cross_sign[j] == 0) continue;
                        full_[j][idx] = std::int8_t(ld.cross_sign[j]);
                        if (ld.cross_s[j] < 0) behind_[j][idx] = std::int8_t(ld.cross_sign[j]);
                    }
                }
    }
}

int ClassMap::id_of(const LineClassification& cls) const {
    for (std::size_t i = 0; i < table_.size(); ++i)
        if (table_[i].kind == cls.kind && table_[i].signature == cls.signature) return int(i);
    return -1;
}

AnsatzWorkspace::AnsatzWorkspace(const PotentialField& field, const GridSpec& grid,
                                 const UnitVec3& v)
    : field_(&field), grid_(grid), v_(v), class_map_(field.magnet(), grid, v) {
    omega_.resize(field.magnet().num_tori());
    omega_ready_.assign(omega_.size(), false);
}

const std::vector<double>& AnsatzWorkspace::disk_potential_grid(int j) const {
    if (!omega_ready_[j]) {
        std::vector<double>& om = omega_[j];
        om.resize(grid_.size());
        std::size_t idx = 0;
        for (std::uint32_t i = 0; i < grid_.n[0]; ++i)
            for (std::uint32_t j2 = 0; j2 < grid_.n[1]; ++j2)
                for (std::uint32_t k = 0; k < grid_.n[2]; ++k, ++idx)
                    om[idx] = field_->disk_potential(j, grid_.point(i, j2, k));
        omega_ready_[j] = true;
    }
    return omega_[j];
}

std::vector<std::uint8_t> AnsatzWorkspace::region_mask(const LineClassification& cls) const {
    if (cls.is_hit()) throw std::invalid_argument("region_mask: class must be Hole or Out");
    const double R = field_->magnet().enclosing_radius;
    int want = class_map_.id_of(cls);
    std::vector<std::uint8_t> mask(grid_.size(), 0);
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < grid_.n[0]; ++i)
        for (std::uint32_t j = 0; j < grid_.n[1]; ++j)
            for (std::uint32_t k = 0; k < grid_.n[2]; ++k, ++idx) {
                Vec3 x = grid_.point(i, j, k);
                double r = x.norm();
                if (r > R) {
                    mask[idx] = cls.is_out() ? 1 : (x.dot(v_) != 0.0 ? 1 : 0);
                } else {
                    mask[idx] = (want >= 0 && class_map_.class_id(idx) == want) ? 1 : 0;
                }
            }
    return mask;
}

std::vector<double> AnsatzWorkspace::lambda_field(const LineClassification& cls) const {
    if (cls.is_hit()) throw std::invalid_argument("lambda_field: class must be Hole or Out");
    const auto& flux = field_->flux();
    const double R = field_->magnet().enclosing_radius;
    const bool compact = field_->gauge() == GaugeTag::Compactified;
    const Vec3 x0 = field_->gauge_base_point(v_);
    const Vec3 xe{0, 0, -2 * R};

    std::vector<double> lam(grid_.size(), 0.0);
    for (std::size_t j = 0; j < flux.size(); ++j) {
        if (flux[j] == 0.0) continue;
        const auto& om = disk_potential_grid(int(j));
        const double coeff = flux[j] / (4 * kPi);
        const double om_base = field_->disk_potential(int(j), compact ? xe : x0);
        const int sig_j = cls.is_hole() ? cls.signature[j] : 0;
        std::size_t idx = 0;
        for (std::uint32_t i = 0; i < grid_.n[0]; ++i)
            for (std::uint32_t j2 = 0; j2 < grid_.n[1]; ++j2)
                for (std::uint32_t k = 0; k < grid_.n[2]; ++k, ++idx) {
                    Vec3 x = grid_.point(i, j2, k);
                    double r = x.norm();
                    int w;
                    if (r > R)
                        w = x.dot(v_) > 0 ? sig_j : 0;
                    else
                        w = class_map_.crossing_behind(int(j), idx);
                    double s;
                    if (compact) {
                        double chi = r >= R ? 1.0 : field_->chi_exterior(r);
                        s = (1.0 - chi) * coeff * (om[idx] - om_base);
                    } else {
                        s = coeff * (om[idx] - om_base);
                    }
                    lam[idx] += s + flux[j] * w;
                }
    }
    return lam;
}

std::vector<cplx> AnsatzWorkspace::dirac_phase(const LineClassification& cls) const {
    if (field_->gauge() != GaugeTag::Compactified)
        throw std::invalid_argument("dirac_phase: requires the compactified gauge");
    auto mask = region_mask(cls);
    auto lam = lambda_field(cls);
    std::vector<cplx> phase(grid_.size());
    for (std::size_t q = 0; q < phase.size(); ++q)
        phase[q] = mask[q] ? std::exp(kI * lam[q]) : cplx{0, 0};
    return phase;
}

const std::vector<double>& AnsatzWorkspace::incoming_phase() const {
    if (incoming_.empty()) {
        const auto& flux = field_->flux();
        const double R = field_->magnet().enclosing_radius;
        const bool compact = field_->gauge() == GaugeTag::Compactified;
        const Vec3 xe{0, 0, -2 * R};
        incoming_.assign(grid_.size(), 0.0);
        for (std::size_t j = 0; j < flux.size(); ++j) {
            if (flux[j] == 0.0) continue;
            const auto& om = disk_potential_grid(int(j));
            const double coeff = flux[j] / (4 * kPi);
            const double om_e = compact ? field_->disk_potential(int(j), xe) : 0.0;
            std::size_t idx = 0;
            for (std::uint32_t i = 0; i < grid_.n[0]; ++i)
                for (std::uint32_t j2 = 0; j2 < grid_.n[1]; ++j2)
                    for (std::uint32_t k = 0; k < grid_.n[2]; ++k, ++idx) {
                        Vec3 x = grid_.point(i, j2, k);
                        int c = class_map_.crossing_behind(int(j), idx);
                        double g = coeff * om[idx] + flux[j] * c;
                        if (compact) {
                            double r = x.norm();
                            double chi = r >= R ? 1.0 : field_->chi_exterior(r);
                            g = (1 - chi) * coeff * om[idx] + flux[j] * c +
                                (chi - 1) * coeff * om_e;
                        }
                        incoming_[idx] += g;
                    }
        }
        if (flux.all_zero()) incoming_.assign(grid_.size(), 0.0);
    }
    return incoming_;
}

const std::vector<double>& AnsatzWorkspace::full_line_phase() const {
    if (full_line_.empty()) {
        const auto& flux = field_->flux();
        full_line_.assign(grid_.size(), 0.0);
        for (std::size_t j = 0; j < flux.size(); ++j) {
            if (flux[j] == 0.0) continue;
            for (std::size_t q = 0; q < full_line_.size(); ++q)
                full_line_[q] += flux[j] * class_map_.crossing_full(int(j), q);
        }
    }
    return full_line_;
}

std::vector<LineClassification> AnsatzWorkspace::realized_classes() const {
    std::vector<LineClassification> out;
    for (int id = 0; id < class_map_.num_classes(); ++id) {
        const auto& cls = class_map_.classification(id);
        if (!cls.is_hit()) out.push_back(cls);
    }
    return out;
}

PacketDecomposition decompose(const WaveField& phi0, const UnitVec3& v,
                              const MagnetAssembly& magnet) {
    const GridSpec& g = phi0.grid();
    ClassMap cm(magnet, g, v);
    const double total2 = phi0.norm2();
    if (!(total2 > 0)) throw std::invalid_argument("decompose: empty field");

    std::vector<double> mass(cm.num_classes(), 0.0);
    for (std::size_t q = 0; q < phi0.size(); ++q)
        mass[cm.class_id(q)] += std::norm(phi0[q]);
    for (double& m : mass) m *= g.cell_volume();

    if (mass[ClassMap::kHitId] > 1e-6 * total2)
        throw SupportViolation("decompose: " + std::to_string(mass[ClassMap::kHitId] / total2) +
                               " of the squared norm sits on Hit lines");

    PacketDecomposition dec;
    dec.direction = v;
    dec.parent_norm2 = total2;
    for (int id = 0; id < cm.num_classes(); ++id) {
        if (id == ClassMap::kHitId) continue;
        if (mass[id] < 1e-14 * total2) continue;
        const auto& cls = cm.classification(id);
        WaveField comp(g);
        for (std::size_t q = 0; q < phi0.size(); ++q)
            comp[q] = (cm.class_id(q) == id) ? phi0[q] : cplx{0, 0};
        dec.parts.push_back({cls, std::move(comp)});
    }
    std::stable_sort(dec.parts.begin(), dec.parts.end(),
                     [](const auto& a, const auto& b) { return a.cls.is_hole() && b.cls.is_out(); });
    return dec;
}

WaveField ab_component(const WaveField& phi_component, double t, const LineClassification& cls,
                       const AnsatzWorkspace& ws) {
    auto phase = ws.dirac_phase(cls);
    WaveField out = free_evolve(phi_component, t);
    for (std::size_t q = 0; q < out.size(); ++q) out[q] *= phase[q];
    return out;
}

WaveField ab_total(const PacketDecomposition& dec, double t, const AnsatzWorkspace& ws) {
    if (dec.parts.empty()) throw std::invalid_argument("ab_total: empty decomposition");
    WaveField total(dec.parts.front().component.grid());
    for (const auto& part : dec.parts) {
        WaveField c = ab_component(part.component, t, part.cls, ws);
        for (std::size_t q = 0; q < total.size(); ++q) total[q] += c[q];
    }
    return total;
}

WaveField incoming_leading_order(double z, const WaveField& phi_v, double speed,
                                 const AnsatzWorkspace& ws) {
    const auto& g = ws.incoming_phase();
    WaveField out = free_evolve(phi_v, z / speed);
    for (std::size_t q = 0; q < out.size(); ++q) out[q] *= std::exp(kI * g[q]);
    return out;
}

WaveField approx_solution(ApproxVariant variant, double Z, double z, const WaveField& phi_v,
                          double speed, const AnsatzWorkspace& ws) {
    if (!(Z >= 0)) throw std::invalid_argument("approx_solution: Z must be nonnegative");
    if (!(speed > 0)) throw std::invalid_argument("approx_solution: speed must be positive");
    if (z <= Z) return incoming_leading_order(z, phi_v, speed, ws);
    if (variant == ApproxVariant::psi_371) {
        WaveField mid = incoming_leading_order(Z, phi_v, speed, ws);
        return free_evolve(mid, (z - Z) / speed);
    }
    const auto& f = ws.full_line_phase();
    WaveField dressed = phi_v;
    for (std::size_t q = 0; q < dressed.size(); ++q) dressed[q] *= std::exp(kI * f[q]);
    return free_evolve(dressed, z / speed);
}

}  // namespace absim
