#include "absim/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace absim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// nodes/weights of 8-point Gauss-Legendre on [-1,1]
constexpr double kGx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                           -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                           0.7966664774136267,  0.9602898564975363};
constexpr double kGw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                           0.2223810344533745, 0.1012285362903763};

double quintic_smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (t * (6 * t - 15) + 10);
}

double quintic_smoothstep_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30 * t * t * (t - 1) * (t - 1);
}

}  // namespace

bool FluxAssignment::all_zero() const {
    for (double p : phi)
        if (p != 0.0) return false;
    return true;
}

void FluxAssignment::validate(const MagnetAssembly& magnet) const {
    if (phi.size() != magnet.num_tori())
        throw std::invalid_argument("flux: one value per torus component required");
    for (double p : phi)
        if (!std::isfinite(p)) throw std::invalid_argument("flux: non-finite value");
    if (!all_zero() && magnet.num_tori() == 0)
        throw std::invalid_argument("flux: assembly has no torus to carry flux");
}

double ElectricPotential::operator()(const Vec3& x, const MagnetAssembly& magnet) const {
    switch (profile) {
        case Profile::None:
            return 0.0;
        case Profile::InversePower:
            return v0 * std::pow(1.0 + (x - center).norm2(), -alpha / 2.0);
        case Profile::MagnetIndicator:
            return magnet.contains(x) ? v0 : 0.0;
    }
    return 0.0;
}

void ElectricPotential::validate() const {
    if (profile == Profile::InversePower && !(alpha > 1.0))
        throw std::invalid_argument("electric potential: decay exponent must exceed 1");
    if (!std::isfinite(v0)) throw std::invalid_argument("electric potential: non-finite strength");
}

PotentialField::PotentialField(MagnetAssembly magnet, FluxAssignment flux, GaugeTag gauge,
                               int quadrature_segments, ElectricPotential electric)
    : magnet_(std::move(magnet)),
      flux_(std::move(flux)),
      gauge_(gauge),
      segments_(quadrature_segments),
      electric_(electric) {
    flux_.validate(magnet_);
    electric_.validate();
    if (segments_ < 16) throw std::invalid_argument("potential: quadrature order too small");

    const double R = magnet_.enclosing_radius;
    compact_eps_ = 0.1 * R;
    ext_base_ = Vec3{0, 0, -2 * R};

    for (int ti : magnet_.torus_indices()) {
        const auto& t = std::get<TorusComponent>(magnet_.components[ti]);
        CoreQuadrature cq;
        cq.center = t.center;
        cq.normal = t.oriented_normal();
        cq.radius = t.major_radius;
        Vec3 e1, e2;
        orthonormal_frame(t.axis, e1, e2);
        double dl = 2 * kPi * t.major_radius / segments_;
        for (int k = 0; k < segments_; ++k) {
            double th = 2 * kPi * (k + 0.5) / segments_;
            cq.points.push_back(t.center + (e1 * std::cos(th) + e2 * std::sin(th)) * t.major_radius);
            Vec3 tangent = (e2 * std::cos(th) - e1 * std::sin(th)) * t.orientation;
            cq.weighted_tangents.push_back(tangent * dl);
        }
        cores_.push_back(std::move(cq));
        if (gauge_ == GaugeTag::Compactified) {
            if (!(t.center.norm() + t.major_radius < R - compact_eps_))
                throw std::invalid_argument(
                    "compactified gauge requires every core circle inside the cutoff shell");
        }
    }
}

Vec3 PotentialField::base_A(const Vec3& x) const {
    Vec3 a{0, 0, 0};
    for (std::size_t j = 0; j < cores_.size(); ++j) {
        if (flux_[j] == 0.0) continue;
        const auto& cq = cores_[j];
        // distance guard against the singular core circle
        {
            Vec3 d = x - cq.center;
            double h = d.dot(cq.normal);
            double rho = (d - cq.normal * h).norm();
            double dist = std::hypot(rho - cq.radius, h);
            if (dist < kSingularDistance)
                throw SingularPoint("eval_A: point on a core circle");
        }
        Vec3 s{0, 0, 0};
        for (std::size_t k = 0; k < cq.points.size(); ++k) {
            Vec3 d = x - cq.points[k];
            double r2 = d.norm2();
            double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
            s += cq.weighted_tangents[k].cross(d) * inv_r3;
        }
        a += s * (flux_[j] / (4 * kPi));
    }
    return a;
}

double PotentialField::disk_potential(int j, const Vec3& x) const {
    const auto& cq = cores_.at(j);
    Vec3 d = x - cq.center;
    double z = d.dot(cq.normal);
    double rho = (d - cq.normal * z).norm();
    const double a = cq.radius;
    if (z == 0.0) {
        if (rho <= a) throw SingularPoint("disk_potential: point on the branch disk");
        return 0.0;
    }
    // view factor of the disk, via the closed-form radial antiderivative and an
    // exponentially convergent periodic rule in the azimuth
    auto estimate = [&](int m) {
        double sum = 0.0;
        double gamma = z * z + rho * rho;
        for (int i = 0; i < m; ++i) {
            double phi = 2 * kPi * (i + 0.5) / m;
            double beta = -2 * rho * std::cos(phi);
            double den = 4 * gamma - beta * beta;
            double na = -(2 * beta * a + 4 * gamma) / (den * std::sqrt(a * a + beta * a + gamma));
            double n0 = -(4 * gamma) / (den * std::sqrt(gamma));
            sum += na - n0;
        }
        return z * sum * 2 * kPi / m;
    };
    int m = 64;
    double f = estimate(m);
    for (; m <= 16384; ) {
        m *= 2;
        double f2 = estimate(m);
        if (std::abs(f2 - f) <= 1e-12 * (1.0 + std::abs(f2))) {
            f = f2;
            break;
        }
        f = f2;
    }
    return -f;  // orientation such that (phi/4pi) * grad reproduces the loop field
}

double PotentialField::chi_exterior(double r) const {
    const double R = magnet_.enclosing_radius;
    return quintic_smoothstep((r - (R - compact_eps_)) / compact_eps_);
}

double PotentialField::chi_exterior_deriv(double r) const {
    const double R = magnet_.enclosing_radius;
    return quintic_smoothstep_deriv((r - (R - compact_eps_)) / compact_eps_) / compact_eps_;
}

double PotentialField::lambda_exterior(const Vec3& x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < cores_.size(); ++j) {
        if (flux_[j] == 0.0) continue;
        s += flux_[j] / (4 * kPi) * (disk_potential(j, x) - disk_potential(j, ext_base_));
    }
    return s;
}

Vec3 PotentialField::eval_A(const Vec3& x) const {
    if (!x.finite()) throw std::invalid_argument("eval_A: non-finite point");
    if (gauge_ == GaugeTag::SolidAngle) return base_A(x);
    const double r = x.norm();
    const double R = magnet_.enclosing_radius;
    if (r >= R) return Vec3{0, 0, 0};
    if (r <= R - compact_eps_) return base_A(x);
    double chi = chi_exterior(r);
    double dchi = chi_exterior_deriv(r);
    Vec3 a = base_A(x) * (1.0 - chi);
    if (dchi != 0.0 && r > 0) a -= (x / r) * (dchi * lambda_exterior(x));
    return a;
}

double PotentialField::eval_V(const Vec3& x) const { return electric_(x, magnet_); }

double PotentialField::segment_integral(const Vec3& a, const Vec3& b) const {
    // composite 8-point Gauss with adaptive halving
    struct Panel {
        double t0, t1;
    };
    Vec3 dir = b - a;
    auto integrand = [&](double t) { return eval_A(a + dir * t).dot(dir); };
    auto gauss = [&](double t0, double t1) {
        double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
        double s = 0.0;
        for (int i = 0; i < 8; ++i) s += kGw[i] * integrand(mid + half * kGx[i]);
        return s * half;
    };
    std::vector<Panel> stack{{0.0, 1.0}};
    double total = 0.0;
    int evals = 0;
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        double whole = gauss(p.t0, p.t1);
        double m = 0.5 * (p.t0 + p.t1);
        double split = gauss(p.t0, m) + gauss(m, p.t1);
        if (std::abs(split - whole) < 1e-9 || (p.t1 - p.t0) < 1e-12 || ++evals > 20000) {
            total += split;
        } else {
            stack.push_back({p.t0, m});
            stack.push_back({m, p.t1});
        }
    }
    return total;
}

double PotentialField::circulation(const std::vector<Vec3>& loop) const {
    if (loop.size() < 3) throw std::invalid_argument("circulation: need a closed polyline");
    for (const Vec3& p : loop)
        if (magnet_.contains(p)) throw LoopIntersectsMagnet("circulation: loop touches the magnet");
    double total = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec3& a = loop[i];
        const Vec3& b = loop[(i + 1) % loop.size()];
        // also guard the segment midpoint (quadrature nodes stay between endpoints)
        if (magnet_.contains((a + b) * 0.5))
            throw LoopIntersectsMagnet("circulation: loop segment crosses the magnet");
        total += segment_integral(a, b);
    }
    return total;
}

double PotentialField::line_integral_L(const Vec3& x, const UnitVec3& v, double t) const {
    auto ray_value = [&](double tau) { return eval_A(x + Vec3(v) * tau); };
    (void)ray_value;
    if (t == 0.0) return 0.0;
    if (std::isfinite(t)) {
        return segment_integral(x, x + Vec3(v) * t) * 1.0;
    }
    // infinite ray: integrate to a finite horizon, then rely on the analytic
    // tail bound  |tail| <= sum_j |phi_j| a_j / (2 (T - b_j))  from the 1/d^2
    // far-field decay of the loop potentials
    const double sign = (t > 0) ? 1.0 : -1.0;
    const double R = magnet_.enclosing_radius;
    double c_tail = 0.0, b_off = 0.0;
    for (std::size_t j = 0; j < cores_.size(); ++j) {
        c_tail += std::abs(flux_[j]) * cores_[j].radius / 2.0;
        b_off = std::max(b_off, (x - cores_[j].center).norm() + cores_[j].radius);
    }
    double t_cut;
    if (gauge_ == GaugeTag::Compactified) {
        t_cut = x.norm() + R + 1.0;  // the field vanishes outside the ball
    } else {
        t_cut = std::max(100.0 * R, b_off + (c_tail > 0 ? c_tail / 1e-8 : 0.0));
    }
    // geometric panels keep the adaptive quadrature cheap on the long tail
    double total = 0.0;
    double t0 = 0.0, t1 = std::min(t_cut, 4.0 * R + b_off);
    while (t0 < t_cut) {
        total += segment_integral(x + Vec3(v) * (sign * t0), x + Vec3(v) * (sign * t1));
        t0 = t1;
        t1 = std::min(2.0 * t1, t_cut);
        if (t1 <= t0) break;
    }
    return total;
}

double PotentialField::flux_F_h(const std::vector<int>& signature) const {
    if (signature.size() != cores_.size())
        throw UnrealizedClass("flux_F_h: signature length does not match the torus count");
    double f = 0.0;
    for (std::size_t j = 0; j < signature.size(); ++j) {
        if (signature[j] < -1 || signature[j] > 1)
            throw UnrealizedClass("flux_F_h: straight lines cross each spanning disk at most once");
        f += signature[j] * flux_[j];
    }
    return f;
}

Vec3 PotentialField::gauge_base_point(const UnitVec3& v) const {
    return Vec3(v) * (-3.0 * magnet_.enclosing_radius);
}

namespace {

// minor great-circle arc between two directions, as a polyline at radius rho
std::vector<Vec3> arc_polyline(const Vec3& from, const Vec3& to, double rho, int n = 96) {
    Vec3 u = from / from.norm();
    Vec3 w = to / to.norm();
    double c = std::clamp(u.dot(w), -1.0, 1.0);
    double ang = std::acos(c);
    std::vector<Vec3> pts;
    if (ang < 1e-12) return pts;
    Vec3 axis = u.cross(w);
    double an = axis.norm();
    if (an < 1e-12) {
        // antipodal: detour through an arbitrary orthogonal direction
        Vec3 e1, e2;
        orthonormal_frame(u, e1, e2);
        auto first = arc_polyline(u, e1, rho, n / 2);
        auto second = arc_polyline(e1, w, rho, n / 2);
        pts = first;
        pts.push_back(e1 * rho);
        pts.insert(pts.end(), second.begin(), second.end());
        return pts;
    }
    axis = axis / an;
    for (int i = 1; i < n; ++i) {
        double th = ang * i / n;
        // Rodrigues rotation of u about axis
        Vec3 p = u * std::cos(th) + axis.cross(u) * std::sin(th) + axis * (axis.dot(u) * (1 - std::cos(th)));
        pts.push_back(p * rho);
    }
    return pts;
}

}  // namespace

std::vector<Vec3> PotentialField::canonical_path(const LineClassification& cls, const UnitVec3& v,
                                                 const Vec3& x) const {
    const double R = magnet_.enclosing_radius;
    const double rho = 3.0 * R;
    const Vec3 x0 = gauge_base_point(v);

    auto route_outside = [&](const Vec3& from, const Vec3& to) {
        // from and to outside the closed ball; polyline staying at radius >= R
        std::vector<Vec3> path{from};
        Vec3 fu = from / from.norm();
        Vec3 tu = to / to.norm();
        if (from.norm() > rho * 0.999 && to.norm() > rho * 0.999) {
            auto arc = arc_polyline(fu, tu, rho);
            path.insert(path.end(), arc.begin(), arc.end());
        } else {
            path.push_back(fu * rho);
            auto arc = arc_polyline(fu, tu, rho);
            path.insert(path.end(), arc.begin(), arc.end());
            path.push_back(tu * rho);
        }
        path.push_back(to);
        return path;
    };

    const double side = x.dot(v);
    const bool inside_ball = x.norm() <= R;

    if (!inside_ball && (cls.is_out() || side < 0)) {
        return route_outside(x0, x);  // stays clear of every spanning disk
    }
    if (inside_ball) {
        // enter along the line through x
        double s_in = -x.dot(v) - std::sqrt(std::max(R * R - (x - Vec3(v) * x.dot(v)).norm2(), 0.0));
        Vec3 entry = x + Vec3(v) * s_in;
        auto path = route_outside(x0, entry);
        path.push_back(x);
        return path;
    }
    // downstream exterior point of a hole class: route through the reference chord
    OrientedLine ref = representative_line(cls, v, magnet_);
    Vec3 perp = ref.base - Vec3(v) * ref.base.dot(v);
    double half = std::sqrt(std::max(R * R - perp.norm2(), 0.0));
    Vec3 ref_in = perp - Vec3(v) * half;
    Vec3 ref_out = perp + Vec3(v) * half;
    auto path = route_outside(x0, ref_in);
    path.push_back(ref_out);
    auto tail = route_outside(ref_out, x);
    path.insert(path.end(), tail.begin() + 1, tail.end());
    return path;
}

double PotentialField::gauge_lambda(const LineClassification& cls, const UnitVec3& v, const Vec3& x,
                                    bool via_path_quadrature) const {
    if (cls.is_hit()) throw std::invalid_argument("gauge_lambda: class must be Hole or Out");
    if (!in_region_C(x, cls, v, magnet_))
        throw OutsideDomain("gauge_lambda: point is outside the class transit domain");

    if (via_path_quadrature) {
        auto path = canonical_path(cls, v, x);
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            total += segment_integral(path[i], path[i + 1]);
        return total;
    }

    const Vec3 x0 = gauge_base_point(v);
    const double R = magnet_.enclosing_radius;

    // crossing corrections along the canonical path
    std::vector<int> w(cores_.size(), 0);
    if (x.norm() > R) {
        if (x.dot(v) > 0)
            for (std::size_t j = 0; j < w.size(); ++j) w[j] = cls.signature.empty() ? 0 : cls.signature[j];
    } else {
        OrientedLine line{x, v};
        auto tori = magnet_.torus_indices();
        for (std::size_t j = 0; j < w.size(); ++j) {
            auto c = disk_crossing(line, std::get<TorusComponent>(magnet_.components[tori[j]]));
            if (c && c->s < 0) w[j] = c->sign;
        }
    }

    double lam = 0.0;
    for (std::size_t j = 0; j < cores_.size(); ++j) {
        if (flux_[j] == 0.0) continue;
        double coeff = flux_[j] / (4 * kPi);
        if (gauge_ == GaugeTag::SolidAngle) {
            lam += coeff * (disk_potential(j, x) - disk_potential(j, x0));
        } else {
            double chi = x.norm() >= R ? 1.0 : chi_exterior(x.norm());
            lam += coeff * (1.0 - chi) * (disk_potential(j, x) - disk_potential(j, ext_base_));
        }
        lam += flux_[j] * w[j];
    }
    return lam;
}

PotentialField PotentialField::compactify() const {
    if (gauge_ != GaugeTag::SolidAngle)
        throw std::invalid_argument("compactify: input must be in the solid-angle gauge");
    return PotentialField(magnet_, flux_, GaugeTag::Compactified, segments_, electric_);
}

}  // namespace absim
