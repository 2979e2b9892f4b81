#include "absim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace absim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Brent-style bounded 1-D minimization (golden section with parabolic steps).
double minimize_scalar(const std::function<double(double)>& f, double a, double b, double tol) {
    const double gr = 0.3819660112501051;  // 2 - golden ratio
    double x = a + gr * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        double m = 0.5 * (a + b);
        double tol1 = tol * std::abs(x) + 1e-15;
        double tol2 = 2 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;
        bool parabolic = false;
        if (std::abs(e) > tol1) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2 * (q - r);
            if (q > 0) p = -p;
            q = std::abs(q);
            double etemp = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (m > x) ? tol1 : -tol1;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = gr * e;
        }
        double u = (std::abs(d) >= tol1) ? x + d : x + ((d > 0) ? tol1 : -tol1);
        double fu = f(u);
        if (fu <= fx) {
            if (u < x)
                b = x;
            else
                a = x;
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu <= fw || w == x) {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return x;
}

double line_point_distance2(const OrientedLine& line, const Vec3& p) {
    Vec3 d = p - line.base;
    Vec3 perp = d - Vec3(line.direction) * d.dot(line.direction);
    return perp.norm2();
}

}  // namespace

Vec3 TorusComponent::core_point(double theta) const {
    Vec3 e1, e2;
    orthonormal_frame(axis, e1, e2);
    return center + (e1 * std::cos(theta) + e2 * std::sin(theta)) * major_radius;
}

void TorusComponent::validate() const {
    if (!center.finite()) throw std::invalid_argument("torus: non-finite center");
    if (!(major_radius > 0)) throw std::invalid_argument("torus: major_radius must be > 0");
    if (!(minor_radius > 0) || !(minor_radius < major_radius))
        throw std::invalid_argument("torus: requires 0 < minor_radius < major_radius");
    if (orientation != 1 && orientation != -1)
        throw std::invalid_argument("torus: orientation must be +1 or -1");
}

void BallComponent::validate() const {
    if (!center.finite()) throw std::invalid_argument("ball: non-finite center");
    if (!(radius > 0)) throw std::invalid_argument("ball: radius must be > 0");
}

std::vector<int> MagnetAssembly::torus_indices() const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < components.size(); ++i)
        if (std::holds_alternative<TorusComponent>(components[i])) idx.push_back(static_cast<int>(i));
    return idx;
}

const TorusComponent& MagnetAssembly::torus(int k) const {
    auto idx = torus_indices();
    return std::get<TorusComponent>(components.at(idx.at(k)));
}

namespace {

double component_distance(const Component& comp, const Vec3& x) {
    if (const auto* t = std::get_if<TorusComponent>(&comp)) {
        Vec3 d = x - t->center;
        double h = d.dot(t->axis);
        Vec3 inplane = d - Vec3(t->axis) * h;
        double rho = inplane.norm();
        // distance to the core circle, then subtract the tube radius
        double dc = std::sqrt((rho - t->major_radius) * (rho - t->major_radius) + h * h);
        return dc - t->minor_radius;
    }
    const auto& b = std::get<BallComponent>(comp);
    return (x - b.center).norm() - b.radius;
}

std::vector<Vec3> surface_samples(const Component& comp, int n) {
    std::vector<Vec3> pts;
    if (const auto* t = std::get_if<TorusComponent>(&comp)) {
        Vec3 e1, e2;
        orthonormal_frame(t->axis, e1, e2);
        for (int i = 0; i < n; ++i) {
            double u = 2 * kPi * i / n;
            Vec3 on_core = t->center + (e1 * std::cos(u) + e2 * std::sin(u)) * t->major_radius;
            Vec3 radial = (e1 * std::cos(u) + e2 * std::sin(u));
            for (int j = 0; j < n; ++j) {
                double w = 2 * kPi * j / n;
                Vec3 p = on_core + (radial * std::cos(w) + Vec3(t->axis) * std::sin(w)) * t->minor_radius;
                pts.push_back(p);
            }
        }
    } else {
        const auto& b = std::get<BallComponent>(comp);
        for (int i = 0; i < n; ++i) {
            double th = std::acos(1 - 2.0 * (i + 0.5) / n);
            double ph = kPi * (1 + std::sqrt(5.0)) * i;  // Fibonacci sphere
            Vec3 p = b.center + Vec3{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                                     std::cos(th)} *
                                    b.radius;
            pts.push_back(p);
        }
    }
    return pts;
}

}  // namespace

double MagnetAssembly::distance(const Vec3& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : components) d = std::min(d, component_distance(c, x));
    return d;
}

void MagnetAssembly::validate(int sampling) const {
    if (!(enclosing_radius > 0)) throw std::invalid_argument("magnet: enclosing_radius must be > 0");
    for (const auto& c : components)
        std::visit([](const auto& comp) { comp.validate(); }, c);
    // every component inside the open enclosing ball
    for (std::size_t i = 0; i < components.size(); ++i) {
        for (const Vec3& p : surface_samples(components[i], sampling)) {
            if (!(p.norm() < enclosing_radius)) {
                std::ostringstream os;
                os << "magnet: component " << i << " is not contained in the enclosing ball";
                throw std::invalid_argument(os.str());
            }
        }
    }
    // pairwise separation, checked by sampled surface distance
    for (std::size_t i = 0; i < components.size(); ++i) {
        for (std::size_t j = i + 1; j < components.size(); ++j) {
            double sep = std::numeric_limits<double>::infinity();
            for (const Vec3& p : surface_samples(components[i], sampling))
                sep = std::min(sep, component_distance(components[j], p));
            if (!(sep > 0)) {
                std::ostringstream os;
                os << "magnet: components " << i << " and " << j << " are not disjoint";
                throw std::invalid_argument(os.str());
            }
        }
    }
}

std::string LineClassification::to_string() const {
    switch (kind) {
        case LineClass::Hit:
            return "Hit";
        case LineClass::Out:
            return "Out";
        default: {
            std::ostringstream os;
            os << "Hole[";
            for (std::size_t i = 0; i < signature.size(); ++i) {
                if (i) os << ",";
                os << (signature[i] > 0 ? "+" : "") << signature[i];
            }
            os << "]";
            return os.str();
        }
    }
}

double line_circle_distance(const OrientedLine& line, const Vec3& center, const Vec3& unit_normal,
                            double radius, double tol) {
    Vec3 e1, e2;
    orthonormal_frame(unit_normal, e1, e2);
    auto d2 = [&](double th) {
        Vec3 p = center + (e1 * std::cos(th) + e2 * std::sin(th)) * radius;
        return line_point_distance2(line, p);
    };
    // coarse scan, then refine around the best few local minima
    const int n = 128;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = d2(2 * kPi * i / n);
    for (int i = 0; i < n; ++i) {
        double prev = vals[(i + n - 1) % n], next = vals[(i + 1) % n];
        if (vals[i] <= prev && vals[i] <= next) {
            double a = 2 * kPi * (i - 1) / n, b = 2 * kPi * (i + 1) / n;
            double th = minimize_scalar(d2, a, b, tol);
            best = std::min(best, d2(th));
        }
    }
    return std::sqrt(std::max(best, 0.0));
}

std::optional<DiskCrossing> disk_crossing(const OrientedLine& line, const TorusComponent& torus,
                                          double tangency_tol) {
    Vec3 n = torus.oriented_normal();
    double denom = Vec3(line.direction).dot(n);
    double height = (line.base - torus.center).dot(n);
    if (std::abs(denom) < tangency_tol) {
        if (std::abs(height) < tangency_tol * std::max(1.0, torus.major_radius))
            throw Degenerate("disk_crossing: line is tangent to the spanning-disk plane");
        return std::nullopt;  // parallel to the plane, never crosses it
    }
    double s = -height / denom;
    Vec3 q = line.at(s) - torus.center;
    Vec3 inplane = q - n * q.dot(n);
    double rho = inplane.norm();
    if (std::abs(rho - torus.major_radius) < tangency_tol)
        throw Degenerate("disk_crossing: line grazes the spanning-disk rim");
    if (rho >= torus.major_radius) return std::nullopt;
    return DiskCrossing{s, denom > 0 ? +1 : -1};
}

int linking_number(const OrientedLine& line, const TorusComponent& torus) {
    auto c = disk_crossing(line, torus);
    return c ? c->sign : 0;
}

LineClassification classify_line(const OrientedLine& line, const MagnetAssembly& magnet) {
    if (!line.base.finite() || !Vec3(line.direction).finite())
        throw std::invalid_argument("classify_line: non-finite line");
    // Hit test against each component
    for (const auto& comp : magnet.components) {
        if (const auto* t = std::get_if<TorusComponent>(&comp)) {
            double d = line_circle_distance(line, t->center, t->axis, t->major_radius);
            if (d <= t->minor_radius) return {LineClass::Hit, {}};
        } else {
            const auto& b = std::get<BallComponent>(comp);
            if (line_point_distance2(line, b.center) <= b.radius * b.radius)
                return {LineClass::Hit, {}};
        }
    }
    auto tori = magnet.torus_indices();
    std::vector<int> sig(tori.size(), 0);
    bool any = false;
    for (std::size_t k = 0; k < tori.size(); ++k) {
        sig[k] = linking_number(line, std::get<TorusComponent>(magnet.components[tori[k]]));
        any = any || sig[k] != 0;
    }
    if (any) return {LineClass::Hole, std::move(sig)};
    return {LineClass::Out, std::move(sig)};
}

bool same_class(const OrientedLine& a, const OrientedLine& b, const MagnetAssembly& magnet) {
    auto ca = classify_line(a, magnet);
    auto cb = classify_line(b, magnet);
    if (ca.is_hit() || cb.is_hit()) throw ClassMismatch("same_class: a Hit line has no hole class");
    return ca.signature == cb.signature;
}

bool in_region_C(const Vec3& x, const LineClassification& cls, const UnitVec3& v,
                 const MagnetAssembly& magnet) {
    if (cls.is_hit()) throw std::invalid_argument("in_region_C: class must be Hole or Out");
    if (magnet.contains(x)) return false;
    const double R = magnet.enclosing_radius;
    bool inside_ball = x.norm() <= R;
    if (!inside_ball) {
        if (cls.is_out()) return true;          // all of the exterior, plane included
        return x.dot(v) != 0.0;                 // hole classes exclude the transverse plane
    }
    auto here = classify_line(OrientedLine{x, v}, magnet);
    if (here.is_hit()) return false;
    return here.signature == cls.signature;
}

OrientedLine representative_line(const LineClassification& cls, const UnitVec3& v,
                                 const MagnetAssembly& magnet) {
    if (cls.is_hit()) throw std::invalid_argument("representative_line: class must be Hole or Out");
    const double R = magnet.enclosing_radius;
    Vec3 e1, e2;
    orthonormal_frame(v, e1, e2);
    if (cls.is_out()) return OrientedLine{e1 * (2.0 * R), v};
    const int n = 96;
    for (int pass = 0; pass < 3; ++pass) {
        double jitter = pass * 0.37 / n;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                double u = (-1.0 + 2.0 * (i + 0.5) / n + jitter) * R;
                double wq = (-1.0 + 2.0 * (k + 0.5) / n + jitter) * R;
                OrientedLine cand{e1 * u + e2 * wq, v};
                try {
                    auto c = classify_line(cand, magnet);
                    if (c.is_hole() && c.signature == cls.signature) return cand;
                } catch (const Degenerate&) {
                    continue;
                }
            }
        }
    }
    throw UnrealizedClass("representative_line: no line realizes the requested signature");
}

}  // namespace absim
