#include "unit/oracles.hpp"

#include <cmath>

namespace absim::oracles {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double gauss_linking(const std::vector<Vec3>& ca, const std::vector<Vec3>& cb) {
    double acc = 0.0;
    const std::size_t na = ca.size(), nb = cb.size();
    for (std::size_t i = 0; i < na; ++i) {
        Vec3 a0 = ca[i], a1 = ca[(i + 1) % na];
        Vec3 da = a1 - a0;
        Vec3 ma = (a0 + a1) * 0.5;
        for (std::size_t j = 0; j < nb; ++j) {
            Vec3 b0 = cb[j], b1 = cb[(j + 1) % nb];
            Vec3 db = b1 - b0;
            Vec3 r = ma - (b0 + b1) * 0.5;
            double rn = r.norm();
            acc += r.dot(da.cross(db)) / (rn * rn * rn);
        }
    }
    return acc / (4 * kPi);
}

std::vector<Vec3> close_line_through_ball(const OrientedLine& line, double rho, int chord_pts,
                                          int arc_pts) {
    // chord of |x| <= rho along the line
    Vec3 v = line.direction;
    double b = line.base.dot(v);
    Vec3 perp = line.base - v * b;
    double p2 = perp.norm2();
    if (p2 >= rho * rho) throw std::invalid_argument("close_line_through_ball: line misses the ball");
    double half = std::sqrt(rho * rho - p2);
    Vec3 entry = perp - v * half;
    Vec3 exit = perp + v * half;
    std::vector<Vec3> curve;
    for (int i = 0; i < chord_pts; ++i)
        curve.push_back(entry + (exit - entry) * (double(i) / chord_pts));
    // great arc on the sphere from exit back to entry
    Vec3 u0 = exit / exit.norm();
    Vec3 u1 = entry / entry.norm();
    double ang = std::acos(std::clamp(u0.dot(u1), -1.0, 1.0));
    Vec3 axis = u0.cross(u1);
    double an = axis.norm();
    if (an < 1e-14) {  // diametral chord: pick any axis orthogonal to the line
        Vec3 e1, e2;
        orthonormal_frame(v, e1, e2);
        axis = e1.cross(u0).norm() > 1e-6 ? e1 : e2;
        axis = axis - u0 * axis.dot(u0);
        an = axis.norm();
        ang = kPi;
    }
    axis = axis / an;
    for (int i = 0; i < arc_pts; ++i) {
        double th = ang * double(i) / arc_pts;
        Vec3 p = u0 * std::cos(th) + axis.cross(u0) * std::sin(th) +
                 axis * (axis.dot(u0) * (1 - std::cos(th)));
        curve.push_back(p * rho);
    }
    return curve;
}

std::vector<Vec3> circle_polyline(const Vec3& center, const Vec3& unit_normal, double radius,
                                  int n, int orientation) {
    Vec3 e1, e2;
    orthonormal_frame(unit_normal, e1, e2);
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i) {
        double th = 2 * kPi * i / n * orientation;
        pts.push_back(center + (e1 * std::cos(th) + e2 * std::sin(th)) * radius);
    }
    return pts;
}

std::complex<double> free_gaussian(const Vec3& x, double t, const Vec3& center, const Vec3& sigma,
                                   const Vec3& velocity, double mass) {
    using cd = std::complex<double>;
    const cd I{0, 1};
    cd val{1, 0};
    double sg[3] = {sigma.x, sigma.y, sigma.z};
    double xc[3] = {x.x - center.x - velocity.x * t, x.y - center.y - velocity.y * t,
                    x.z - center.z - velocity.z * t};
    for (int k = 0; k < 3; ++k) {
        cd alpha0 = sg[k] * sg[k];
        cd alpha = alpha0 + I * (t / (2 * mass));
        val *= std::sqrt(alpha0 / alpha) * std::exp(-xc[k] * xc[k] / (4.0 * alpha));
    }
    double vx = velocity.dot(x);
    double v2 = velocity.norm2();
    val *= std::exp(I * (mass * vx - 0.5 * mass * v2 * t));
    return val;
}

}  // namespace absim::oracles
