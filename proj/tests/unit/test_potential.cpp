#include <doctest.h>

#include <cmath>
#include <random>

#include "absim/potential.hpp"
#include "unit/oracles.hpp"

using namespace absim;

namespace {

constexpr double kPi = 3.14159265358979323846;
const UnitVec3 zhat{0, 0, 1};

MagnetAssembly single_torus(double a = 2.0, double r = 0.5, double R = 3.0) {
    MagnetAssembly m;
    TorusComponent t;
    t.center = {0, 0, 0};
    t.axis = UnitVec3{0, 0, 1};
    t.major_radius = a;
    t.minor_radius = r;
    m.components.push_back(t);
    m.enclosing_radius = R;
    return m;
}

PotentialField field_with(double phi, GaugeTag gauge = GaugeTag::SolidAngle) {
    return PotentialField(single_torus(), FluxAssignment{{phi}}, gauge);
}

// ring loop around the torus tube, linking the core circle `turns` times
std::vector<Vec3> tube_loop(const TorusComponent& t, double ring, int turns = 1, int n = 96) {
    Vec3 e1, e2;
    orthonormal_frame(t.axis, e1, e2);
    std::vector<Vec3> loop;
    for (int i = 0; i < n; ++i) {
        double s = double(i) / n;
        double th = -2 * kPi * turns * s;
        double rr = ring * (1.0 + 0.05 * std::cos(2 * kPi * s));  // keep revisits distinct
        Vec3 p = t.center + e1 * (t.major_radius + rr * std::cos(th)) +
                 Vec3(t.axis) * (rr * std::sin(th)) * double(t.orientation);
        loop.push_back(p);
    }
    return loop;
}

Vec3 fd_curl(const PotentialField& f, const Vec3& x, double h) {
    auto d = [&](int comp, int axis, double step) {
        Vec3 e{axis == 0 ? step : 0.0, axis == 1 ? step : 0.0, axis == 2 ? step : 0.0};
        Vec3 ap = f.eval_A(x + e), am = f.eval_A(x - e);
        double vp = comp == 0 ? ap.x : comp == 1 ? ap.y : ap.z;
        double vm = comp == 0 ? am.x : comp == 1 ? am.y : am.z;
        return (vp - vm) / (2 * step);
    };
    auto richardson = [&](int comp, int axis) {
        return (4.0 * d(comp, axis, h / 2) - d(comp, axis, h)) / 3.0;
    };
    return {richardson(2, 1) - richardson(1, 2), richardson(0, 2) - richardson(2, 0),
            richardson(1, 0) - richardson(0, 1)};
}

}  // namespace

TEST_CASE("eval_A on-axis closed form and flux linearity") {
    PotentialField f = field_with(2 * kPi);
    Vec3 a0 = f.eval_A({0, 0, 0});
    CHECK(std::abs(a0.norm() - kPi / 2) < 1e-6);  // phi/(2a) on the axis
    CHECK(std::abs(a0.x) < 1e-12);
    CHECK(std::abs(a0.y) < 1e-12);

    // closed form along the axis: (phi/4pi) * 2 pi a^2 / (z^2+a^2)^{3/2}
    for (double z : {0.7, 1.9, 4.2}) {
        double expect = (2 * kPi / (4 * kPi)) * 2 * kPi * 4.0 / std::pow(z * z + 4.0, 1.5);
        CHECK(f.eval_A({0, 0, z}).norm() == doctest::Approx(expect).epsilon(1e-9));
    }

    PotentialField zero = field_with(0.0);
    CHECK(zero.eval_A({1.3, -0.2, 0.7}).norm() == 0.0);

    // linear in the flux
    PotentialField f1 = field_with(0.7), f2 = field_with(1.8), f3 = field_with(2.5);
    Vec3 x{1.1, 0.4, -0.8};
    Vec3 sum = f1.eval_A(x) + f2.eval_A(x);
    CHECK((sum - f3.eval_A(x)).norm() < 1e-12);

    CHECK_THROWS_AS(f.eval_A({2, 0, 0}), SingularPoint);
}

TEST_CASE("eval_A far field decays like a dipole") {
    PotentialField f = field_with(1.0);
    UnitVec3 ray{0.3, 0.5, 0.81};
    double a20 = f.eval_A(Vec3(ray) * 20.0).norm();
    double a40 = f.eval_A(Vec3(ray) * 40.0).norm();
    CHECK(a20 / a40 == doctest::Approx(8.0).epsilon(0.10));

    // short-range class membership: |A| (1+|x|)^2 stays bounded along rays
    double bound = 0.0;
    for (double r : {5.0, 10.0, 20.0, 40.0, 80.0})
        bound = std::max(bound, f.eval_A(Vec3(ray) * r).norm() * (1 + r) * (1 + r));
    CHECK(bound < 1.0);
}

TEST_CASE("circulation reproduces the assigned flux and the linking law") {
    PotentialField f = field_with(1.0);
    const auto& torus = std::get<TorusComponent>(f.magnet().components[0]);

    CHECK(f.circulation(tube_loop(torus, 0.8)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f.circulation(tube_loop(torus, 0.8, 2, 192)) == doctest::Approx(2.0).epsilon(1e-6));

    // a contractible loop away from the holes
    std::vector<Vec3> trivial;
    for (int i = 0; i < 48; ++i) {
        double th = 2 * kPi * i / 48;
        trivial.push_back(Vec3{4.0 + 0.5 * std::cos(th), 0.5 * std::sin(th), 1.0});
    }
    CHECK(std::abs(f.circulation(trivial)) < 1e-6);

    std::vector<Vec3> touching;
    for (int i = 0; i < 16; ++i) {
        double th = 2 * kPi * i / 16;
        touching.push_back(Vec3{2.0 + 0.3 * std::cos(th), 0.0, 0.3 * std::sin(th)});
    }
    CHECK_THROWS_AS(f.circulation(touching), LoopIntersectsMagnet);
}

TEST_CASE("property: circulation equals linking-weighted flux on random loops") {
    MagnetAssembly m = single_torus();
    PotentialField f(m, FluxAssignment{{0.85}}, GaugeTag::SolidAngle);
    const auto& torus = std::get<TorusComponent>(m.components[0]);
    auto core = oracles::circle_polyline(torus.center, torus.axis, torus.major_radius, 384,
                                         torus.orientation);

    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int tested = 0;
    for (int it = 0; it < 150 && tested < 20; ++it) {
        // random tilted circular loop
        Vec3 c{2.0 * u(rng), 2.0 * u(rng), 1.5 * u(rng)};
        Vec3 n{u(rng), u(rng), u(rng)};
        if (n.norm() < 0.2) continue;
        double rad = 1.0 + 0.8 * std::abs(u(rng));
        auto loop = oracles::circle_polyline(c, Vec3(n) / n.norm(), rad, 192, +1);
        bool clear = true;
        for (const auto& p : loop)
            if (m.distance(p) < 0.2) clear = false;
        if (!clear) continue;
        double lk = oracles::gauss_linking(loop, core);
        long lk_int = std::lround(lk);
        if (std::abs(lk - lk_int) > 2e-2) continue;  // oracle discretization too coarse here
        double circ = f.circulation(loop);
        CHECK(circ == doctest::Approx(0.85 * lk_int).epsilon(1e-5).scale(1.0));
        ++tested;
    }
    CHECK(tested >= 15);
}

TEST_CASE("line_integral_L basics and full-line values") {
    PotentialField f = field_with(1.0);
    CHECK(f.line_integral_L({1.0, 0.5, -4.0}, zhat, 0.0) == 0.0);

    // full line through the hole picks up the full circulation
    Vec3 x{0.4, -0.3, 0.0};
    double full = f.line_integral_L(x, zhat, std::numeric_limits<double>::infinity()) -
                  f.line_integral_L(x, zhat, -std::numeric_limits<double>::infinity());
    CHECK(std::abs(full - 1.0) < 1e-5);

    Vec3 xo{2.8, 0.0, 0.0};  // outside the disk, misses the torus
    double full_out = f.line_integral_L(xo, zhat, std::numeric_limits<double>::infinity()) -
                      f.line_integral_L(xo, zhat, -std::numeric_limits<double>::infinity());
    CHECK(std::abs(full_out) < 1e-5);

    // additivity of finite pieces
    double a = f.line_integral_L(x, zhat, 2.0);
    double b = f.line_integral_L(x + Vec3{0, 0, 2.0}, zhat, 3.0);
    double c = f.line_integral_L(x, zhat, 5.0);
    CHECK(a + b == doctest::Approx(c).epsilon(1e-9));
}

TEST_CASE("flux_F_h") {
    PotentialField f = field_with(kPi / 2);
    CHECK(f.flux_F_h({+1}) == doctest::Approx(kPi / 2));
    CHECK(f.flux_F_h({0}) == 0.0);
    CHECK_THROWS_AS(f.flux_F_h({+2}), UnrealizedClass);
    CHECK_THROWS_AS(f.flux_F_h({+1, 0}), UnrealizedClass);

    // two-torus assembly with opposite orientations realizes [+1, -1]
    MagnetAssembly m;
    TorusComponent t1;
    t1.center = {0, 0, -1.2};
    t1.axis = UnitVec3{0, 0, 1};
    t1.major_radius = 2.0;
    t1.minor_radius = 0.4;
    TorusComponent t2 = t1;
    t2.center = {0, 0, 1.2};
    t2.orientation = -1;
    m.components = {t1, t2};
    m.enclosing_radius = 4.0;
    PotentialField f2(m, FluxAssignment{{1.0, 0.25}}, GaugeTag::SolidAngle);
    CHECK(f2.flux_F_h({+1, -1}) == doctest::Approx(0.75));

    // cross-check against the full-line integral on a representative line
    auto cls = classify_line({{0, 0, -10}, zhat}, m);
    REQUIRE(cls.signature == std::vector<int>{+1, -1});
    Vec3 x{0.2, 0.1, 0.0};
    double full = f2.line_integral_L(x, zhat, std::numeric_limits<double>::infinity()) -
                  f2.line_integral_L(x, zhat, -std::numeric_limits<double>::infinity());
    CHECK(full == doctest::Approx(0.75).epsilon(1e-5));
}

TEST_CASE("eval_V profiles") {
    MagnetAssembly m = single_torus();
    ElectricPotential none;
    PotentialField f0(m, FluxAssignment{{0.0}}, GaugeTag::SolidAngle, 2048, none);
    CHECK(f0.eval_V({1, 2, 3}) == 0.0);

    ElectricPotential ip;
    ip.profile = ElectricPotential::Profile::InversePower;
    ip.v0 = 1.0;
    ip.alpha = 2.0;
    PotentialField f1(m, FluxAssignment{{0.0}}, GaugeTag::SolidAngle, 2048, ip);
    CHECK(f1.eval_V({1, 0, 0}) == doctest::Approx(0.5));
    double ratio = f1.eval_V({10, 0, 0}) / f1.eval_V({5, 0, 0});
    CHECK(ratio == doctest::Approx(26.0 / 101.0).epsilon(1e-3));

    ElectricPotential ind;
    ind.profile = ElectricPotential::Profile::MagnetIndicator;
    ind.v0 = 7.0;
    PotentialField f2(m, FluxAssignment{{0.0}}, GaugeTag::SolidAngle, 2048, ind);
    CHECK(f2.eval_V({2, 0, 0}) == 7.0);
    CHECK(f2.eval_V({0, 0, 0}) == 0.0);

    ElectricPotential bad = ip;
    bad.alpha = 0.5;
    CHECK_THROWS_AS(PotentialField(m, FluxAssignment{{0.0}}, GaugeTag::SolidAngle, 2048, bad),
                    std::invalid_argument);
}

TEST_CASE("property: the field is curl-free away from the magnet") {
    for (GaugeTag gauge : {GaugeTag::SolidAngle, GaugeTag::Compactified}) {
        PotentialField f = field_with(1.3, gauge);
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> u(-4.5, 4.5);
        double max_a = 0.0, max_curl = 0.0;
        int used = 0;
        while (used < 1000) {
            Vec3 x{u(rng), u(rng), u(rng)};
            if (f.magnet().distance(x) < 0.5) continue;
            max_a = std::max(max_a, f.eval_A(x).norm());
            max_curl = std::max(max_curl, fd_curl(f, x, 1e-3).norm());
            ++used;
        }
        CAPTURE(int(gauge));
        CHECK(max_curl < 1e-6 * max_a);
    }
}

TEST_CASE("compactified gauge: support, preserved circulations, zero case") {
    PotentialField base = field_with(1.0);
    PotentialField compact = base.compactify();

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        Vec3 d{u(rng), u(rng), u(rng)};
        if (d.norm() < 0.1) continue;
        Vec3 x = d / d.norm() * (3.3 + 2.0 * std::abs(u(rng)));
        CHECK(compact.eval_A(x).norm() <= 1e-10);
    }

    const auto& torus = std::get<TorusComponent>(base.magnet().components[0]);
    double c0 = base.circulation(tube_loop(torus, 0.8));
    double c1 = compact.circulation(tube_loop(torus, 0.8));
    CHECK(c0 == doctest::Approx(c1).epsilon(1e-6));

    PotentialField zero = field_with(0.0).compactify();
    CHECK(zero.eval_A({1.2, 0.3, 0.4}).norm() == 0.0);

    CHECK_THROWS_AS(compact.compactify(), std::invalid_argument);
}

TEST_CASE("gauge relation: outside the ball the exterior scalar generates A") {
    PotentialField f = field_with(1.1);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        Vec3 d{u(rng), u(rng), u(rng)};
        if (d.norm() < 0.1) continue;
        Vec3 x = d / d.norm() * (3.5 + std::abs(u(rng)));
        const double h = 1e-5;
        Vec3 grad{
            (f.lambda_exterior(x + Vec3{h, 0, 0}) - f.lambda_exterior(x - Vec3{h, 0, 0})) / (2 * h),
            (f.lambda_exterior(x + Vec3{0, h, 0}) - f.lambda_exterior(x - Vec3{0, h, 0})) / (2 * h),
            (f.lambda_exterior(x + Vec3{0, 0, h}) - f.lambda_exterior(x - Vec3{0, 0, h})) / (2 * h)};
        Vec3 a = f.eval_A(x);
        CHECK((grad - a).norm() < 1e-6 * std::max(1.0, a.norm()));
    }
}

TEST_CASE("gauge function: base value, gradient, plateau and path independence") {
    const LineClassification hole{LineClass::Hole, {+1}};
    const LineClassification out{LineClass::Out, {0}};

    for (GaugeTag gauge : {GaugeTag::SolidAngle, GaugeTag::Compactified}) {
        CAPTURE(int(gauge));
        PotentialField f = field_with(kPi / 2, gauge);
        Vec3 x0 = f.gauge_base_point(zhat);
        CHECK(std::abs(f.gauge_lambda(hole, zhat, x0)) < 1e-12);

        // gradient equals A by central differences (step 1e-4, relative 1e-3)
        std::vector<Vec3> pts{{0.2, 0.1, -0.8}, {0.5, -0.4, 0.9}, {1.2, 1.1, -1.1},
                              {0.0, -4.0, -1.0}, {1.0, 3.6, 2.0}};
        for (const Vec3& x : pts) {
            LineClassification cls = classify_line({x, zhat}, f.magnet());
            if (cls.is_hit()) continue;
            const double h = 1e-4;
            auto lam = [&](const Vec3& y) { return f.gauge_lambda(cls, zhat, y); };
            Vec3 grad{(lam(x + Vec3{h, 0, 0}) - lam(x - Vec3{h, 0, 0})) / (2 * h),
                      (lam(x + Vec3{0, h, 0}) - lam(x - Vec3{0, h, 0})) / (2 * h),
                      (lam(x + Vec3{0, 0, h}) - lam(x - Vec3{0, 0, h})) / (2 * h)};
            Vec3 a = f.eval_A(x);
            CAPTURE(x.x);
            CAPTURE(x.y);
            CAPTURE(x.z);
            CHECK((grad - a).norm() <= 1e-3 * std::max(0.3, a.norm()));
        }

        // the canonical-path quadrature is an independent route to the same value
        std::vector<std::pair<Vec3, const LineClassification*>> cases{
            {{1.0, -2.0, -5.0}, &hole},  // upstream exterior
            {{0.3, 0.2, 0.4}, &hole},    // through-hole interior
            {{2.7, 0.0, 0.8}, &out},     // in-ball out segment
            {{1.5, 1.0, 4.5}, &hole},    // downstream exterior
            {{1.5, 1.0, 4.5}, &out},
            {{4.0, 0.5, 0.0}, &out},     // transverse plane outside the ball
        };
        for (const auto& [x, cls] : cases) {
            double fast = f.gauge_lambda(*cls, zhat, x);
            double path = f.gauge_lambda(*cls, zhat, x, true);
            CAPTURE(x.x);
            CAPTURE(x.z);
            CHECK(std::abs(fast - path) < 1e-5);
        }
    }

    // compactified gauge: constant plateau F_h behind the magnet, zero ahead
    PotentialField fc = field_with(kPi / 2, GaugeTag::Compactified);
    for (const Vec3& x : {Vec3{0, 0, 4.0}, Vec3{2.5, 1.0, 3.0}, Vec3{-1.0, 2.0, 5.5}}) {
        CHECK(std::abs(fc.gauge_lambda(hole, zhat, x) - kPi / 2) < 1e-5);
        CHECK(std::abs(fc.gauge_lambda(out, zhat, x)) < 1e-5);
    }
    for (const Vec3& x : {Vec3{0, 0, -4.0}, Vec3{2.5, 1.0, -3.0}})
        CHECK(std::abs(fc.gauge_lambda(hole, zhat, x)) < 1e-5);

    CHECK_THROWS_AS(fc.gauge_lambda(hole, zhat, Vec3{4.0, 0.5, 0.0}), OutsideDomain);
}
