#include <doctest.h>

#include <cmath>
#include <random>

#include "absim/geometry.hpp"
#include "unit/oracles.hpp"

using namespace absim;

namespace {

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

const UnitVec3 zhat{0, 0, 1};

}  // namespace

TEST_CASE("classify_line: threading, outside, hitting") {
    MagnetAssembly m = single_torus();
    m.validate();

    auto hole = classify_line({{0, 0, -10}, zhat}, m);
    CHECK(hole.is_hole());
    CHECK(hole.signature == std::vector<int>{+1});

    auto out = classify_line({{10, 0, -10}, zhat}, m);
    CHECK(out.is_out());
    CHECK(out.signature == std::vector<int>{0});

    auto hit = classify_line({{2, 0, -10}, zhat}, m);
    CHECK(hit.is_hit());

    CHECK_THROWS_AS(classify_line({{std::nan(""), 0, 0}, zhat}, m), std::invalid_argument);
}

TEST_CASE("classify_line agrees with the Gauss linking integral") {
    MagnetAssembly m = single_torus();
    auto core = oracles::circle_polyline({0, 0, 0}, {0, 0, 1}, 2.0, 512, +1);

    // threading line, aligned orientation: linking +1 from the double integral
    OrientedLine thread{{0.3, -0.2, -7}, zhat};
    auto closed = oracles::close_line_through_ball(thread, 6.0, 512, 512);
    double lk = oracles::gauss_linking(closed, core);
    CHECK(lk == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(linking_number(thread, std::get<TorusComponent>(m.components[0])) == 1);

    // reversed direction flips the sign
    OrientedLine rev{{0.3, -0.2, 7}, UnitVec3{0, 0, -1}};
    auto closed_rev = oracles::close_line_through_ball(rev, 6.0, 512, 512);
    CHECK(oracles::gauss_linking(closed_rev, core) == doctest::Approx(-1.0).epsilon(1e-3));
    CHECK(linking_number(rev, std::get<TorusComponent>(m.components[0])) == -1);

    // line outside the enclosing ball: no linking
    OrientedLine far{{10, 0, -10}, zhat};
    CHECK(linking_number(far, std::get<TorusComponent>(m.components[0])) == 0);
}

TEST_CASE("linking degenerate tangency is reported") {
    MagnetAssembly m = single_torus();
    OrientedLine in_plane{{0, -10, 0}, UnitVec3{0, 1, 0}};
    CHECK_THROWS_AS(disk_crossing(in_plane, std::get<TorusComponent>(m.components[0])), Degenerate);
}

TEST_CASE("same_class") {
    MagnetAssembly m = single_torus();
    OrientedLine a{{0, 0, -10}, zhat};
    OrientedLine b{{0.1, 0, -10}, zhat};
    CHECK(same_class(a, b, m));

    OrientedLine rev{{0, 0, 10}, UnitVec3{0, 0, -1}};
    CHECK_FALSE(same_class(a, rev, m));

    OrientedLine out{{10, 0, -10}, zhat};
    CHECK_FALSE(same_class(a, out, m));  // [+1] vs [0]

    OrientedLine hit{{2, 0, -10}, zhat};
    CHECK_THROWS_AS(same_class(a, hit, m), ClassMismatch);
}

TEST_CASE("in_region_C membership") {
    MagnetAssembly m = single_torus();
    LineClassification hole{LineClass::Hole, {+1}};
    LineClassification out{LineClass::Out, {0}};

    // far upstream is in every hole domain
    CHECK(in_region_C({0, 0, -5}, hole, zhat, m));
    CHECK(in_region_C({4, 1, -5}, hole, zhat, m));
    // the transverse plane outside the ball is excluded from hole domains...
    CHECK_FALSE(in_region_C({5, 0, 0}, hole, zhat, m));
    // ...but included in the out domain
    CHECK(in_region_C({5, 0, 0}, out, zhat, m));
    // inside the ball membership follows the line class
    CHECK(in_region_C({0, 0, 0.5}, hole, zhat, m));
    CHECK_FALSE(in_region_C({0, 0, 0.5}, out, zhat, m));
    CHECK_FALSE(in_region_C({2.7, 0, 0.5}, hole, zhat, m));
    CHECK(in_region_C({2.7, 0, 0.5}, out, zhat, m));
    // points on or in the magnet belong to no transit domain
    CHECK_FALSE(in_region_C({2, 0, 0}, hole, zhat, m));
    CHECK_FALSE(in_region_C({2, 0, 0}, out, zhat, m));
}

TEST_CASE("property: classification is invariant along the line and stable nearby") {
    MagnetAssembly m = single_torus();
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> pos(-6.0, 6.0), dir(-1.0, 1.0), tau(-30.0, 30.0);

    int checked = 0;
    for (int it = 0; it < 500; ++it) {
        Vec3 base{pos(rng), pos(rng), pos(rng)};
        Vec3 d{dir(rng), dir(rng), dir(rng)};
        if (d.norm() < 1e-3) continue;
        OrientedLine line{base, UnitVec3{d}};
        LineClassification cls;
        try {
            cls = classify_line(line, m);
        } catch (const Degenerate&) {
            continue;
        }
        // shift invariance along the direction
        for (int s = 0; s < 3; ++s) {
            OrientedLine shifted{line.at(tau(rng)), line.direction};
            auto c2 = classify_line(shifted, m);
            CHECK(c2.kind == cls.kind);
            CHECK(c2.signature == cls.signature);
        }
        // local stability for non-grazing lines
        if (!cls.is_hit()) {
            double clearance = line_circle_distance(line, {0, 0, 0}, {0, 0, 1}, 2.0) - 0.5;
            double eps = 0.05 * std::abs(clearance);
            if (eps > 1e-6) {
                OrientedLine nudged{base + Vec3{eps, -eps, eps * 0.5}, line.direction};
                auto c3 = classify_line(nudged, m);
                CHECK(c3.kind == cls.kind);
            }
        }
        ++checked;
    }
    CHECK(checked > 400);
}

TEST_CASE("property: enlarging R and adding a missed ball never changes classes") {
    MagnetAssembly m = single_torus();
    MagnetAssembly big = single_torus(2.0, 0.5, 5.0);
    MagnetAssembly with_ball = single_torus();
    BallComponent b;
    b.center = {0, 1.8, 1.5};
    b.radius = 0.3;
    with_ball.components.push_back(b);
    with_ball.validate();

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(-4.0, 4.0), dir(-1.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        Vec3 base{pos(rng), pos(rng), -10};
        Vec3 d{0.05 * dir(rng), 0.05 * dir(rng), 1.0};
        OrientedLine line{base, UnitVec3{d}};
        LineClassification c1, c2, c3;
        try {
            c1 = classify_line(line, m);
            c2 = classify_line(line, big);
        } catch (const Degenerate&) {
            continue;
        }
        CHECK(c1.kind == c2.kind);
        CHECK(c1.signature == c2.signature);
        try {
            c3 = classify_line(line, with_ball);
        } catch (const Degenerate&) {
            continue;
        }
        if (!c3.is_hit()) {
            CHECK(c1.kind == c3.kind);
            CHECK(c1.signature == c3.signature);
        }
    }
}

TEST_CASE("property: realized transit domains cover the ball slice disjointly") {
    MagnetAssembly m = single_torus();
    LineClassification hole{LineClass::Hole, {+1}};
    LineClassification out{LineClass::Out, {0}};

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    int counted = 0;
    for (int it = 0; it < 2000; ++it) {
        Vec3 x{pos(rng), pos(rng), pos(rng)};
        if (x.norm() > 3.0 || m.contains(x)) continue;
        auto cls = classify_line({x, zhat}, m);
        if (cls.is_hit()) continue;  // not part of any transit domain
        int members = int(in_region_C(x, hole, zhat, m)) + int(in_region_C(x, out, zhat, m));
        CHECK(members == 1);
        ++counted;
    }
    CHECK(counted > 500);
}

TEST_CASE("two-torus signatures and representative search") {
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
    m.validate();

    auto cls = classify_line({{0, 0, -10}, zhat}, m);
    CHECK(cls.is_hole());
    CHECK(cls.signature == std::vector<int>{+1, -1});

    auto rep = representative_line(cls, zhat, m);
    CHECK(classify_line(rep, m).signature == cls.signature);

    LineClassification impossible{LineClass::Hole, {+2, 0}};
    CHECK_THROWS_AS(representative_line(impossible, zhat, m), UnrealizedClass);
}

TEST_CASE("magnet validation catches overlaps and out-of-ball components") {
    MagnetAssembly m = single_torus();
    BallComponent inside_hole;
    inside_hole.center = {0, 0, 0};
    inside_hole.radius = 0.4;
    m.components.push_back(inside_hole);
    CHECK_NOTHROW(m.validate());

    MagnetAssembly clash = single_torus();
    BallComponent overlapping;
    overlapping.center = {2.0, 0, 0};
    overlapping.radius = 0.8;
    clash.components.push_back(overlapping);
    CHECK_THROWS_AS(clash.validate(), std::invalid_argument);

    MagnetAssembly escape = single_torus(2.0, 0.5, 2.2);
    CHECK_THROWS_AS(escape.validate(), std::invalid_argument);
}
