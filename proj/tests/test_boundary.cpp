#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "curvatura/boundary.hpp"
#include "curvatura/catalog.hpp"
#include "curvatura/connection.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace curvatura::boundary;
using curvatura::catalog::make_surface;
using curvatura::connection::connection_form;
using curvatura::expr::Field;
using curvatura::geometry::coordinate_frame;

namespace {

const double kPi = 3.14159265358979323846;

Field uv(const char* src) { return Field::parse(src, {"u", "v"}); }

MetricPatch euclidean_patch() {
    MetricPatch m;
    m.chart = {-5, 5, -5, 5};
    m.E = uv("1");
    m.F = uv("0");
    m.G = uv("1");
    return m;
}

struct Setup {
    MetricPatch metric;
    Frame frame;
    OneForm omega;
};

Setup setup_with_omega(const MetricPatch& m) {
    Setup s{m, coordinate_frame(m), {}};
    s.omega = connection_form(s.metric, s.frame);
    return s;
}

}  // namespace

TEST_CASE("segment jets and endpoints") {
    const SegmentPtr line = line_segment({0, 0}, {3, 4});
    CHECK(line->at(0).u.f == 0);
    CHECK(line->at(1).u.f == 3);
    CHECK(line->at(0.5).v.f == doctest::Approx(2).epsilon(1e-15));
    CHECK(line->at(0.25).u.d == doctest::Approx(3).epsilon(1e-15));  // constant velocity
    CHECK(line->at(0.25).u.d2 == doctest::Approx(0).epsilon(1e-15));

    const SegmentPtr expr = expression_segment("t^2", "1 - t");
    CHECK(expr->at(0.5).u.f == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(expr->at(0.5).u.d == doctest::Approx(1).epsilon(1e-15));
    CHECK(expr->at(0.5).u.d2 == doctest::Approx(2).epsilon(1e-15));
    CHECK(expr->at(0.5).v.d == doctest::Approx(-1).epsilon(1e-15));

    const SegmentPtr back = reversed(expr);
    CHECK(back->at(0).u.f == doctest::Approx(1).epsilon(1e-15));
    CHECK(back->at(1).u.f == doctest::Approx(0).epsilon(1e-15));
    CHECK(back->at(0.25).u.d == doctest::Approx(-expr->at(0.75).u.d).epsilon(1e-15));

    const SegmentPtr arc = arc_segment({1, 1}, 2, 0, kPi / 2);
    CHECK(arc->at(0).u.f == doctest::Approx(3).epsilon(1e-14));
    CHECK(arc->at(1).u.f == doctest::Approx(1).epsilon(1e-14));
    CHECK(arc->at(1).v.f == doctest::Approx(3).epsilon(1e-14));
}

TEST_CASE("great-circle arcs are sphere geodesics") {
    // Equator quarter: from (pi/2, 0.2) to (pi/2, 1.2) stays on the equator.
    const SegmentPtr eq = great_circle_arc({kPi / 2, 0.2}, {kPi / 2, 1.2});
    CHECK(eq->at(0).v.f == doctest::Approx(0.2).epsilon(1e-13));
    CHECK(eq->at(1).v.f == doctest::Approx(1.2).epsilon(1e-13));
    for (double t : {0.0, 0.3, 0.5, 0.9}) {
        CHECK(eq->at(t).u.f == doctest::Approx(kPi / 2).epsilon(1e-12));
    }

    // A meridian piece: constant v.
    const SegmentPtr mer = great_circle_arc({0.4, 1.0}, {1.3, 1.0});
    for (double t : {0.0, 0.25, 0.75, 1.0}) {
        CHECK(mer->at(t).v.f == doctest::Approx(1.0).epsilon(1e-12));
    }

    // Pointwise geodesic curvature vanishes along a generic arc.
    const Setup s = setup_with_omega(make_surface("sphere").metric);
    PiecewiseCurve c;
    c.segments = {great_circle_arc({1.1, 0.4}, {0.8, 1.7})};
    const ArcLengthCurve alc(s.metric, c);
    for (double frac : {0.1, 0.35, 0.6, 0.9}) {
        CHECK(std::abs(geodesic_curvature(alc, s.metric, s.frame, s.omega,
                                          frac * alc.length())) < 1e-9);
    }

    CHECK_THROWS_AS((void)great_circle_arc({1.0, 1.0}, {1.0, 1.0}), CurveError);
    CHECK_THROWS_AS((void)great_circle_arc({1.0, 1.0}, {kPi - 1.0, 1.0 + kPi}), CurveError);
}

TEST_CASE("arc length of straight and curved pieces") {
    const MetricPatch plane = euclidean_patch();

    PiecewiseCurve seg;
    seg.segments = {line_segment({0, 0}, {3, 4})};
    CHECK(arc_length(plane, seg) == doctest::Approx(5).epsilon(1e-12));

    CHECK(arc_length(plane, circle(0, 0, 2)) == doctest::Approx(4 * kPi).epsilon(1e-12));

    // Latitude length on the unit sphere: 2 pi sin(theta0).
    const MetricPatch sphere = make_surface("sphere").metric;
    for (double theta0 : {kPi / 6, kPi / 3, 1.2}) {
        CHECK(arc_length(sphere, latitude(theta0)) ==
              doctest::Approx(2 * kPi * std::sin(theta0)).epsilon(1e-12));
    }

    // Midpoint-rule oracle on a generic expression segment.
    const MetricPatch bumpy = make_surface("bumpy_sphere").metric;
    PiecewiseCurve wavy;
    wavy.segments = {expression_segment("1.2 + 0.3*sin(2*pi*t)", "0.5 + t")};
    auto speed_at = [&](double t) { return speed(bumpy, wavy.at(t)); };
    CHECK(arc_length(bumpy, wavy) ==
          doctest::Approx(oracles::riemann(speed_at, 0, 1, 40000)).epsilon(1e-8));
}

TEST_CASE("arc-length reparametrization") {
    const MetricPatch plane = euclidean_patch();
    const ArcLengthCurve alc(plane, circle(1, -1, 2));
    CHECK(alc.length() == doctest::Approx(4 * kPi).epsilon(1e-12));

    // Unit metric speed everywhere, and the quarter point sits a quarter
    // of the way around.
    for (double s : {0.0, 1.0, kPi, 2 * kPi, 11.0}) {
        const SegJet j = alc.at(s);
        CHECK(speed(plane, j) == doctest::Approx(1).epsilon(1e-10));
    }
    const SegJet quarter = alc.at(kPi);  // quarter of 4 pi
    CHECK(quarter.u.f == doctest::Approx(1).epsilon(1e-10));
    CHECK(quarter.v.f == doctest::Approx(1).epsilon(1e-10));

    // parameter_at inverts the length profile.
    for (double s : {0.3, 2.0, 7.7, 12.0}) {
        const double t = alc.parameter_at(s);
        PiecewiseCurve c = alc.curve();
        // Length up to t equals s: integrate speed with the oracle.
        auto sp = [&](double x) { return speed(plane, c.at(x)); };
        CHECK(oracles::riemann(sp, 0, t, 20000) == doctest::Approx(s).epsilon(1e-6));
    }

    // On the sphere too: the latitude parametrized by arc length.
    const MetricPatch sphere = make_surface("sphere").metric;
    const ArcLengthCurve lat(sphere, latitude(kPi / 3));
    CHECK(lat.length() == doctest::Approx(2 * kPi * std::sin(kPi / 3)).epsilon(1e-12));
    CHECK(speed(sphere, lat.at(1.0)) == doctest::Approx(1).epsilon(1e-10));
}

TEST_CASE("geodesic curvature of plane circles is 1/R") {
    const Setup s = setup_with_omega(euclidean_patch());
    for (double r : {0.5, 1.0, 2.0}) {
        const ArcLengthCurve alc(s.metric, circle(0, 0, r));
        for (double frac : {0.1, 0.4, 0.8}) {
            CHECK(geodesic_curvature(alc, s.metric, s.frame, s.omega, frac * alc.length()) ==
                  doctest::Approx(1 / r).epsilon(1e-10));
        }
    }
    // Clockwise orientation flips the sign.
    const ArcLengthCurve cw(s.metric, reversed(circle(0, 0, 2)));
    CHECK(geodesic_curvature(cw, s.metric, s.frame, s.omega, 1.0) ==
          doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("geodesic curvature of sphere latitudes is cot(theta0)") {
    const Setup s = setup_with_omega(make_surface("sphere").metric);
    for (double theta0 : {kPi / 6, kPi / 3, kPi / 2, 2.0}) {
        const ArcLengthCurve alc(s.metric, latitude(theta0));
        for (double frac : {0.2, 0.7}) {
            CHECK(geodesic_curvature(alc, s.metric, s.frame, s.omega, frac * alc.length()) ==
                  doctest::Approx(std::cos(theta0) / std::sin(theta0)).epsilon(1e-10));
        }
    }
}

TEST_CASE("geodesic curvature matches the embedded-space oracle") {
    // |k_g| from projecting the ambient acceleration of the embedded curve.
    const auto entry = make_surface("sphere");
    const Setup s = setup_with_omega(entry.metric);
    const double theta0 = kPi / 3;
    const ArcLengthCurve alc(s.metric, latitude(theta0));
    const double circumference = alc.length();
    auto gamma = [&](double sarc) {
        const SegJet j = alc.at(sarc);
        return curvatura::geometry::Vec2{j.u.f, j.v.f};
    };
    for (double frac : {0.2, 0.5, 0.8}) {
        const double sarc = frac * circumference;
        const double lib = geodesic_curvature(alc, s.metric, s.frame, s.omega, sarc);
        const double oracle =
            oracles::extrinsic_geodesic_curvature(*entry.embedding, gamma, sarc);
        CHECK(std::abs(std::abs(lib) - std::abs(oracle)) < 1e-4);
    }
}

TEST_CASE("geodesic curvature integrals") {
    const Setup plane = setup_with_omega(euclidean_patch());
    CHECK(geodesic_curvature_integral(plane.metric, plane.frame, plane.omega, circle(0, 0, 2)) ==
          doctest::Approx(2 * kPi).epsilon(1e-12));
    CHECK(geodesic_curvature_integral(plane.metric, plane.frame, plane.omega,
                                      reversed(circle(0, 0, 2))) ==
          doctest::Approx(-2 * kPi).epsilon(1e-12));

    const Setup sphere = setup_with_omega(make_surface("sphere").metric);
    for (double theta0 : {kPi / 6, kPi / 3}) {
        CHECK(geodesic_curvature_integral(sphere.metric, sphere.frame, sphere.omega,
                                          latitude(theta0)) ==
              doctest::Approx(2 * kPi * std::cos(theta0)).epsilon(1e-11));
    }
    // The equator is a geodesic.
    CHECK(std::abs(geodesic_curvature_integral(sphere.metric, sphere.frame, sphere.omega,
                                               latitude(kPi / 2))) < 1e-12);
}

TEST_CASE("exterior angles of polygons") {
    const MetricPatch plane = euclidean_patch();

    const auto square = polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto angles = exterior_angles(square, plane);
    REQUIRE(angles.size() == 4);
    for (double b : angles) CHECK(b == doctest::Approx(kPi / 2).epsilon(1e-13));

    // Clockwise: all corners turn right.
    const auto cw_angles = exterior_angles(reversed(square), plane);
    for (double b : cw_angles) CHECK(b == doctest::Approx(-kPi / 2).epsilon(1e-13));

    // Regular M-gons: each exterior angle is 2 pi / M.
    for (int mgon = 3; mgon <= 8; ++mgon) {
        std::vector<curvatura::geometry::Vec2> verts;
        for (int i = 0; i < mgon; ++i) {
            verts.push_back({std::cos(2 * kPi * i / mgon), std::sin(2 * kPi * i / mgon)});
        }
        const auto mangles = exterior_angles(polygon(verts), plane);
        REQUIRE(mangles.size() == static_cast<size_t>(mgon));
        double sum = 0;
        for (double b : mangles) {
            CHECK(b == doctest::Approx(2 * kPi / mgon).epsilon(1e-12));
            sum += kPi - b;  // interior angle
        }
        CHECK(sum == doctest::Approx((mgon - 2) * kPi).epsilon(1e-12));
    }

    // Metric angles: a meridian meets a latitude at a right angle.
    const MetricPatch sphere = make_surface("sphere").metric;
    PiecewiseCurve corner;
    corner.segments = {expression_segment("1.0 + 0.4*t", "0.5 + 0*t"),
                       expression_segment("1.4 + 0*t", "0.5 + 0.6*t")};
    corner.closed = false;
    const auto right = exterior_angles(corner, sphere);
    REQUIRE(right.size() == 1);
    CHECK(std::abs(right[0]) == doctest::Approx(kPi / 2).epsilon(1e-12));

    // A cusp (reversal) has no well-defined turn.
    PiecewiseCurve cusp;
    cusp.segments = {line_segment({0, 0}, {1, 0}), line_segment({1, 0}, {0, 0})};
    cusp.closed = true;
    CHECK_THROWS_AS((void)exterior_angles(cusp, plane), CurveError);
}

TEST_CASE("turning angle of closed plane curves") {
    // Smooth circle: exactly one turn.
    CHECK(turning_angle(circle(0, 0, 1)).lift == doctest::Approx(2 * kPi).epsilon(1e-12));
    CHECK(turning_angle(reversed(circle(0, 0, 1))).lift ==
          doctest::Approx(-2 * kPi).epsilon(1e-12));

    // Ellipse as a single smooth segment.
    PiecewiseCurve ellipse;
    ellipse.segments = {expression_segment("2*cos(2*pi*t)", "sin(2*pi*t)")};
    ellipse.closed = true;
    CHECK(turning_angle(ellipse).lift == doctest::Approx(2 * kPi).epsilon(1e-10));

    // Polygons: smooth parts contribute nothing, corners sum to 2 pi.
    for (int mgon : {3, 4, 6}) {
        std::vector<curvatura::geometry::Vec2> verts;
        for (int i = 0; i < mgon; ++i) {
            verts.push_back({std::cos(2 * kPi * i / mgon), std::sin(2 * kPi * i / mgon)});
        }
        CHECK(turning_angle(polygon(verts)).lift == doctest::Approx(2 * kPi).epsilon(1e-12));
    }

    // A figure-drawn curve with winding number 2.
    PiecewiseCurve doubled;
    doubled.segments = {expression_segment("cos(4*pi*t)", "sin(4*pi*t)")};
    doubled.closed = true;
    CHECK(turning_angle(doubled).lift == doctest::Approx(4 * kPi).epsilon(1e-10));
}

TEST_CASE("tangent lift deltas") {
    const MetricPatch plane = euclidean_patch();
    const Frame f = coordinate_frame(plane);
    // Upper half circle: the tangent turns by pi.
    const SegmentPtr half = arc_segment({0, 0}, 1, 0, kPi);
    CHECK(tangent_lift_delta(plane, f, half) == doctest::Approx(kPi).epsilon(1e-10));
    const SegmentPtr full = expression_segment("cos(2*pi*t)", "sin(2*pi*t)");
    CHECK(tangent_lift_delta(plane, f, full) == doctest::Approx(2 * kPi).epsilon(1e-10));
}

TEST_CASE("validate_curve catches broken curves") {
    const MetricPatch plane = euclidean_patch();
    const MetricPatch sphere = make_surface("sphere").metric;

    // A healthy closed loop passes.
    CHECK_NOTHROW(validate_curve(plane, circle(0, 0, 2)));
    CHECK_NOTHROW(validate_curve(sphere, latitude(kPi / 3)));

    // Segments that do not join.
    PiecewiseCurve gap;
    gap.segments = {line_segment({0, 0}, {1, 0}), line_segment({1.5, 0}, {0, 0})};
    gap.closed = true;
    CHECK_THROWS_AS(validate_curve(plane, gap), CurveError);

    // Claimed-closed loop whose ends do not meet.
    PiecewiseCurve open_loop;
    open_loop.segments = {line_segment({0, 0}, {1, 0})};
    open_loop.closed = true;
    CHECK_THROWS_AS(validate_curve(plane, open_loop), CurveError);

    // Vanishing velocity.
    PiecewiseCurve still;
    still.segments = {expression_segment("0.5 + 0*t", "0.5 + 0*t")};
    CHECK_THROWS_AS(validate_curve(plane, still), CurveError);

    // Too close to the singular pole line of the sphere chart.
    CHECK_THROWS_AS(validate_curve(sphere, latitude(0.0005)), CurveError);

    // Leaving the chart rectangle.
    CHECK_THROWS_AS(validate_curve(plane, circle(4.5, 0, 2)), CurveError);

    // The periodic seam is fine: the latitude ends where it began.
    CHECK_NOTHROW(validate_curve(sphere, latitude(1.0)));
}

TEST_CASE("scanline support: monotone pieces and level crossings") {
    // v(t) = sin(2 pi t) on the unit circle: extrema at t = 1/4, 3/4.
    const auto seg = circle(0, 0, 1).segments[0];
    const auto breaks = monotone_v_breaks(seg);
    REQUIRE(breaks.size() == 4);
    CHECK(breaks[0] == 0);
    CHECK(breaks[1] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(breaks[2] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(breaks[3] == 1);

    // Level v = 0 crosses once in the open interval, descending at u = -1.
    const auto mid = crossings_at_level(seg, breaks, 0.0);
    REQUIRE(mid.size() == 1);
    CHECK(mid[0].t == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(mid[0].u == doctest::Approx(-1).epsilon(1e-10));
    CHECK(mid[0].sign == -1);

    // Level v = 0.5 crosses twice: rising on the right, falling on the left.
    const auto half = crossings_at_level(seg, breaks, 0.5);
    REQUIRE(half.size() == 2);
    const int rising = half[0].sign == 1 ? 0 : 1;
    CHECK(half[rising].u == doctest::Approx(std::sqrt(0.75)).epsilon(1e-9));
    CHECK(half[1 - rising].u == doctest::Approx(-std::sqrt(0.75)).epsilon(1e-9));

    // Level above the circle: no crossings.
    CHECK(crossings_at_level(seg, breaks, 1.5).empty());
}
