#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "curvatura/boundary.hpp"
#include "curvatura/catalog.hpp"
#include "curvatura/connection.hpp"
#include "curvatura/transport.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace curvatura::transport;
using curvatura::RotationAngle;
using curvatura::boundary::circle;
using curvatura::boundary::expression_segment;
using curvatura::boundary::latitude;
using curvatura::boundary::line_segment;
using curvatura::catalog::make_surface;
using curvatura::connection::connection_form;
using curvatura::expr::Field;
using curvatura::geometry::basis_u;
using curvatura::geometry::basis_v;
using curvatura::geometry::coordinate_frame;

namespace {

const double kPi = 3.14159265358979323846;

Field uv(const char* src) { return Field::parse(src, {"u", "v"}); }

struct Setup {
    MetricPatch metric;
    Frame frame;
    OneForm omega;
};

Setup setup(const char* name) {
    Setup s;
    s.metric = make_surface(name).metric;
    s.frame = coordinate_frame(s.metric);
    s.omega = connection_form(s.metric, s.frame);
    return s;
}

MetricPatch euclidean_patch() {
    MetricPatch m;
    m.chart = {-5, 5, -5, 5};
    m.E = uv("1");
    m.F = uv("0");
    m.G = uv("1");
    return m;
}

}  // namespace

TEST_CASE("transport maps compose as rotations") {
    const TransportMap a = TransportMap::from_angle(0.7);
    const TransportMap b = TransportMap::from_angle(-0.2);
    const TransportMap c = compose(a, b);
    CHECK(c.angle.lift == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c.matrix[0][0] == doctest::Approx(std::cos(0.5)).epsilon(1e-14));
    CHECK(c.matrix[1][0] == doctest::Approx(std::sin(0.5)).epsilon(1e-14));

    // Applying rotates components by the lift.
    const Vec2 r = a.apply({1, 0});
    CHECK(r[0] == doctest::Approx(std::cos(0.7)).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(std::sin(0.7)).epsilon(1e-14));

    // Inverse undoes, identity does nothing.
    const TransportMap ai = compose(inverse(a), a);
    CHECK(ai.angle.lift == doctest::Approx(0).epsilon(1e-14));
    const Vec2 keep = TransportMap::identity().apply({0.3, -0.4});
    CHECK(keep[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(keep[1] == doctest::Approx(-0.4).epsilon(1e-15));

    // Lifts add beyond one turn instead of wrapping.
    const TransportMap big = compose(TransportMap::from_angle(5.0), TransportMap::from_angle(4.0));
    CHECK(big.angle.lift == doctest::Approx(9.0).epsilon(1e-13));
    CHECK(big.angle.mod_two_pi() == doctest::Approx(9.0 - 2 * kPi).epsilon(1e-13));

    // A corrupted matrix is rejected on composition.
    TransportMap broken = TransportMap::from_angle(0.3);
    broken.matrix[0][0] = -broken.matrix[0][0];
    CHECK_THROWS_AS((void)compose(broken, a), TransportError);
}

TEST_CASE("latitude holonomy on the unit sphere") {
    const Setup s = setup("sphere");
    for (double theta0 : {kPi / 6, kPi / 3, kPi / 2, 2.0}) {
        const TransportMap h = holonomy(s.omega, latitude(theta0), s.metric.chart);
        // omega = -cos(u) dv integrates to -2 pi cos(theta0) over one turn.
        CHECK(h.angle.lift == doctest::Approx(-2 * kPi * std::cos(theta0)).epsilon(1e-10));
    }
    // The equatorial loop is a geodesic: its holonomy is the identity.
    const TransportMap eq = holonomy(s.omega, latitude(kPi / 2), s.metric.chart);
    CHECK(std::abs(eq.angle.lift) < 1e-12);
    CHECK(eq.matrix[0][0] == doctest::Approx(1).epsilon(1e-12));
    CHECK(eq.matrix[0][1] == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("holonomy agrees with the ODE transport oracle") {
    // Integrate da/dt = -omega b, db/dt = +omega a by fixed-step RK4 and
    // compare with the angle route.
    SUBCASE("sphere latitude") {
        const Setup s = setup("sphere");
        const auto loop = latitude(kPi / 3);
        const TransportMap h = holonomy(s.omega, loop, s.metric.chart);
        const Vec2 ode = oracles::rk4_transport(s.omega, loop, {1, 0}, 4000);
        const Vec2 lib = h.apply({1, 0});
        CHECK(lib[0] == doctest::Approx(ode[0]).epsilon(1e-9));
        CHECK(lib[1] == doctest::Approx(ode[1]).epsilon(1e-9));
    }
    SUBCASE("bumpy sphere chart circle") {
        const Setup s = setup("bumpy_sphere");
        const auto loop = circle(kPi / 2, kPi, 0.7);
        const TransportMap h = holonomy(s.omega, loop, s.metric.chart);
        const Vec2 start{0.6, -0.8};
        const Vec2 ode = oracles::rk4_transport(s.omega, loop, start, 6000);
        const Vec2 lib = h.apply(start);
        CHECK(lib[0] == doctest::Approx(ode[0]).epsilon(1e-8));
        CHECK(lib[1] == doctest::Approx(ode[1]).epsilon(1e-8));
    }
}

TEST_CASE("transport angles concatenate along the curve") {
    const Setup s = setup("bumpy_sphere");
    const auto loop = circle(kPi / 2, kPi, 0.8);  // two-segment parameter range [0, 1]
    const double t0 = 0.1, t1 = 0.55, t2 = 0.93;
    const double whole = transport_angle(s.omega, loop, t0, t2).lift;
    const double first = transport_angle(s.omega, loop, t0, t1).lift;
    const double second = transport_angle(s.omega, loop, t1, t2).lift;
    CHECK(whole == doctest::Approx(first + second).epsilon(1e-12));

    // Reversing the interval negates the angle.
    CHECK(transport_angle(s.omega, loop, t2, t0).lift == doctest::Approx(-whole).epsilon(1e-12));

    // Parameters outside the range are rejected.
    CHECK_THROWS_AS((void)transport_angle(s.omega, loop, -0.5, 0.5), TransportError);
}

TEST_CASE("transport angle is reparametrization invariant") {
    const Setup s = setup("sphere");
    // The same latitude path traversed at uniform and at quadratic speed.
    const double theta0 = 1.1;
    curvatura::boundary::PiecewiseCurve uniform, quadratic;
    uniform.segments = {expression_segment("1.1 + 0*t", "2*pi*t")};
    quadratic.segments = {expression_segment("1.1 + 0*t", "2*pi*t^2")};
    uniform.closed = quadratic.closed = true;
    const double a = transport_angle(s.omega, uniform, 0, 1).lift;
    const double b = transport_angle(s.omega, quadratic, 0, 1).lift;
    CHECK(a == doctest::Approx(-2 * kPi * std::cos(theta0)).epsilon(1e-11));
    CHECK(b == doctest::Approx(a).epsilon(1e-11));
}

TEST_CASE("holonomy transport is an isometry") {
    const Setup s = setup("bumpy_sphere");
    const auto loop = circle(kPi / 2, kPi, 0.6);
    const TransportMap h = holonomy(s.omega, loop, s.metric.chart);
    const double u0 = kPi / 2 + 0.6, v0 = kPi;  // loop start point
    for (int i = 0; i < 10; ++i) {
        const Vec2 ab{oracles::uniform(-2, 2), oracles::uniform(-2, 2)};
        const Vec2 out = h.apply(ab);
        CHECK(out[0] * out[0] + out[1] * out[1] ==
              doctest::Approx(ab[0] * ab[0] + ab[1] * ab[1]).epsilon(1e-12));
        // In chart terms: metric length is preserved at the base point.
        const Vec2 w = curvatura::geometry::from_frame_components(s.frame, ab, u0, v0);
        const Vec2 wt = curvatura::geometry::from_frame_components(s.frame, out, u0, v0);
        CHECK(s.metric.inner(wt, wt, u0, v0) ==
              doctest::Approx(s.metric.inner(w, w, u0, v0)).epsilon(1e-11));
    }
}

TEST_CASE("holonomy rejects open or broken loops") {
    const Setup s = setup("sphere");
    curvatura::boundary::PiecewiseCurve open_curve;
    open_curve.segments = {line_segment({1.0, 1.0}, {1.5, 2.0})};
    open_curve.closed = false;
    CHECK_THROWS_AS((void)holonomy(s.omega, open_curve, s.metric.chart), TransportError);

    curvatura::boundary::PiecewiseCurve gap;
    gap.segments = {line_segment({1.0, 1.0}, {1.5, 2.0})};
    gap.closed = true;  // claimed closed, endpoints half a chart apart
    CHECK_THROWS_AS((void)holonomy(s.omega, gap, s.metric.chart), TransportError);
}

TEST_CASE("covariant derivative on the plane is the directional derivative") {
    const MetricPatch m = euclidean_patch();
    const Frame f = coordinate_frame(m);
    const OneForm w = connection_form(m, f);
    VectorField Z{uv("2"), uv("-1")};
    VectorField W{uv("u^2*v"), uv("sin(v)")};
    const VectorField d = covariant_derivative(m, f, w, Z, W);
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(-4, 4), v = oracles::uniform(-4, 4);
        CHECK(d.a.value(u, v) == doctest::Approx(2 * 2 * u * v - u * u).epsilon(1e-12));
        CHECK(d.b.value(u, v) == doctest::Approx(-std::cos(v)).epsilon(1e-12));
    }
}

TEST_CASE("covariant derivative reproduces the frame equations") {
    // nabla_Z X = -omega(Z) Y and nabla_Z Y = +omega(Z) X.
    const Setup s = setup("sphere");
    VectorField Z{uv("1 - v/9"), uv("u/3")};
    const VectorField dX = covariant_derivative(s.metric, s.frame, s.omega, Z, s.frame.X);
    const VectorField dY = covariant_derivative(s.metric, s.frame, s.omega, Z, s.frame.Y);
    for (int i = 0; i < 20; ++i) {
        const double u = oracles::uniform(0.3, kPi - 0.3), v = oracles::uniform(0, 2 * kPi);
        const double wz = s.omega(Z.value(u, v), u, v);
        const Vec2 X = s.frame.X.value(u, v), Y = s.frame.Y.value(u, v);
        CHECK(dX.value(u, v)[0] == doctest::Approx(-wz * Y[0]).epsilon(1e-11));
        CHECK(dX.value(u, v)[1] == doctest::Approx(-wz * Y[1]).epsilon(1e-11));
        CHECK(dY.value(u, v)[0] == doctest::Approx(wz * X[0]).epsilon(1e-11));
        CHECK(dY.value(u, v)[1] == doctest::Approx(wz * X[1]).epsilon(1e-11));
    }
}

TEST_CASE("covariant derivative is metric compatible") {
    // Z<W1,W2> = <nabla_Z W1, W2> + <W1, nabla_Z W2> at random points.
    for (const char* name : {"sphere", "torus"}) {
        const Setup s = setup(name);
        VectorField Z{uv("1 + u/5"), uv("v/7 - 1")};
        VectorField W1{uv("sin(u)"), uv("cos(v) + 2")};
        VectorField W2{uv("u*v/10"), uv("1 - u/4")};
        const VectorField d1 = covariant_derivative(s.metric, s.frame, s.omega, Z, W1);
        const VectorField d2 = covariant_derivative(s.metric, s.frame, s.omega, Z, W2);

        // <W1, W2> as a scalar field, differentiated exactly.
        const Field inner12 = s.metric.E * W1.a * W2.a + s.metric.F * (W1.a * W2.b + W1.b * W2.a) +
                              s.metric.G * W1.b * W2.b;
        const Field dirZ = Z.a * inner12.derivative(0) + Z.b * inner12.derivative(1);

        const double pad = 0.3;
        for (int i = 0; i < 50; ++i) {
            const double u = oracles::uniform(s.metric.chart.u0 + pad, s.metric.chart.u1 - pad);
            const double v = oracles::uniform(s.metric.chart.v0 + pad, s.metric.chart.v1 - pad);
            const double lhs = dirZ.value(u, v);
            const double rhs = s.metric.inner(d1.value(u, v), W2.value(u, v), u, v) +
                               s.metric.inner(W1.value(u, v), d2.value(u, v), u, v);
            CHECK(std::abs(lhs - rhs) / (1 + std::abs(lhs)) < 1e-7);
        }
    }
}

TEST_CASE("covariant derivative is torsion free and Leibniz") {
    const Setup s = setup("torus");
    VectorField X{uv("1 + v/6"), uv("u/4")};
    VectorField Y{uv("v/3"), uv("2 - u/8")};
    const VectorField dXY = covariant_derivative(s.metric, s.frame, s.omega, X, Y);
    const VectorField dYX = covariant_derivative(s.metric, s.frame, s.omega, Y, X);
    const VectorField bracket = lie_bracket(X, Y);

    const Field h = uv("2 + sin(u)*cos(v)");
    VectorField hY{h * Y.a, h * Y.b};
    const VectorField dXhY = covariant_derivative(s.metric, s.frame, s.omega, X, hY);
    const Field Xh = X.a * h.derivative(0) + X.b * h.derivative(1);

    for (int i = 0; i < 25; ++i) {
        const double u = oracles::uniform(0.2, 2 * kPi - 0.2), v = oracles::uniform(0.2, 2 * kPi - 0.2);
        // Torsion: nabla_X Y - nabla_Y X = [X, Y].
        CHECK(dXY.value(u, v)[0] - dYX.value(u, v)[0] ==
              doctest::Approx(bracket.value(u, v)[0]).epsilon(1e-10));
        CHECK(dXY.value(u, v)[1] - dYX.value(u, v)[1] ==
              doctest::Approx(bracket.value(u, v)[1]).epsilon(1e-10));
        // Leibniz: nabla_X (hY) = X(h) Y + h nabla_X Y.
        CHECK(dXhY.value(u, v)[0] ==
              doctest::Approx(Xh.value(u, v) * Y.value(u, v)[0] + h.value(u, v) * dXY.value(u, v)[0])
                  .epsilon(1e-10));
        CHECK(dXhY.value(u, v)[1] ==
              doctest::Approx(Xh.value(u, v) * Y.value(u, v)[1] + h.value(u, v) * dXY.value(u, v)[1])
                  .epsilon(1e-10));
    }
}

TEST_CASE("lie bracket closed forms") {
    // Coordinate fields commute.
    const VectorField zero = lie_bracket(basis_u(), basis_v());
    CHECK(zero.a.value(1, 2) == 0);
    CHECK(zero.b.value(1, 2) == 0);

    // [u^2 dv, du] = -2u dv.
    VectorField X{uv("0"), uv("u^2")};
    const VectorField b = lie_bracket(X, basis_u());
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(-3, 3), v = oracles::uniform(-3, 3);
        CHECK(b.a.value(u, v) == doctest::Approx(0).epsilon(1e-14));
        CHECK(b.b.value(u, v) == doctest::Approx(-2 * u).epsilon(1e-14));
    }

    // Antisymmetry and the Jacobi identity, pointwise on polynomial fields.
    VectorField Y{uv("v"), uv("u*v")};
    VectorField Zf{uv("u + v"), uv("1")};
    const VectorField xy = lie_bracket(X, Y), yx = lie_bracket(Y, X);
    const VectorField jac1 = lie_bracket(X, lie_bracket(Y, Zf));
    const VectorField jac2 = lie_bracket(Y, lie_bracket(Zf, X));
    const VectorField jac3 = lie_bracket(Zf, lie_bracket(X, Y));
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(-2, 2), v = oracles::uniform(-2, 2);
        CHECK(xy.value(u, v)[0] == doctest::Approx(-yx.value(u, v)[0]).epsilon(1e-13));
        CHECK(xy.value(u, v)[1] == doctest::Approx(-yx.value(u, v)[1]).epsilon(1e-13));
        CHECK(jac1.value(u, v)[0] + jac2.value(u, v)[0] + jac3.value(u, v)[0] ==
              doctest::Approx(0).epsilon(1e-12));
        CHECK(jac1.value(u, v)[1] + jac2.value(u, v)[1] + jac3.value(u, v)[1] ==
              doctest::Approx(0).epsilon(1e-12));
    }
}

TEST_CASE("curvature operator equals K times the metric rotation") {
    // On a surface R(X,Y)Z = K (<Y,Z> X - <X,Z> Y).
    for (const char* name : {"sphere", "torus"}) {
        const Setup s = setup(name);
        const Field k = curvatura::connection::gauss_curvature(s.metric, s.frame);
        VectorField X{uv("1"), uv("v/5")};
        VectorField Y{uv("u/7"), uv("1 + u/9")};
        VectorField Z{uv("sin(v)"), uv("2 - cos(u)")};
        const VectorField R = curvature_operator(s.metric, s.frame, s.omega, X, Y, Z);
        const double pad = 0.3;
        for (int i = 0; i < 25; ++i) {
            const double u = oracles::uniform(s.metric.chart.u0 + pad, s.metric.chart.u1 - pad);
            const double v = oracles::uniform(s.metric.chart.v0 + pad, s.metric.chart.v1 - pad);
            const Vec2 Xp = X.value(u, v), Yp = Y.value(u, v), Zp = Z.value(u, v);
            const double yz = s.metric.inner(Yp, Zp, u, v), xz = s.metric.inner(Xp, Zp, u, v);
            const double kp = k.value(u, v);
            const Vec2 expect{kp * (yz * Xp[0] - xz * Yp[0]), kp * (yz * Xp[1] - xz * Yp[1])};
            const Vec2 got = R.value(u, v);
            CHECK(std::abs(got[0] - expect[0]) / (1 + std::abs(expect[0])) < 1e-9);
            CHECK(std::abs(got[1] - expect[1]) / (1 + std::abs(expect[1])) < 1e-9);
        }
    }
}

TEST_CASE("curvature operator is tensorial and skew") {
    const Setup s = setup("bumpy_sphere");
    const Field fs = uv("1 + u/6"), gs = uv("2 - v/7"), hs = uv("1 + u*v/20");
    VectorField X{uv("1"), uv("u/4")};
    VectorField Y{uv("v/6"), uv("1")};
    VectorField Z{uv("cos(v)"), uv("sin(u) + 2")};
    VectorField fX{fs * X.a, fs * X.b}, gY{gs * Y.a, gs * Y.b}, hZ{hs * Z.a, hs * Z.b};

    const VectorField base = curvature_operator(s.metric, s.frame, s.omega, X, Y, Z);
    const VectorField scaled = curvature_operator(s.metric, s.frame, s.omega, fX, gY, hZ);
    const VectorField swapped = curvature_operator(s.metric, s.frame, s.omega, Y, X, Z);
    const VectorField RW = curvature_operator(s.metric, s.frame, s.omega, X, Y, s.frame.X);

    for (int i = 0; i < 25; ++i) {
        const double u = oracles::uniform(0.4, kPi - 0.4), v = oracles::uniform(0.3, 2 * kPi - 0.3);
        const double fgh = fs.value(u, v) * gs.value(u, v) * hs.value(u, v);
        const Vec2 b = base.value(u, v), sc = scaled.value(u, v), sw = swapped.value(u, v);
        // Function factors pull straight out of all three slots.
        CHECK(std::abs(sc[0] - fgh * b[0]) / (1 + std::abs(fgh * b[0])) < 1e-7);
        CHECK(std::abs(sc[1] - fgh * b[1]) / (1 + std::abs(fgh * b[1])) < 1e-7);
        // Skew in the first pair.
        CHECK(std::abs(sw[0] + b[0]) / (1 + std::abs(b[0])) < 1e-7);
        CHECK(std::abs(sw[1] + b[1]) / (1 + std::abs(b[1])) < 1e-7);
        // Skew of <R(X,Y)., .>: diagonal entries vanish.
        CHECK(std::abs(s.metric.inner(RW.value(u, v), s.frame.X.value(u, v), u, v)) < 1e-9);
        CHECK(std::abs(s.metric.inner(base.value(u, v), Z.value(u, v), u, v)) /
                  (1 + std::abs(b[0])) <
              1e-9);
    }
}

TEST_CASE("holonomy defect quotient approaches the curvature operator") {
    const Setup s = setup("sphere");
    VectorField Z{uv("1"), uv("1/2")};
    const Vec2 p{1.0, 0.5};
    const VectorField R =
        curvature_operator(s.metric, s.frame, s.omega, basis_u(), basis_v(), Z);
    const Vec2 expect = R.value(p[0], p[1]);

    const Vec2 coarse = holonomy_defect_quotient(s.metric, s.frame, s.omega, Z, p, 1e-2, 1e-2);
    const Vec2 fine = holonomy_defect_quotient(s.metric, s.frame, s.omega, Z, p, 1e-3, 1e-3);
    const double err_coarse = std::hypot(coarse[0] - expect[0], coarse[1] - expect[1]);
    const double err_fine = std::hypot(fine[0] - expect[0], fine[1] - expect[1]);
    CHECK(err_coarse < 1e-2);
    CHECK(err_fine < 1e-3);
    CHECK(err_fine < err_coarse);

    // Leaving the chart is an error.
    const MetricPatch m = euclidean_patch();
    const Frame f = coordinate_frame(m);
    const OneForm w = connection_form(m, f);
    CHECK_THROWS_AS(
        (void)holonomy_defect_quotient(m, f, w, Z, {4.9999, 0}, 1e-2, 1e-2), TransportError);
}

TEST_CASE("flows follow closed-form trajectories") {
    const ChartRect chart{-10, 10, -10, 10};

    // Constant field: straight translation.
    const Vec2 a = flow(chart, basis_u(), {1, 2}, 0.75);
    CHECK(a[0] == doctest::Approx(1.75).epsilon(1e-11));
    CHECK(a[1] == doctest::Approx(2).epsilon(1e-11));

    // Linear field u du: exponential growth.
    VectorField radial{uv("u"), uv("0")};
    const Vec2 b = flow(chart, radial, {1, 0}, 1.5);
    CHECK(b[0] == doctest::Approx(std::exp(1.5)).epsilon(1e-10));

    // Rotation field (-v, u): circular motion.
    VectorField rot{uv("-v"), uv("u")};
    const Vec2 c = flow(chart, rot, {2, 0}, kPi / 3);
    CHECK(c[0] == doctest::Approx(2 * std::cos(kPi / 3)).epsilon(1e-10));
    CHECK(c[1] == doctest::Approx(2 * std::sin(kPi / 3)).epsilon(1e-10));

    // Flow out of the chart raises.
    CHECK_THROWS_AS((void)flow(ChartRect{-1, 1, -1, 1}, basis_u(), {0.5, 0}, 2.0),
                    TransportError);
}

TEST_CASE("flow commutator detects non-commuting fields") {
    const ChartRect chart{-10, 10, -10, 10};

    // Commuting fields return to the start exactly.
    const Vec2 back = flow_commutator(chart, basis_u(), basis_v(), {0.3, -0.6}, 0.4);
    CHECK(back[0] == doctest::Approx(0.3).epsilon(1e-11));
    CHECK(back[1] == doctest::Approx(-0.6).epsilon(1e-11));

    // X = u^2 dv, Y = du from (1, 0): endpoint is p + t^2 [X,Y] + (0, -t^3),
    // and all higher corrections vanish for this pair.
    VectorField X{uv("0"), uv("u^2")};
    for (double t : {0.4, 0.2, 0.1}) {
        const Vec2 end = flow_commutator(chart, X, basis_u(), {1, 0}, t);
        CHECK(end[0] == doctest::Approx(1).epsilon(1e-11));
        CHECK(end[1] == doctest::Approx(-2 * t * t - t * t * t).epsilon(1e-10));
    }
}
