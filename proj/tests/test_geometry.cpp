#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "curvatura/catalog.hpp"
#include "curvatura/connection.hpp"
#include "curvatura/geometry.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace curvatura::geometry;
using curvatura::catalog::make_surface;
using curvatura::expr::Field;

namespace {

const double kPi = 3.14159265358979323846;

Field uv(const char* src) { return Field::parse(src, {"u", "v"}); }

Embedding unit_sphere_embedding() {
    Embedding e;
    e.chart = {0.05, kPi - 0.05, 0, 2 * kPi, false, true};
    e.x = uv("sin(u)*cos(v)");
    e.y = uv("sin(u)*sin(v)");
    e.z = uv("cos(u)");
    return e;
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

TEST_CASE("induced metric of the flat chart") {
    Embedding e;
    e.chart = {-2, 2, -2, 2};
    e.x = uv("u");
    e.y = uv("v");
    e.z = uv("0");
    const MetricPatch m = induced_metric(e);
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(-2, 2), v = oracles::uniform(-2, 2);
        CHECK(m.E.value(u, v) == doctest::Approx(1).epsilon(1e-15));
        CHECK(m.F.value(u, v) == doctest::Approx(0).epsilon(1e-15));
        CHECK(m.G.value(u, v) == doctest::Approx(1).epsilon(1e-15));
    }
}

TEST_CASE("induced metric of the unit sphere") {
    const MetricPatch m = induced_metric(unit_sphere_embedding());
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(0.1, kPi - 0.1), v = oracles::uniform(0, 2 * kPi);
        CHECK(m.E.value(u, v) == doctest::Approx(1).epsilon(1e-13));
        CHECK(m.F.value(u, v) == doctest::Approx(0).epsilon(1e-13));
        const double s = std::sin(u);
        CHECK(m.G.value(u, v) == doctest::Approx(s * s).epsilon(1e-13));
    }
}

TEST_CASE("induced metric of the torus") {
    Embedding e;
    e.chart = {0, 2 * kPi, 0, 2 * kPi, true, true};
    e.x = uv("(2 + cos(u))*cos(v)");
    e.y = uv("(2 + cos(u))*sin(v)");
    e.z = uv("sin(u)");
    const MetricPatch m = induced_metric(e);
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(0, 2 * kPi), v = oracles::uniform(0, 2 * kPi);
        CHECK(m.E.value(u, v) == doctest::Approx(1).epsilon(1e-13));
        CHECK(m.F.value(u, v) == doctest::Approx(0).epsilon(1e-13));
        const double g = 2 + std::cos(u);
        CHECK(m.G.value(u, v) == doctest::Approx(g * g).epsilon(1e-13));
    }

    // Also equals the catalog's torus(2, 1) on shared points.
    const MetricPatch c = make_surface("torus").metric;
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(0, 2 * kPi), v = oracles::uniform(0, 2 * kPi);
        CHECK(m.G.value(u, v) == doctest::Approx(c.G.value(u, v)).epsilon(1e-13));
    }
}

TEST_CASE("induced metric matches finite-difference tangent dot products") {
    // E = <r_u, r_u>, F = <r_u, r_v>, G = <r_v, r_v> with the tangents
    // obtained by central differences on the embedding functions.
    auto check_embedding = [](const Embedding& e, double pad) {
        const MetricPatch m = induced_metric(e);
        auto tangents = [&](double u, double v, double du, double dv) {
            const double h = 1e-6;
            const double xp = e.x.value(u + h * du, v + h * dv),
                         xm = e.x.value(u - h * du, v - h * dv);
            const double yp = e.y.value(u + h * du, v + h * dv),
                         ym = e.y.value(u - h * du, v - h * dv);
            const double zp = e.z.value(u + h * du, v + h * dv),
                         zm = e.z.value(u - h * du, v - h * dv);
            return std::array<double, 3>{(xp - xm) / (2 * h), (yp - ym) / (2 * h),
                                         (zp - zm) / (2 * h)};
        };
        for (int i = 0; i < 100; ++i) {
            const double u = oracles::uniform(e.chart.u0 + pad, e.chart.u1 - pad);
            const double v = oracles::uniform(e.chart.v0 + pad, e.chart.v1 - pad);
            const auto ru = tangents(u, v, 1, 0), rv = tangents(u, v, 0, 1);
            auto dot = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
                return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            };
            const double scale = 1 + std::abs(m.E.value(u, v)) + std::abs(m.G.value(u, v));
            CHECK(std::abs(m.E.value(u, v) - dot(ru, ru)) / scale < 1e-6);
            CHECK(std::abs(m.F.value(u, v) - dot(ru, rv)) / scale < 1e-6);
            CHECK(std::abs(m.G.value(u, v) - dot(rv, rv)) / scale < 1e-6);
        }
    };
    check_embedding(unit_sphere_embedding(), 0.05);
    check_embedding(*make_surface("bumpy_sphere").embedding, 0.1);
}

TEST_CASE("gram_schmidt leaves an orthonormal pair alone") {
    const MetricPatch m = euclidean_patch();
    const Frame f = gram_schmidt_frame(m, basis_u(), basis_v());
    CHECK(!f.flipped);
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(-5, 5), v = oracles::uniform(-5, 5);
        CHECK(f.X.value(u, v)[0] == doctest::Approx(1).epsilon(1e-14));
        CHECK(f.X.value(u, v)[1] == doctest::Approx(0).epsilon(1e-14));
        CHECK(f.Y.value(u, v)[0] == doctest::Approx(0).epsilon(1e-14));
        CHECK(f.Y.value(u, v)[1] == doctest::Approx(1).epsilon(1e-14));
    }
}

TEST_CASE("gram_schmidt on the sphere's coordinate basis") {
    const MetricPatch m = make_surface("sphere").metric;
    const Frame f = gram_schmidt_frame(m, basis_u(), basis_v());
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(0.2, kPi - 0.2), v = oracles::uniform(0, 2 * kPi);
        CHECK(f.X.value(u, v)[0] == doctest::Approx(1).epsilon(1e-13));
        CHECK(f.X.value(u, v)[1] == doctest::Approx(0).epsilon(1e-13));
        CHECK(f.Y.value(u, v)[0] == doctest::Approx(0).epsilon(1e-13));
        CHECK(f.Y.value(u, v)[1] == doctest::Approx(1 / std::sin(u)).epsilon(1e-13));
    }
}

TEST_CASE("gram_schmidt straightens a sheared pair") {
    const MetricPatch m = euclidean_patch();
    VectorField sheared{uv("1"), uv("1")};  // du + dv
    const Frame f = gram_schmidt_frame(m, basis_u(), sheared);
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(-5, 5), v = oracles::uniform(-5, 5);
        CHECK(f.X.value(u, v)[0] == doctest::Approx(1).epsilon(1e-13));
        CHECK(f.X.value(u, v)[1] == doctest::Approx(0).epsilon(1e-13));
        CHECK(f.Y.value(u, v)[0] == doctest::Approx(0).epsilon(1e-13));
        CHECK(f.Y.value(u, v)[1] == doctest::Approx(1).epsilon(1e-13));
    }
}

TEST_CASE("gram_schmidt output is orthonormal and idempotent") {
    const MetricPatch m = make_surface("bumpy_sphere").metric;
    VectorField a{uv("1 + v/9"), uv("u/7")};
    VectorField b{uv("u*v/11"), uv("2 - u/5")};
    const Frame f = gram_schmidt_frame(m, a, b);
    const Frame g = gram_schmidt_frame(m, f.X, f.Y);
    for (int i = 0; i < 25; ++i) {
        const double u = oracles::uniform(0.3, kPi - 0.3), v = oracles::uniform(0, 2 * kPi);
        CHECK(m.inner(f.X.value(u, v), f.X.value(u, v), u, v) == doctest::Approx(1).epsilon(1e-12));
        CHECK(m.inner(f.X.value(u, v), f.Y.value(u, v), u, v) == doctest::Approx(0).epsilon(1e-12));
        CHECK(m.inner(f.Y.value(u, v), f.Y.value(u, v), u, v) == doctest::Approx(1).epsilon(1e-12));
        // Re-orthonormalizing changes nothing.
        CHECK(g.X.value(u, v)[0] == doctest::Approx(f.X.value(u, v)[0]).epsilon(1e-12));
        CHECK(g.X.value(u, v)[1] == doctest::Approx(f.X.value(u, v)[1]).epsilon(1e-12));
        CHECK(g.Y.value(u, v)[0] == doctest::Approx(f.Y.value(u, v)[0]).epsilon(1e-12));
        CHECK(g.Y.value(u, v)[1] == doctest::Approx(f.Y.value(u, v)[1]).epsilon(1e-12));
    }
}

TEST_CASE("gram_schmidt flips a negatively oriented pair") {
    const MetricPatch m = euclidean_patch();
    const Frame f = gram_schmidt_frame(m, basis_v(), basis_u());
    CHECK(f.flipped);
    const double u = 0.4, v = -1.3;
    // X = dv survives; Y becomes -du so that (X, Y) is positively oriented.
    CHECK(f.X.value(u, v)[0] == doctest::Approx(0).epsilon(1e-14));
    CHECK(f.X.value(u, v)[1] == doctest::Approx(1).epsilon(1e-14));
    CHECK(f.Y.value(u, v)[0] == doctest::Approx(-1).epsilon(1e-14));
    CHECK(f.Y.value(u, v)[1] == doctest::Approx(0).epsilon(1e-14));
}

TEST_CASE("gram_schmidt rejects dependent seeds") {
    const MetricPatch m = euclidean_patch();
    VectorField twice{uv("2"), uv("0")};
    CHECK_THROWS_AS((void)gram_schmidt_frame(m, basis_u(), twice), GeometryError);
}

TEST_CASE("area form") {
    using curvatura::connection::area_form;
    CHECK(area_form(euclidean_patch()).c.value(0.3, -0.7) == doctest::Approx(1).epsilon(1e-14));

    const MetricPatch sphere = make_surface("sphere").metric;
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(0.1, kPi - 0.1), v = oracles::uniform(0, 2 * kPi);
        CHECK(area_form(sphere).c.value(u, v) == doctest::Approx(std::sin(u)).epsilon(1e-13));
    }

    // Conformal disk: density is the conformal factor itself.
    const MetricPatch disk = make_surface("poincare_disk").metric;
    for (int i = 0; i < 10; ++i) {
        const double u = oracles::uniform(-0.5, 0.5), v = oracles::uniform(-0.5, 0.5);
        const double rho2 = u * u + v * v;
        CHECK(area_form(disk).c.value(u, v) ==
              doctest::Approx(4 / ((1 - rho2) * (1 - rho2))).epsilon(1e-13));
    }
}

TEST_CASE("inner product, norm, and area density") {
    const MetricPatch m = make_surface("sphere").metric;
    const double u = 1.1, v = 0.4, s = std::sin(u);
    CHECK(m.inner({1, 0}, {1, 0}, u, v) == doctest::Approx(1).epsilon(1e-14));
    CHECK(m.inner({0, 1}, {0, 1}, u, v) == doctest::Approx(s * s).epsilon(1e-14));
    CHECK(m.inner({1, 0}, {0, 1}, u, v) == doctest::Approx(0).epsilon(1e-14));
    CHECK(m.inner({2, 3}, {-1, 4}, u, v) == doctest::Approx(-2 + 12 * s * s).epsilon(1e-13));
    CHECK(m.norm({0, 2}, u, v) == doctest::Approx(2 * s).epsilon(1e-14));
    CHECK(m.area_density(u, v) == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("frame components round-trip") {
    const MetricPatch m = make_surface("bumpy_sphere").metric;
    const Frame f = coordinate_frame(m);
    for (int i = 0; i < 25; ++i) {
        const double u = oracles::uniform(0.3, kPi - 0.3), v = oracles::uniform(0, 2 * kPi);
        const Vec2 w{oracles::uniform(-2, 2), oracles::uniform(-2, 2)};
        const Vec2 ab = frame_components(f, w, u, v);
        const Vec2 back = from_frame_components(f, ab, u, v);
        CHECK(back[0] == doctest::Approx(w[0]).epsilon(1e-12));
        CHECK(back[1] == doctest::Approx(w[1]).epsilon(1e-12));
        // Orthonormality: the metric norm equals the component norm.
        CHECK(ab[0] * ab[0] + ab[1] * ab[1] ==
              doctest::Approx(m.inner(w, w, u, v)).epsilon(1e-12));
    }
}

TEST_CASE("chart rectangles") {
    ChartRect r{0, kPi, 0, 2 * kPi, false, true};
    CHECK(r.contains(1, 1));
    CHECK(!r.contains(-1, 1));
    CHECK(r.width() == doctest::Approx(kPi));

    // Periodic distance wraps the seam.
    CHECK(r.distance({0.5, 0.05}, {0.5, 2 * kPi - 0.05}) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(r.distance({0.5, 1.0}, {0.5, 2.0}) == doctest::Approx(1).epsilon(1e-12));

    ChartRect flat{-5, 5, -5, 5};
    CHECK(flat.distance({-4, 0}, {4, 0}) == doctest::Approx(8).epsilon(1e-12));
}

TEST_CASE("singular lines") {
    std::vector<SingularLine> lines{{0, 0.0}, {0, kPi}};
    CHECK(singular_distance(lines, 0.3, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(singular_distance(lines, kPi - 0.2, 5.0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(singular_distance({}, 0.0, 0.0) > 1e100);
}

TEST_CASE("validate_metric accepts the catalog and rejects a bad patch") {
    CHECK_NOTHROW(validate_metric(make_surface("sphere").metric));
    CHECK_NOTHROW(validate_metric(make_surface("poincare_disk").metric));

    MetricPatch bad = euclidean_patch();
    bad.E = uv("u");  // negative for u < 0
    CHECK_THROWS_AS(validate_metric(bad), GeometryError);

    MetricPatch degenerate = euclidean_patch();
    degenerate.F = uv("1");  // EG - F^2 = 0
    CHECK_THROWS_AS(validate_metric(degenerate), GeometryError);
}

TEST_CASE("catalog entries") {
    using curvatura::catalog::catalog_list;
    CHECK(catalog_list().size() == 5);
    CHECK_THROWS_AS((void)make_surface("klein_bottle"), GeometryError);
    CHECK_THROWS_AS((void)make_surface("sphere", {{"bogus", 1.0}}), GeometryError);
    CHECK(make_surface("sphere").euler_char.value() == 2);
    CHECK(make_surface("torus").euler_char.value() == 0);
    CHECK(!make_surface("plane").euler_char.has_value());
    CHECK(make_surface("sphere").embedding.has_value());

    // Radius scales the sphere metric.
    const MetricPatch m = make_surface("sphere", {{"radius", 2.0}}).metric;
    CHECK(m.G.value(1.0, 0.5) == doctest::Approx(4 * std::sin(1.0) * std::sin(1.0)).epsilon(1e-13));
}
