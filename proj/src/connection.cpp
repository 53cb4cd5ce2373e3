#include "curvatura/connection.hpp"

namespace curvatura::connection {

namespace {

using expr::Field;

// Christoffel symbols as expression trees, shared by connection_form.
struct ChristoffelFields {
    Field uuu, uuv, uvv, vuu, vuv, vvv;
};

ChristoffelFields christoffel_fields(const MetricPatch& m) {
    const Field Eu = m.E.derivative(0), Ev = m.E.derivative(1);
    const Field Fu = m.F.derivative(0), Fv = m.F.derivative(1);
    const Field Gu = m.G.derivative(0), Gv = m.G.derivative(1);

    // First kind: Gamma_{ij,l} = (d_i g_{jl} + d_j g_{il} - d_l g_{ij}) / 2.
    const Field c111 = Eu / 2;
    const Field c112 = Fu - Ev / 2;
    const Field c121 = Ev / 2;
    const Field c122 = Gu / 2;
    const Field c221 = Fv - Gu / 2;
    const Field c222 = Gv / 2;

    const Field det = m.E * m.G - m.F * m.F;
    const Field iE = m.G / det;   // g^{uu}
    const Field iF = -(m.F / det);  // g^{uv}
    const Field iG = m.E / det;   // g^{vv}

    ChristoffelFields c;
    c.uuu = iE * c111 + iF * c112;
    c.vuu = iF * c111 + iG * c112;
    c.uuv = iE * c121 + iF * c122;
    c.vuv = iF * c121 + iG * c122;
    c.uvv = iE * c221 + iF * c222;
    c.vvv = iF * c221 + iG * c222;
    return c;
}

Field inner_field(const MetricPatch& m, const VectorField& z, const VectorField& w) {
    return m.E * (z.a * w.a) + m.F * (z.a * w.b + z.b * w.a) + m.G * (z.b * w.b);
}

// nabla_{d/du} W and nabla_{d/dv} W for a vector field W, as trees.
VectorField nabla_u(const ChristoffelFields& c, const VectorField& w) {
    return {w.a.derivative(0) + c.uuu * w.a + c.uuv * w.b,
            w.b.derivative(0) + c.vuu * w.a + c.vuv * w.b};
}

VectorField nabla_v(const ChristoffelFields& c, const VectorField& w) {
    return {w.a.derivative(1) + c.uuv * w.a + c.uvv * w.b,
            w.b.derivative(1) + c.vuv * w.a + c.vvv * w.b};
}

}  // namespace

Christoffels christoffel(const MetricPatch& m, double u, double v) {
    const Jet1 E = m.E.jet1(u, v), F = m.F.jet1(u, v), G = m.G.jet1(u, v);

    const double c111 = E.fu / 2;
    const double c112 = F.fu - E.fv / 2;
    const double c121 = E.fv / 2;
    const double c122 = G.fu / 2;
    const double c221 = F.fv - G.fu / 2;
    const double c222 = G.fv / 2;

    const double det = E.f * G.f - F.f * F.f;
    const double iE = G.f / det, iF = -F.f / det, iG = E.f / det;

    Christoffels c{};
    c.uuu = iE * c111 + iF * c112;
    c.vuu = iF * c111 + iG * c112;
    c.uuv = iE * c121 + iF * c122;
    c.vuv = iF * c121 + iG * c122;
    c.uvv = iE * c221 + iF * c222;
    c.vvv = iF * c221 + iG * c222;
    return c;
}

TwoForm area_form(const MetricPatch& m) { return {expr::sqrt(m.E * m.G - m.F * m.F)}; }

OneForm connection_form(const MetricPatch& m, const Frame& f) {
    const ChristoffelFields c = christoffel_fields(m);
    const VectorField du_X = nabla_u(c, f.X);
    const VectorField dv_X = nabla_v(c, f.X);
    return {-inner_field(m, du_X, f.Y), -inner_field(m, dv_X, f.Y)};
}

TwoForm exterior_derivative(const OneForm& w) {
    return {w.q.derivative(0) - w.p.derivative(1)};
}

Field gauss_curvature(const MetricPatch& m, const Frame& f) {
    const TwoForm omega2 = exterior_derivative(connection_form(m, f));
    // k = Omega(X, Y): the frame is orthonormal, so this normalizes Omega.
    return omega2.c * (f.X.a * f.Y.b - f.X.b * f.Y.a);
}

GaugeResult gauge_transform(const Frame& f, const Field& theta) {
    const Field ct = expr::Field::from_node(
        expr::make_unary(expr::UnaryFn::Cos, theta.node()), theta.variables());
    const Field st = expr::Field::from_node(
        expr::make_unary(expr::UnaryFn::Sin, theta.node()), theta.variables());

    Frame g = f;
    g.X = {ct * f.X.a + st * f.Y.a, ct * f.X.b + st * f.Y.b};
    g.Y = {ct * f.Y.a - st * f.X.a, ct * f.Y.b - st * f.X.b};
    return {g, connection_form(f.metric, g)};
}

}  // namespace curvatura::connection
