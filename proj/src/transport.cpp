// Transport, holonomy, covariant derivative, curvature operator, and the
// two infinitesimal limits (holonomy-defect quotient, flow commutator).

#include "curvatura/transport.hpp"

#include <cmath>
#include <string>

namespace curvatura::transport {

using expr::Field;

TransportMap TransportMap::from_angle(double lift) {
    const double c = std::cos(lift), s = std::sin(lift);
    return {{lift}, {{{c, -s}, {s, c}}}};
}

namespace {

double matrix_distance(const Mat2& a, const Mat2& b) {
    double worst = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) worst = std::max(worst, std::fabs(a[i][j] - b[i][j]));
    return worst;
}

}  // namespace

TransportMap compose(const TransportMap& j1, const TransportMap& j2) {
    TransportMap out;
    out.angle = {j1.angle.lift + j2.angle.lift};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.matrix[i][j] = j1.matrix[i][0] * j2.matrix[0][j] + j1.matrix[i][1] * j2.matrix[1][j];
    if (matrix_distance(out.matrix, TransportMap::from_angle(out.angle.lift).matrix) > 1e-12)
        throw TransportError("transport composition: matrix and angle representations diverged");
    return out;
}

TransportMap inverse(const TransportMap& j) {
    TransportMap out;
    out.angle = {-j.angle.lift};
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) out.matrix[i][k] = j.matrix[k][i];  // rotation inverse = transpose
    return out;
}

RotationAngle transport_angle(const OneForm& w, const PiecewiseCurve& c, double t, double t2,
                              const quadrature::QuadOptions& opt, quadrature::QuadStats* stats) {
    const double span = c.parameter_span();
    if (t < -1e-12 || t > span + 1e-12 || t2 < -1e-12 || t2 > span + 1e-12)
        throw TransportError("transport parameter outside the curve's range [0, " +
                             std::to_string(static_cast<int>(span)) + "]");
    const double lo = std::min(t, t2), hi = std::max(t, t2);
    const double sign = t2 >= t ? 1.0 : -1.0;
    quadrature::QuadOptions per = opt;
    per.tol = opt.tol / static_cast<double>(c.segments.size());
    double total = 0;
    for (size_t i = 0; i < c.segments.size(); ++i) {
        const double a = std::max(lo - static_cast<double>(i), 0.0);
        const double b = std::min(hi - static_cast<double>(i), 1.0);
        if (a >= b) continue;
        total += quadrature::adaptive_1d(
            [&](double x) { return boundary::connection_along(w, c.segments[i]->at(x)); }, a, b, per,
            stats);
    }
    return {sign * total};
}

TransportMap holonomy(const OneForm& w, const PiecewiseCurve& loop, const ChartRect& chart,
                      const quadrature::QuadOptions& opt, quadrature::QuadStats* stats) {
    if (!loop.closed || loop.segments.empty())
        throw TransportError("holonomy requires a closed loop");
    const boundary::SegJet s = loop.segments.front()->at(0.0);
    const boundary::SegJet e = loop.segments.back()->at(1.0);
    if (chart.distance({s.u.f, s.v.f}, {e.u.f, e.v.f}) > 1e-10)
        throw TransportError("holonomy: loop endpoints do not coincide");
    const RotationAngle a = transport_angle(w, loop, 0, loop.parameter_span(), opt, stats);
    return TransportMap::from_angle(a.lift);
}

namespace {

// Directional derivative Z(g) = Zu * dg/du + Zv * dg/dv as a field tree.
Field direction(const VectorField& Z, const Field& g) {
    return Z.a * g.derivative(0) + Z.b * g.derivative(1);
}

// omega(Z) as a field tree.
Field omega_of(const OneForm& w, const VectorField& Z) { return w.p * Z.a + w.q * Z.b; }

}  // namespace

VectorField covariant_derivative(const MetricPatch& m, const Frame& f, const OneForm& w,
                                 const VectorField& Z, const VectorField& W) {
    // Frame components a = <W, X>, b = <W, Y>.
    const Field a = m.E * W.a * f.X.a + m.F * (W.a * f.X.b + W.b * f.X.a) + m.G * W.b * f.X.b;
    const Field b = m.E * W.a * f.Y.a + m.F * (W.a * f.Y.b + W.b * f.Y.a) + m.G * W.b * f.Y.b;
    const Field wz = omega_of(w, Z);
    const Field A = direction(Z, a) + b * wz;
    const Field B = direction(Z, b) - a * wz;
    return {A * f.X.a + B * f.Y.a, A * f.X.b + B * f.Y.b};
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    return {direction(X, Y.a) - direction(Y, X.a), direction(X, Y.b) - direction(Y, X.b)};
}

VectorField curvature_operator(const MetricPatch& m, const Frame& f, const OneForm& w,
                               const VectorField& X, const VectorField& Y, const VectorField& Z) {
    const VectorField nyz = covariant_derivative(m, f, w, Y, Z);
    const VectorField nxz = covariant_derivative(m, f, w, X, Z);
    const VectorField first = covariant_derivative(m, f, w, X, nyz);
    const VectorField second = covariant_derivative(m, f, w, Y, nxz);
    const VectorField third = covariant_derivative(m, f, w, lie_bracket(X, Y), Z);
    return {first.a - second.a - third.a, first.b - second.b - third.b};
}

Vec2 holonomy_defect_quotient(const MetricPatch& m, const Frame& f, const OneForm& w,
                              const VectorField& Z, Vec2 p, double s, double t) {
    const Vec2 q{p[0] + s, p[1] + t};
    if (!m.chart.contains(p[0], p[1]) || !m.chart.contains(q[0], q[1]))
        throw TransportError("holonomy defect: parallelogram exits the chart");

    auto edge_route = [&](Vec2 mid) {
        PiecewiseCurve c;
        c.segments.push_back(boundary::line_segment(p, mid));
        c.segments.push_back(boundary::line_segment(mid, q));
        return transport_angle(w, c, 0, 2, {1e-12, 12, false}).lift;
    };
    const double theta_gamma = edge_route({p[0] + s, p[1]});  // u-edge first
    const double theta_delta = edge_route({p[0], p[1] + t});  // v-edge first

    const Vec2 ab_q = geometry::frame_components(f, Z.value(q[0], q[1]), q[0], q[1]);
    const Vec2 via_gamma = TransportMap::from_angle(-theta_gamma).apply(ab_q);
    const Vec2 via_delta = TransportMap::from_angle(-theta_delta).apply(ab_q);
    const Vec2 diff{(via_gamma[0] - via_delta[0]) / (s * t), (via_gamma[1] - via_delta[1]) / (s * t)};
    return geometry::from_frame_components(f, diff, p[0], p[1]);
}

namespace {

Vec2 rk4_step(const VectorField& X, Vec2 y, double h) {
    auto eval = [&](Vec2 z) { return X.value(z[0], z[1]); };
    const Vec2 k1 = eval(y);
    const Vec2 k2 = eval({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const Vec2 k3 = eval({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const Vec2 k4 = eval({y[0] + h * k3[0], y[1] + h * k3[1]});
    return {y[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            y[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

}  // namespace

Vec2 flow(const ChartRect& chart, const VectorField& X, Vec2 p, double t) {
    if (t == 0) return p;
    constexpr double kTol = 1e-12;
    const double dir = t > 0 ? 1.0 : -1.0;
    double remaining = std::fabs(t);
    double h = remaining / 8;
    Vec2 y = p;
    int guard = 0;
    while (remaining > 0) {
        if (++guard > 1000000) throw TransportError("flow integration stalled");
        h = std::min(h, remaining);
        const Vec2 full = rk4_step(X, y, dir * h);
        const Vec2 half = rk4_step(X, rk4_step(X, y, dir * h / 2), dir * h / 2);
        const double err =
            std::max(std::fabs(full[0] - half[0]), std::fabs(full[1] - half[1])) / 15.0;
        if (err <= kTol) {
            // Accept the Richardson-extrapolated value.
            y = {half[0] + (half[0] - full[0]) / 15, half[1] + (half[1] - full[1]) / 15};
            if (!chart.contains(y[0], y[1], 1e-9)) throw TransportError("flow exits the chart");
            remaining -= h;
            if (err < kTol / 32) h *= 2;
        } else {
            h *= 0.5 * std::pow(kTol / err, 0.2) + 1e-3;
            h = std::max(h, 1e-14);
        }
    }
    return y;
}

Vec2 flow_commutator(const ChartRect& chart, const VectorField& X, const VectorField& Y, Vec2 p,
                     double t) {
    Vec2 y = flow(chart, X, p, t);
    y = flow(chart, Y, y, t);
    y = flow(chart, X, y, -t);
    y = flow(chart, Y, y, -t);
    return y;
}

}  // namespace curvatura::transport
