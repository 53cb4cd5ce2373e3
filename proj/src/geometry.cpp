#include "curvatura/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace curvatura::geometry {

namespace {

std::string format_point(double u, double v) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "(u, v) = (%.12g, %.12g)", u, v);
    return buf;
}

const std::vector<std::string>& uv_vars() {
    static const std::vector<std::string> vars{"u", "v"};
    return vars;
}

}  // namespace

bool ChartRect::contains(double u, double v, double slack) const {
    const bool u_ok = periodic_u || (u >= u0 - slack && u <= u1 + slack);
    const bool v_ok = periodic_v || (v >= v0 - slack && v <= v1 + slack);
    return u_ok && v_ok;
}

double ChartRect::distance(Vec2 a, Vec2 b) const {
    double du = std::fabs(a[0] - b[0]);
    double dv = std::fabs(a[1] - b[1]);
    if (periodic_u) {
        const double period = width();
        du = std::fmod(du, period);
        du = std::min(du, period - du);
    }
    if (periodic_v) {
        const double period = height();
        dv = std::fmod(dv, period);
        dv = std::min(dv, period - dv);
    }
    return std::hypot(du, dv);
}

double singular_distance(const std::vector<SingularLine>& lines, double u, double v) {
    double best = std::numeric_limits<double>::infinity();
    for (const SingularLine& line : lines) {
        const double d = std::fabs((line.axis == 0 ? u : v) - line.value);
        best = std::min(best, d);
    }
    return best;
}

double MetricPatch::inner(Vec2 z, Vec2 w, double u, double v) const {
    const double e = E.value(u, v), f = F.value(u, v), g = G.value(u, v);
    return e * z[0] * w[0] + f * (z[0] * w[1] + z[1] * w[0]) + g * z[1] * w[1];
}

double MetricPatch::norm(Vec2 z, double u, double v) const { return std::sqrt(inner(z, z, u, v)); }

double MetricPatch::area_density(double u, double v) const {
    const double e = E.value(u, v), f = F.value(u, v), g = G.value(u, v);
    return std::sqrt(e * g - f * f);
}

VectorField basis_u() {
    return {expr::constant_field(1, uv_vars()), expr::constant_field(0, uv_vars())};
}

VectorField basis_v() {
    return {expr::constant_field(0, uv_vars()), expr::constant_field(1, uv_vars())};
}

void validate_metric(const MetricPatch& m) {
    double worst = std::numeric_limits<double>::infinity();
    double worst_u = 0, worst_v = 0;
    const char* what = nullptr;
    for_each_probe(m.chart, m.singular, [&](double u, double v) {
        const double e = m.E.value(u, v), f = m.F.value(u, v), g = m.G.value(u, v);
        const double det = e * g - f * f;
        const double margin = std::min(std::min(e, g), det);
        if (margin < worst) {
            worst = margin;
            worst_u = u;
            worst_v = v;
            what = e <= 0 ? "E" : (g <= 0 ? "G" : "EG - F^2");
        }
    });
    if (worst <= 0) {
        throw GeometryError("metric is not positive definite: " + std::string(what) + " = " +
                            std::to_string(worst) + " at " + format_point(worst_u, worst_v));
    }
}

MetricPatch induced_metric(const Embedding& e) {
    const Field xu = e.x.derivative(0), yu = e.y.derivative(0), zu = e.z.derivative(0);
    const Field xv = e.x.derivative(1), yv = e.y.derivative(1), zv = e.z.derivative(1);
    MetricPatch m;
    m.chart = e.chart;
    m.singular = e.singular;
    m.E = xu * xu + yu * yu + zu * zu;
    m.F = xu * xv + yu * yv + zu * zv;
    m.G = xv * xv + yv * yv + zv * zv;
    validate_metric(m);
    return m;
}

namespace {

// <Z, W> as an expression tree over the metric coefficients.
Field inner_field(const MetricPatch& m, const VectorField& z, const VectorField& w) {
    return m.E * (z.a * w.a) + m.F * (z.a * w.b + z.b * w.a) + m.G * (z.b * w.b);
}

}  // namespace

Frame gram_schmidt_frame(const MetricPatch& m, const VectorField& X1, const VectorField& Y1) {
    const Field n1 = inner_field(m, X1, X1);
    const Field n2 = inner_field(m, Y1, Y1);
    const Field cross = inner_field(m, X1, Y1);
    const Field gram = n1 * n2 - cross * cross;

    // Dependent seeds make the Gram determinant vanish; catch that before
    // building fields that would divide by it.
    {
        double worst = std::numeric_limits<double>::infinity();
        double wu = 0, wv = 0;
        for_each_probe(m.chart, m.singular, [&](double u, double v) {
            const double g = gram.value(u, v);
            if (g < worst) {
                worst = g;
                wu = u;
                wv = v;
            }
        });
        if (!(worst > 0))
            throw GeometryError("frame seeds are linearly dependent (Gram determinant " +
                                std::to_string(worst) + " at " + format_point(wu, wv) + ")");
    }

    const Field sqrt_n1 = expr::sqrt(n1);
    VectorField X{X1.a / sqrt_n1, X1.b / sqrt_n1};

    const Field scale = sqrt_n1 / expr::sqrt(gram);
    const Field proj = cross / n1;
    VectorField Y{scale * (Y1.a - proj * X1.a), scale * (Y1.b - proj * X1.b)};

    // Orientation: det(X, Y) in chart components keeps one sign on a
    // connected chart.  A negatively oriented result flips Y.
    bool flipped = false;
    {
        bool decided = false;
        for_each_probe(m.chart, m.singular, [&](double u, double v) {
            if (decided) return;
            const double det = X.a.value(u, v) * Y.b.value(u, v) - X.b.value(u, v) * Y.a.value(u, v);
            if (std::fabs(det) > 1e-12) {
                flipped = det < 0;
                decided = true;
            }
        });
        if (!decided) throw GeometryError("cannot orient frame: degenerate chart sample");
    }
    if (flipped) {
        Y.a = -Y.a;
        Y.b = -Y.b;
    }

    Frame frame{m, X, Y, flipped};

    // Orthonormality checks, direct from the construction.
    double worst = 0;
    double wu = 0, wv = 0;
    for_each_probe(m.chart, m.singular, [&](double u, double v) {
        const double xx = m.inner(frame.X.value(u, v), frame.X.value(u, v), u, v);
        const double yy = m.inner(frame.Y.value(u, v), frame.Y.value(u, v), u, v);
        const double xy = m.inner(frame.X.value(u, v), frame.Y.value(u, v), u, v);
        const double err = std::max({std::fabs(xx - 1), std::fabs(yy - 1), std::fabs(xy)});
        if (err > worst) {
            worst = err;
            wu = u;
            wv = v;
        }
    });
    if (worst > 1e-10)
        throw GeometryError("frame failed orthonormality validation: error " + std::to_string(worst) +
                            " at " + format_point(wu, wv));
    return frame;
}

Frame coordinate_frame(const MetricPatch& m) { return gram_schmidt_frame(m, basis_u(), basis_v()); }

Vec2 frame_components(const Frame& f, Vec2 w, double u, double v) {
    return {f.metric.inner(w, f.X.value(u, v), u, v), f.metric.inner(w, f.Y.value(u, v), u, v)};
}

Vec2 from_frame_components(const Frame& f, Vec2 ab, double u, double v) {
    const Vec2 x = f.X.value(u, v), y = f.Y.value(u, v);
    return {ab[0] * x[0] + ab[1] * y[0], ab[0] * x[1] + ab[1] * y[1]};
}

}  // namespace curvatura::geometry
