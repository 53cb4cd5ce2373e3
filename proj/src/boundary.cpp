// Piecewise-smooth curve machinery: segment implementations, validation,
// arc length, geodesic curvature, exterior angles, turning, and the
// monotone-piece crossing solver used by region integration.

#include "curvatura/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace curvatura::boundary {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// TJet of a two-variable field composed with a curve, exact to second order.
TJet compose2(const expr::Field& f, const SegJet& j) {
    const Jet2 J = f.jet2(j.u.f, j.v.f);
    return {J.f, J.fu * j.u.d + J.fv * j.v.d,
            J.fuu * j.u.d * j.u.d + 2 * J.fuv * j.u.d * j.v.d + J.fvv * j.v.d * j.v.d +
                J.fu * j.u.d2 + J.fv * j.v.d2};
}

// The curve velocity as TJets whose .f/.d entries are du/dt and d2u/dt2;
// the .d2 slots would need third derivatives and must not be read.
TJet velocity_u(const SegJet& j) { return {j.u.d, j.u.d2, 0}; }
TJet velocity_v(const SegJet& j) { return {j.v.d, j.v.d2, 0}; }

class ExpressionSegment : public Segment {
public:
    ExpressionSegment(Field u, Field v) : u_(std::move(u)), v_(std::move(v)) {}

    SegJet at(double t) const override { return {u_.tjet(t), v_.tjet(t)}; }

    std::string describe() const override { return "(" + u_.str() + "; " + v_.str() + ")"; }

private:
    Field u_, v_;
};

class ReversedSegment : public Segment {
public:
    explicit ReversedSegment(SegmentPtr base) : base_(std::move(base)) {}

    SegJet at(double t) const override {
        SegJet j = base_->at(1 - t);
        j.u.d = -j.u.d;
        j.v.d = -j.v.d;
        return j;
    }

    std::string describe() const override { return "reversed " + base_->describe(); }

private:
    SegmentPtr base_;
};

// Shorter great-circle arc on the unit sphere chart (u = colatitude,
// v = longitude), parametrized by spherical linear interpolation.
class GreatCircleSegment : public Segment {
public:
    GreatCircleSegment(Vec2 p, Vec2 q) : p_(p), q_(q) {
        a_ = to_space(p);
        b_ = to_space(q);
        double dot = a_[0] * b_[0] + a_[1] * b_[1] + a_[2] * b_[2];
        dot = std::clamp(dot, -1.0, 1.0);
        sigma_ = std::acos(dot);
        if (sigma_ < 1e-9 || sigma_ > std::numbers::pi - 1e-9)
            throw CurveError("great_circle_arc: endpoints are equal or antipodal");
        for (int k = 0; k <= 64; ++k) {
            const SegJet j = at(k / 64.0);
            if (k > 0 && std::fabs(j.v.f - last_v_) > std::numbers::pi)
                throw CurveError("great_circle_arc: arc crosses the longitude seam");
            last_v_ = j.v.f;
        }
    }

    SegJet at(double t) const override {
        const double inv = 1.0 / std::sin(sigma_);
        const TJet tau = TJet::var(t);
        const TJet w1 = sin((TJet(1.0) - tau) * sigma_) * inv;
        const TJet w2 = sin(tau * sigma_) * inv;
        const TJet X = w1 * a_[0] + w2 * b_[0];
        const TJet Y = w1 * a_[1] + w2 * b_[1];
        const TJet Z = w1 * a_[2] + w2 * b_[2];

        const double z = std::clamp(Z.f, -1.0, 1.0);
        const double rad = std::sqrt(std::max(1 - z * z, 1e-300));
        const TJet u = chain(Z, std::acos(z), -1 / rad, -z / (rad * rad * rad));

        // atan2(Y, X) with derivatives: d(atan2) = (X Y' - Y X') / (X^2 + Y^2)
        const double r2 = X.f * X.f + Y.f * Y.f;
        const double num = X.f * Y.d - Y.f * X.d;
        const double numd = X.f * Y.d2 - Y.f * X.d2;
        const double r2d = 2 * (X.f * X.d + Y.f * Y.d);
        double vf = std::atan2(Y.f, X.f);
        if (vf < 0) vf += 2 * std::numbers::pi;
        const TJet v{vf, num / r2, (numd * r2 - num * r2d) / (r2 * r2)};
        return {u, v};
    }

    std::string describe() const override {
        return "great_circle_arc((" + fmt17(p_[0]) + ", " + fmt17(p_[1]) + ") -> (" + fmt17(q_[0]) +
               ", " + fmt17(q_[1]) + "))";
    }

private:
    static std::array<double, 3> to_space(Vec2 c) {
        return {std::sin(c[0]) * std::cos(c[1]), std::sin(c[0]) * std::sin(c[1]), std::cos(c[0])};
    }

    Vec2 p_, q_;
    std::array<double, 3> a_, b_;
    double sigma_ = 0;
    double last_v_ = 0;
};

}  // namespace

SegmentPtr expression_segment(const Field& u_of_t, const Field& v_of_t) {
    return std::make_shared<ExpressionSegment>(u_of_t, v_of_t);
}

SegmentPtr expression_segment(std::string_view u_source, std::string_view v_source) {
    return std::make_shared<ExpressionSegment>(Field::parse(u_source, {"t"}),
                                               Field::parse(v_source, {"t"}));
}

SegmentPtr line_segment(Vec2 a, Vec2 b) {
    return expression_segment("(" + fmt17(a[0]) + ") + t*(" + fmt17(b[0] - a[0]) + ")",
                              "(" + fmt17(a[1]) + ") + t*(" + fmt17(b[1] - a[1]) + ")");
}

SegmentPtr arc_segment(Vec2 center, double radius, double phi0, double phi1) {
    const std::string angle = "(" + fmt17(phi0) + ") + t*(" + fmt17(phi1 - phi0) + ")";
    return expression_segment("(" + fmt17(center[0]) + ") + (" + fmt17(radius) + ")*cos(" + angle + ")",
                              "(" + fmt17(center[1]) + ") + (" + fmt17(radius) + ")*sin(" + angle + ")");
}

SegmentPtr great_circle_arc(Vec2 p, Vec2 q) { return std::make_shared<GreatCircleSegment>(p, q); }

SegmentPtr reversed(SegmentPtr seg) { return std::make_shared<ReversedSegment>(std::move(seg)); }

SegJet PiecewiseCurve::at(double t) const {
    if (segments.empty()) throw CurveError("empty curve");
    const double n = parameter_span();
    t = std::clamp(t, 0.0, n);
    int i = std::min(static_cast<int>(t), static_cast<int>(segments.size()) - 1);
    return segments[static_cast<size_t>(i)]->at(t - i);
}

PiecewiseCurve reversed(const PiecewiseCurve& c) {
    PiecewiseCurve r;
    r.closed = c.closed;
    r.orientation = -c.orientation;
    for (auto it = c.segments.rbegin(); it != c.segments.rend(); ++it) r.segments.push_back(reversed(*it));
    return r;
}

PiecewiseCurve circle(double cx, double cy, double r) {
    PiecewiseCurve c;
    c.closed = true;
    c.segments.push_back(expression_segment("(" + fmt17(cx) + ") + (" + fmt17(r) + ")*cos(2*pi*t)",
                                            "(" + fmt17(cy) + ") + (" + fmt17(r) + ")*sin(2*pi*t)"));
    return c;
}

PiecewiseCurve latitude(double theta0) {
    PiecewiseCurve c;
    c.closed = true;
    c.segments.push_back(expression_segment(fmt17(theta0), "2*pi*t"));
    return c;
}

PiecewiseCurve polygon(const std::vector<Vec2>& vertices) {
    if (vertices.size() < 3) throw CurveError("polygon needs at least 3 vertices");
    PiecewiseCurve c;
    c.closed = true;
    for (size_t i = 0; i < vertices.size(); ++i)
        c.segments.push_back(line_segment(vertices[i], vertices[(i + 1) % vertices.size()]));
    return c;
}

void validate_curve(const MetricPatch& m, const PiecewiseCurve& c) {
    if (c.segments.empty()) throw CurveError("empty curve");
    constexpr int kSamples = 256;
    for (size_t i = 0; i < c.segments.size(); ++i) {
        double min_speed = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= kSamples; ++k) {
            const SegJet j = c.segments[i]->at(static_cast<double>(k) / kSamples);
            if (!m.chart.contains(j.u.f, j.v.f, 1e-7))
                throw CurveError("curve leaves the chart at segment " + std::to_string(i) +
                                 ", t = " + fmt17(static_cast<double>(k) / kSamples));
            if (geometry::singular_distance(m.singular, j.u.f, j.v.f) < geometry::kSingularDelta)
                throw CurveError("curve passes within " + fmt17(geometry::kSingularDelta) +
                                 " of a singular line at segment " + std::to_string(i));
            min_speed = std::min(min_speed, speed(m, j));
        }
        if (min_speed <= 1e-8)
            throw CurveError("segment " + std::to_string(i) + " has vanishing velocity (min speed " +
                             fmt17(min_speed) + ")");
    }
    const size_t n = c.segments.size();
    const size_t joints = c.closed ? n : n - 1;
    for (size_t i = 0; i < joints; ++i) {
        const SegJet e = c.segments[i]->at(1.0);
        const SegJet s = c.segments[(i + 1) % n]->at(0.0);
        const double gap = m.chart.distance({e.u.f, e.v.f}, {s.u.f, s.v.f});
        if (gap > 1e-10)
            throw CurveError("curve is discontinuous at joint " + std::to_string(i) + " (gap " +
                             fmt17(gap) + ")");
    }
}

double speed(const MetricPatch& m, const SegJet& j) {
    return m.norm({j.u.d, j.v.d}, j.u.f, j.v.f);
}

double connection_along(const OneForm& w, const SegJet& j) {
    return w({j.u.d, j.v.d}, j.u.f, j.v.f);
}

FrameVelocity frame_velocity(const MetricPatch& m, const Frame& f, const SegJet& j) {
    const TJet E = compose2(m.E, j), F = compose2(m.F, j), G = compose2(m.G, j);
    const TJet Xu = compose2(f.X.a, j), Xv = compose2(f.X.b, j);
    const TJet Yu = compose2(f.Y.a, j), Yv = compose2(f.Y.b, j);
    const TJet du = velocity_u(j), dv = velocity_v(j);
    const TJet a = E * du * Xu + F * (du * Xv + dv * Xu) + G * dv * Xv;
    const TJet b = E * du * Yu + F * (du * Yv + dv * Yu) + G * dv * Yv;
    return {a.f, b.f, a.d, b.d};  // .d2 entries would need third derivatives
}

double tangent_angle_rate(const MetricPatch& m, const Frame& f, const SegJet& j) {
    const FrameVelocity w = frame_velocity(m, f, j);
    return (w.a * w.db - w.b * w.da) / (w.a * w.a + w.b * w.b);
}

ArcLengthCurve::ArcLengthCurve(const MetricPatch& m, PiecewiseCurve c, double tol)
    : metric_(m), curve_(std::move(c)) {
    cumulative_.push_back(0);
    quadrature::QuadOptions opt;
    opt.tol = tol;
    opt.parallel = false;
    for (const auto& seg : curve_.segments) {
        const double len = quadrature::adaptive_1d(
            [&](double t) { return speed(metric_, seg->at(t)); }, 0, 1, opt);
        cumulative_.push_back(cumulative_.back() + len);
    }
    total_ = cumulative_.back();
}

double ArcLengthCurve::parameter_at(double s) const {
    s = std::clamp(s, 0.0, total_);
    size_t i = static_cast<size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), s) -
                                   cumulative_.begin());
    i = std::min(i == 0 ? 0 : i - 1, curve_.segments.size() - 1);
    const auto& seg = curve_.segments[i];
    const double target = s - cumulative_[i];
    const double seg_len = cumulative_[i + 1] - cumulative_[i];
    // Newton on the in-segment length profile, bisection-guarded.  The
    // profile is evaluated as a 32-bin composite GL16 prefix, which is exact
    // to machine precision for smooth speeds.
    auto length_to = [&](double tt) {
        double acc = 0;
        const int bins = 32;
        const int full = std::min(static_cast<int>(tt * bins), bins - 1);
        for (int k = 0; k < full; ++k)
            acc += quadrature::gl16([&](double x) { return speed(metric_, seg->at(x)); },
                                    static_cast<double>(k) / bins, static_cast<double>(k + 1) / bins);
        return acc + quadrature::gl16([&](double x) { return speed(metric_, seg->at(x)); },
                                      static_cast<double>(full) / bins, tt);
    };
    double lo = 0, hi = 1, t = std::clamp(target / seg_len, 0.0, 1.0);
    for (int iter = 0; iter < 60; ++iter) {
        const double err = length_to(t) - target;
        if (std::fabs(err) < 1e-13 * std::max(1.0, total_)) break;
        if (err > 0)
            hi = t;
        else
            lo = t;
        const double v = speed(metric_, seg->at(t));
        double next = t - err / v;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    return static_cast<double>(i) + t;
}

SegJet ArcLengthCurve::at(double s) const {
    const double t = parameter_at(s);
    const SegJet j = curve_.at(t);
    const TJet E = compose2(metric_.E, j), F = compose2(metric_.F, j), G = compose2(metric_.G, j);
    const TJet du = velocity_u(j), dv = velocity_v(j);
    const TJet q = E * du * du + 2.0 * F * du * dv + G * dv * dv;  // |gamma'|^2 in t
    const double V = std::sqrt(q.f);
    const double Vd = q.d / (2 * V);
    // du/ds = u'/V,  d2u/ds2 = (u'' V - u' V') / V^3
    const TJet us{j.u.f, j.u.d / V, (j.u.d2 * V - j.u.d * Vd) / (V * V * V)};
    const TJet vs{j.v.f, j.v.d / V, (j.v.d2 * V - j.v.d * Vd) / (V * V * V)};
    return {us, vs};
}

double arc_length(const MetricPatch& m, const PiecewiseCurve& c, double tol) {
    return ArcLengthCurve(m, c, tol).length();
}

double geodesic_curvature(const ArcLengthCurve& c, const MetricPatch& m, const Frame& f,
                          const OneForm& w, double s) {
    const double t = c.parameter_at(s);
    const SegJet j = c.curve().at(t);
    const double V = speed(m, j);
    return (tangent_angle_rate(m, f, j) - connection_along(w, j)) / V;
}

double geodesic_curvature_integral(const MetricPatch& m, const Frame& f, const OneForm& w,
                                   const PiecewiseCurve& c, const quadrature::QuadOptions& opt,
                                   quadrature::QuadStats* stats) {
    quadrature::QuadOptions per = opt;
    per.tol = opt.tol / static_cast<double>(c.segments.size());
    double total = 0;
    for (const auto& seg : c.segments) {
        total += quadrature::adaptive_1d(
            [&](double t) {
                const SegJet j = seg->at(t);
                return tangent_angle_rate(m, f, j) - connection_along(w, j);
            },
            0, 1, per, stats);
    }
    return total;
}

std::vector<double> exterior_angles(const PiecewiseCurve& c, const MetricPatch& m) {
    const size_t n = c.segments.size();
    if (n == 0) throw CurveError("empty curve");
    const size_t joints = c.closed ? n : (n > 0 ? n - 1 : 0);
    std::vector<double> out;
    out.reserve(joints);
    for (size_t i = 0; i < joints; ++i) {
        const SegJet e = c.segments[i]->at(1.0);
        const SegJet s = c.segments[(i + 1) % n]->at(0.0);
        const double u = e.u.f, v = e.v.f;
        const Vec2 tin{e.u.d, e.v.d}, tout{s.u.d, s.v.d};
        const double dot = m.inner(tin, tout, u, v);
        const double cross = tin[0] * tout[1] - tin[1] * tout[0];
        const double alpha = std::atan2(m.area_density(u, v) * cross, dot);
        if (std::fabs(alpha) >= std::numbers::pi - 1e-9)
            throw CurveError("cusp at joint " + std::to_string(i) +
                             " (exterior angle = " + fmt17(alpha) + ")");
        out.push_back(alpha);
    }
    return out;
}

double tangent_lift_delta(const MetricPatch& m, const Frame& f, const SegmentPtr& seg) {
    for (int n = 256; n <= 32768; n *= 2) {
        std::vector<double> theta(static_cast<size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) {
            const FrameVelocity w = frame_velocity(m, f, seg->at(static_cast<double>(k) / n));
            theta[static_cast<size_t>(k)] = std::atan2(w.b, w.a);
        }
        double total = 0, worst = 0;
        for (int k = 0; k < n; ++k) {
            double d = theta[static_cast<size_t>(k) + 1] - theta[static_cast<size_t>(k)];
            d = std::remainder(d, 2 * std::numbers::pi);
            worst = std::max(worst, std::fabs(d));
            total += d;
        }
        if (worst < std::numbers::pi / 2) return total;
    }
    throw CurveError("angle unwrap failure: tangent rotates more than pi/2 between adjacent "
                     "samples at resolution 32768");
}

RotationAngle turning_angle(const PiecewiseCurve& c) {
    if (!c.closed) throw CurveError("turning angle requires a closed curve");
    static const MetricPatch plane = [] {
        MetricPatch m;
        m.chart = {-1e9, 1e9, -1e9, 1e9, false, false};
        m.E = Field::parse("1", {"u", "v"});
        m.F = Field::parse("0", {"u", "v"});
        m.G = Field::parse("1", {"u", "v"});
        return m;
    }();
    static const Frame frame = geometry::coordinate_frame(plane);
    double total = 0;
    for (const auto& seg : c.segments) total += tangent_lift_delta(plane, frame, seg);
    for (double a : exterior_angles(c, plane)) total += a;
    return {total};
}

std::vector<double> monotone_v_breaks(const SegmentPtr& seg, int presamples) {
    std::vector<double> breaks{0.0};
    double prev_t = 0, prev_d = seg->at(0).v.d;
    for (int k = 1; k <= presamples; ++k) {
        const double t = static_cast<double>(k) / presamples;
        const double d = seg->at(t).v.d;
        if ((prev_d < 0 && d > 0) || (prev_d > 0 && d < 0)) {
            double lo = prev_t, hi = t, flo = prev_d;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = seg->at(mid).v.d;
                if ((flo < 0) == (fm < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            breaks.push_back(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_d = d;
    }
    breaks.push_back(1.0);
    return breaks;
}

std::vector<Crossing> crossings_at_level(const SegmentPtr& seg, const std::vector<double>& breaks,
                                         double level) {
    std::vector<Crossing> out;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        double lo = breaks[i], hi = breaks[i + 1];
        double flo = seg->at(lo).v.f - level, fhi = seg->at(hi).v.f - level;
        if (flo == 0 || fhi == 0) continue;  // levels at joints/extrema are pre-split away
        if ((flo < 0) == (fhi < 0)) continue;
        for (int it = 0; it < 64; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = seg->at(mid).v.f - level;
            if (fm == 0) {
                lo = hi = mid;
                break;
            }
            if ((flo < 0) == (fm < 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        const double t = 0.5 * (lo + hi);
        const SegJet j = seg->at(t);
        out.push_back({t, j.u.f, j.v.d > 0 ? 1 : -1});
    }
    return out;
}

}  // namespace curvatura::boundary
