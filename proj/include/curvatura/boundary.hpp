// Piecewise-smooth chart curves with corners: validation, arc length,
// geodesic curvature, exterior angles, and the planar turning angle.
//
// A curve is an ordered list of smooth segments t in [0,1] -> (u(t), v(t)),
// normally given as a pair of single-variable expressions; a handful of
// built-ins (circles, latitudes, polygons, great-circle arcs) construct the
// common cases.  The whole curve uses a global parameter in [0, n], segment
// i covering [i, i+1].
//
// Sign conventions (see docs/conventions.md): the chart orientation is
// du ^ dv; a corner's exterior angle is the signed turn from the incoming
// to the outgoing unit tangent, positive when turning toward the left of
// the direction of travel.  Geodesic curvature of an arc-length curve is
// k_g(s) = dtheta/ds - omega(tangent), where theta is a continuous lift of
// the tangent's frame angle; its derivative is evaluated pointwise through
// exact jets, so no finite differencing is involved.

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvatura/connection.hpp"
#include "curvatura/geometry.hpp"
#include "curvatura/quadrature.hpp"
#include "curvatura/rotation.hpp"

namespace curvatura::boundary {

using connection::OneForm;
using expr::Field;
using geometry::Frame;
using geometry::MetricPatch;
using geometry::Vec2;

class CurveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Chart position and its first two t-derivatives.
struct SegJet {
    TJet u, v;
};

class Segment {
public:
    virtual ~Segment() = default;
    virtual SegJet at(double t) const = 0;  // t in [0, 1]
    virtual std::string describe() const = 0;
};

using SegmentPtr = std::shared_ptr<const Segment>;

// Segment from a pair of expressions in the single variable t.
SegmentPtr expression_segment(const Field& u_of_t, const Field& v_of_t);
SegmentPtr expression_segment(std::string_view u_source, std::string_view v_source);

// Straight chart segment from a to b.
SegmentPtr line_segment(Vec2 a, Vec2 b);

// Euclidean circular arc about `center`, angles phi0 -> phi1 (radians).
SegmentPtr arc_segment(Vec2 center, double radius, double phi0, double phi1);

// Shorter great-circle arc between two points of the colatitude/longitude
// sphere chart, parametrized by spherical linear interpolation.  Endpoints
// must be neither equal nor antipodal, and the arc must not cross the
// longitude seam.
SegmentPtr great_circle_arc(Vec2 p, Vec2 q);

// The same segment traversed backwards (t -> 1 - t).
SegmentPtr reversed(SegmentPtr seg);

struct PiecewiseCurve {
    std::vector<SegmentPtr> segments;
    bool closed = false;
    int orientation = +1;

    // Global parameter: t in [0, size()], segment i covers [i, i+1].
    SegJet at(double t) const;
    double parameter_span() const { return static_cast<double>(segments.size()); }
};

PiecewiseCurve reversed(const PiecewiseCurve& c);

// Built-in loops.
PiecewiseCurve circle(double cx, double cy, double r);     // counterclockwise
PiecewiseCurve latitude(double theta0);                    // u = theta0, v: 0 -> 2pi
PiecewiseCurve polygon(const std::vector<Vec2>& vertices); // closed, vertex order

// Checks the curve against a metric patch: consecutive endpoints coincide to
// 1e-10 (periodic-aware; last-to-first too when closed), every segment keeps
// 256-sample chart speed above 1e-8, all samples lie in the chart and at
// least kSingularDelta away from singular lines.  Throws CurveError.
void validate_curve(const MetricPatch& m, const PiecewiseCurve& c);

// Metric speed |gamma'(t)| at a segment jet.
double speed(const MetricPatch& m, const SegJet& j);

// omega(gamma'(t)) at a segment jet.
double connection_along(const OneForm& w, const SegJet& j);

// Frame components a = <gamma', X>, b = <gamma', Y> of the velocity and
// their exact t-derivatives.
struct FrameVelocity {
    double a, b, da, db;
};
FrameVelocity frame_velocity(const MetricPatch& m, const Frame& f, const SegJet& j);

// d(theta)/dt of any continuous lift of the tangent's frame angle,
// evaluated branch-free: (a db/dt - b da/dt) / (a^2 + b^2).
double tangent_angle_rate(const MetricPatch& m, const Frame& f, const SegJet& j);

// Arc-length reparametrization: total length plus an exact s -> t inverse
// (Newton with bisection fallback on the per-segment length profile).
class ArcLengthCurve {
public:
    ArcLengthCurve(const MetricPatch& m, PiecewiseCurve c, double tol = 1e-12);

    double length() const { return total_; }
    const PiecewiseCurve& curve() const { return curve_; }

    // Global curve parameter t at arc length s in [0, length()].
    double parameter_at(double s) const;

    // Chart position with derivatives taken in s (unit metric speed).
    SegJet at(double s) const;

private:
    MetricPatch metric_;  // fields are shared, so the copy is cheap
    PiecewiseCurve curve_;
    std::vector<double> cumulative_;  // cumulative length at segment starts, size n+1
    double total_ = 0;
};

// Total length of the curve.
double arc_length(const MetricPatch& m, const PiecewiseCurve& c, double tol = 1e-12);

// k_g at arc length s of an arc-length curve.
double geodesic_curvature(const ArcLengthCurve& c, const MetricPatch& m, const Frame& f,
                          const OneForm& w, double s);

// Integral of k_g ds over the smooth pieces of the curve (corner angles are
// not included).  Computed in the original parameter: the speed cancels,
// leaving the integral of dtheta/dt - omega(gamma') in t.
double geodesic_curvature_integral(const MetricPatch& m, const Frame& f, const OneForm& w,
                                   const PiecewiseCurve& c,
                                   const quadrature::QuadOptions& opt = {},
                                   quadrature::QuadStats* stats = nullptr);

// Signed exterior angles at the corners of the curve, in (-pi, pi), measured
// in the metric at each corner.  For closed curves there is one angle per
// joint including the closure joint; for open curves, joints only.  An angle
// within 1e-9 of +-pi (a cusp) raises CurveError.
std::vector<double> exterior_angles(const PiecewiseCurve& c, const MetricPatch& m);

// Change of the continuous tangent-angle lift along one segment, by dense
// sampling (starting at 256 samples, doubling until adjacent wrapped steps
// drop below pi/2; failure to achieve that by 2^15 samples raises
// CurveError("angle unwrap failure ...")).
double tangent_lift_delta(const MetricPatch& m, const Frame& f, const SegmentPtr& seg);

// Total turning of a closed curve in the Euclidean plane: sum of the smooth
// tangent-angle variation plus the corner jumps.
RotationAngle turning_angle(const PiecewiseCurve& c);

// --- scanline support kept here for unit testing -------------------------

// Monotone decomposition of v(t): parameters 0 = b_0 < ... < b_k = 1 such
// that v is monotone on each piece (interior breaks are roots of dv/dt,
// located from a dense sign scan).
std::vector<double> monotone_v_breaks(const SegmentPtr& seg, int presamples = 1024);

// All solutions of v(t) = level in (0,1), with the chart u-position and the
// sign of dv/dt at the crossing.  `breaks` comes from monotone_v_breaks.
struct Crossing {
    double t, u;
    int sign;  // +1 where v is increasing
};
std::vector<Crossing> crossings_at_level(const SegmentPtr& seg, const std::vector<double>& breaks,
                                         double level);

}  // namespace curvatura::boundary
