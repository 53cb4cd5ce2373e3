// Metric patches, embeddings, vector fields and orthonormal frames.
//
// A surface is presented as a coordinate chart (an axis-aligned rectangle,
// optionally periodic in either axis) carrying either the first fundamental
// form E, F, G directly or an embedding (x, y, z) from which the induced
// metric is derived symbolically.  Singular curves of the chart (e.g. the
// poles of spherical coordinates) are carried as metadata: curve-based
// operations refuse to touch them, while area integrals whose integrands
// extend continuously may cross them.

#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvatura/expr.hpp"

namespace curvatura::geometry {

using expr::Field;

using Vec2 = std::array<double, 2>;

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ChartRect {
    double u0 = 0, u1 = 1, v0 = 0, v1 = 1;
    bool periodic_u = false, periodic_v = false;

    double width() const { return u1 - u0; }
    double height() const { return v1 - v0; }
    bool contains(double u, double v, double slack = 1e-9) const;

    // Distance between chart points, respecting periodic identifications.
    double distance(Vec2 a, Vec2 b) const;
};

// An excluded line u = value (axis 0) or v = value (axis 1) of the chart.
struct SingularLine {
    int axis = 0;
    double value = 0;
};

// Chart-coordinate distance from (u,v) to the nearest singular line.
double singular_distance(const std::vector<SingularLine>& lines, double u, double v);

// Curve operations reject points closer than this to a singular line.
inline constexpr double kSingularDelta = 1e-3;

// Validation samples metric positivity on this many cells per axis.
inline constexpr int kValidationGrid = 64;

struct MetricJets {
    Jet2 E, F, G;
};

struct MetricPatch {
    ChartRect chart;
    Field E, F, G;  // first fundamental form, fields in (u, v)
    std::vector<SingularLine> singular;

    MetricJets jets(double u, double v) const { return {E.jet2(u, v), F.jet2(u, v), G.jet2(u, v)}; }

    // <Z, W> at a point, for chart-coordinate components.
    double inner(Vec2 z, Vec2 w, double u, double v) const;
    double norm(Vec2 z, double u, double v) const;
    double area_density(double u, double v) const;  // sqrt(EG - F^2)
};

struct Embedding {
    ChartRect chart;
    Field x, y, z;  // fields in (u, v)
    std::vector<SingularLine> singular;
};

// A vector field a(u,v) du + b(u,v) dv in chart components.
struct VectorField {
    Field a, b;

    Vec2 value(double u, double v) const { return {a.value(u, v), b.value(u, v)}; }
};

VectorField basis_u();  // the coordinate field with components (1, 0)
VectorField basis_v();  // the coordinate field with components (0, 1)

struct Frame {
    MetricPatch metric;
    VectorField X, Y;
    bool flipped = false;  // Y was negated to restore positive orientation
};

// Raises GeometryError if E > 0, G > 0, EG - F^2 > 0 fails anywhere on the
// validation grid (sampled at cell centers, skipping the singular lines).
// The error message reports the worst offending point.
void validate_metric(const MetricPatch& m);

// Induced metric of an embedding: E = <r_u, r_u>, F = <r_u, r_v>,
// G = <r_v, r_v> as composed expression trees (exact symbolic derivatives).
MetricPatch induced_metric(const Embedding& e);

// Orthonormalize the seed pair (X1, Y1):
//   X = X1 / sqrt(<X1,X1>)
//   Y = sqrt(<X1,X1>) / sqrt(<X1,X1><Y1,Y1> - <X1,Y1>^2)
//       * (-(<X1,Y1>/<X1,X1>) X1 + Y1)
// The result is validated to be orthonormal (to 1e-10) on the probe grid.
// If the seed pair is negatively oriented, Y is negated and the flip is
// recorded on the returned Frame.  Linearly dependent seeds raise
// GeometryError.
Frame gram_schmidt_frame(const MetricPatch& m, const VectorField& X1, const VectorField& Y1);

// Default frame: Gram-Schmidt applied to the coordinate basis (du, dv).
Frame coordinate_frame(const MetricPatch& m);

// Components of a tangent vector in the frame: a = <W, X>, b = <W, Y>.
Vec2 frame_components(const Frame& f, Vec2 w, double u, double v);

// Inverse of frame_components: w = a X + b Y in chart coordinates.
Vec2 from_frame_components(const Frame& f, Vec2 ab, double u, double v);

// Visits the cell-centred validation grid, skipping points within
// kSingularDelta of a singular line.
template <class Fn>
void for_each_probe(const ChartRect& chart, const std::vector<SingularLine>& singular, Fn&& fn) {
    for (int i = 0; i < kValidationGrid; ++i) {
        const double u = chart.u0 + (i + 0.5) / kValidationGrid * chart.width();
        for (int j = 0; j < kValidationGrid; ++j) {
            const double v = chart.v0 + (j + 0.5) / kValidationGrid * chart.height();
            if (singular_distance(singular, u, v) < kSingularDelta) continue;
            fn(u, v);
        }
    }
}

}  // namespace curvatura::geometry
