// The connection 1-form of an orthonormal frame, its exterior derivative,
// and the Gauss curvature.
//
// Sign conventions (see docs/conventions.md):
//   omega(Z) := -<nabla_Z X, Y>, so nabla_Z X = -omega(Z) Y and
//   nabla_Z Y = +omega(Z) X;  the chart orientation is du ^ dv.
// Under these choices the unit sphere's coordinate frame has
// omega = -cos(u) dv and Omega = sin(u) du ^ dv.

#pragma once

#include "curvatura/geometry.hpp"

namespace curvatura::connection {

using expr::Field;
using geometry::Frame;
using geometry::MetricPatch;
using geometry::Vec2;
using geometry::VectorField;

// p du + q dv
struct OneForm {
    Field p, q;

    double operator()(Vec2 z, double u, double v) const {
        return p.value(u, v) * z[0] + q.value(u, v) * z[1];
    }
};

// c du ^ dv
struct TwoForm {
    Field c;

    double operator()(Vec2 z, Vec2 w, double u, double v) const {
        return c.value(u, v) * (z[0] * w[1] - z[1] * w[0]);
    }
};

// The six Christoffel symbols of the Levi-Civita connection at a point,
// Gamma^k_{ij} with k the upper index and (i, j) symmetric.
struct Christoffels {
    double uuu, uuv, uvv;  // Gamma^u_{uu}, Gamma^u_{uv}, Gamma^u_{vv}
    double vuu, vuv, vvv;  // Gamma^v_{uu}, Gamma^v_{uv}, Gamma^v_{vv}
};

Christoffels christoffel(const MetricPatch& m, double u, double v);

// The area 2-form sqrt(EG - F^2) du ^ dv.
TwoForm area_form(const MetricPatch& m);

// omega with omega(Z) = -<nabla_Z X, Y>, built as expression trees through
// the Christoffel symbols of m applied to the frame fields.
OneForm connection_form(const MetricPatch& m, const Frame& f);

// d(p du + q dv) = (dq/du - dp/dv) du ^ dv, exact symbolic derivatives.
TwoForm exterior_derivative(const OneForm& w);

// Gauss curvature k = Omega(X, Y) as a field; satisfies Omega = k * areaForm.
Field gauss_curvature(const MetricPatch& m, const Frame& f);

struct GaugeResult {
    Frame frame;
    OneForm omega;
};

// Rotate the frame by the angle field theta:
//   X' = cos(theta) X + sin(theta) Y,  Y' = -sin(theta) X + cos(theta) Y
// and return the rotated frame with its freshly computed connection form
// (which satisfies omega' = omega - d theta).
GaugeResult gauge_transform(const Frame& f, const Field& theta);

}  // namespace curvatura::connection
