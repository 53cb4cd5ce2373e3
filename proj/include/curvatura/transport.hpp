// Parallel transport along curves, holonomy of loops, covariant derivatives,
// the curvature operator, and the two flow/holonomy infinitesimal limits.
//
// In an orthonormal frame, transport reduces to a single angle: frame
// components of a parallel field rotate by R(Theta) with Theta the integral
// of the connection form along the curve (see docs/conventions.md).  The
// 2x2 ODE route survives in the tests as an independent oracle.

#pragma once

#include <array>
#include <stdexcept>

#include "curvatura/boundary.hpp"
#include "curvatura/connection.hpp"
#include "curvatura/geometry.hpp"
#include "curvatura/quadrature.hpp"
#include "curvatura/rotation.hpp"

namespace curvatura::transport {

using boundary::PiecewiseCurve;
using connection::OneForm;
using geometry::ChartRect;
using geometry::Frame;
using geometry::MetricPatch;
using geometry::Vec2;
using geometry::VectorField;

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

// A parallel-transport map between tangent spaces: a rotation angle together
// with its realized matrix in frame coordinates.  The matrix is orthogonal
// with determinant 1 to 1e-12 by construction and checked on composition.
struct TransportMap {
    RotationAngle angle;
    Mat2 matrix;

    static TransportMap identity() { return from_angle(0); }
    static TransportMap from_angle(double lift);

    // Apply to frame components.
    Vec2 apply(Vec2 ab) const {
        return {matrix[0][0] * ab[0] + matrix[0][1] * ab[1],
                matrix[1][0] * ab[0] + matrix[1][1] * ab[1]};
    }
};

// j1 after j2: angles add, matrices multiply; consistency to 1e-12 enforced.
TransportMap compose(const TransportMap& j1, const TransportMap& j2);
TransportMap inverse(const TransportMap& j);

// Continuous transport angle from curve parameter t to t2 (global parameters
// in [0, segment count]): the integral of omega(gamma') over [t, t2], by
// per-segment adaptive Gauss-Legendre quadrature.
RotationAngle transport_angle(const OneForm& w, const PiecewiseCurve& c, double t, double t2,
                              const quadrature::QuadOptions& opt = {},
                              quadrature::QuadStats* stats = nullptr);

// Holonomy of a closed loop: transport over the full parameter range.  The
// chart supplies the periodic-aware closure check (endpoints to 1e-10).
TransportMap holonomy(const OneForm& w, const PiecewiseCurve& loop, const ChartRect& chart,
                      const quadrature::QuadOptions& opt = {},
                      quadrature::QuadStats* stats = nullptr);

// Covariant derivative of W in the direction Z, as composed expression
// trees.  With frame components W = aX + bY:
//   nabla_Z W = (Z(a) + b*omega(Z)) X + (Z(b) - a*omega(Z)) Y
// which follows from nabla_Z X = -omega(Z) Y, nabla_Z Y = omega(Z) X and
// the Leibniz rule.
VectorField covariant_derivative(const MetricPatch& m, const Frame& f, const OneForm& w,
                                 const VectorField& Z, const VectorField& W);

// [X, Y] = (X(C) - Y(A)) du + (X(D) - Y(B)) dv for X = A du + B dv,
// Y = C du + D dv (chart components, exact symbolic derivatives).
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
VectorField curvature_operator(const MetricPatch& m, const Frame& f, const OneForm& w,
                               const VectorField& X, const VectorField& Y, const VectorField& Z);

// Transports Z's value at the far corner of the parallelogram
// [u, u+s] x [v, v+t] back to p along its two edge routes (u-edge first /
// v-edge first), subtracts, and divides by s*t.  Converges to the value of
// nabla_du nabla_dv Z - nabla_dv nabla_du Z at p as s, t -> 0.  Returned in
// chart components.
Vec2 holonomy_defect_quotient(const MetricPatch& m, const Frame& f, const OneForm& w,
                              const VectorField& Z, Vec2 p, double s, double t);

// End point of exp(-tY) exp(-tX) exp(tY) exp(tX) applied to p, each flow
// integrated by an adaptive fourth-order one-step method with tolerance
// 1e-12.  Leaves of the chart raise TransportError.
Vec2 flow_commutator(const ChartRect& chart, const VectorField& X, const VectorField& Y, Vec2 p,
                     double t);

// Single flow exp(tX)(p), exposed for tests.
Vec2 flow(const ChartRect& chart, const VectorField& X, Vec2 p, double t);

}  // namespace curvatura::transport
