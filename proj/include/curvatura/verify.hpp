// Theorem-level verification: curvature integrals over chart regions, Euler
// characteristics from triangulation counts, and report-producing runs of
// the compact, local, general and turning-tangents statements.

#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvatura/boundary.hpp"
#include "curvatura/catalog.hpp"
#include "curvatura/connection.hpp"
#include "curvatura/geometry.hpp"
#include "curvatura/quadrature.hpp"

namespace curvatura::verify {

using boundary::PiecewiseCurve;
using connection::OneForm;
using geometry::ChartRect;
using geometry::Frame;
using geometry::MetricPatch;

class VerifyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Triangulation data: plain counts, optionally with explicit incidence
// (faces as vertex triples, edges as vertex pairs) which is then validated:
// face corners distinct, every face edge listed, each edge on at most two
// faces.
struct Triangulation {
    long vertices = 0, edges = 0, faces = 0;
    std::vector<std::array<long, 3>> face_list;  // optional
    std::vector<std::array<long, 2>> edge_list;  // optional
};

long euler_characteristic(const Triangulation& t);

// A chart region: the full chart, a sub-rectangle, or the region bounded by
// oriented loops, each traversed with the domain on its left.  For loop
// regions, `orientation` = -1 integrates the same point set with reversed
// orientation (negating the result).
struct DomainSpec {
    enum class Kind { FullChart, Rect, Loops };
    Kind kind = Kind::FullChart;
    ChartRect rect;  // Kind::Rect
    std::vector<PiecewiseCurve> loops;
    int orientation = +1;
    std::optional<int> euler_char;

    static DomainSpec full_chart() { return {}; }
    static DomainSpec rectangle(const ChartRect& r);
    static DomainSpec bounded(std::vector<PiecewiseCurve> loops, std::optional<int> chi = {});
};

struct VerificationReport {
    std::string scenario;
    double lhs = 0, rhs = 0, residual = 0, tolerance = 0;
    bool pass = false;
    long quadrature_panels = 0;
    int quadrature_max_depth = 0;
};

// Integral of the curvature two-form over the region.  Full-chart and
// rectangle regions use the adaptive tensor rule directly.  Loop-bounded
// regions are integrated by scanlines: the outer variable v is pre-split at
// every boundary-corner and v-extremum level, so each scanline crosses the
// boundary transversally; crossings anchor an even-odd/winding depth
// profile along u (shifted so its minimum is zero, valid because every
// scanline meets the complement of the region), and the inside intervals
// are integrated adaptively.
double integrate_curvature(const MetricPatch& m, const Frame& f, const OneForm& w,
                           const DomainSpec& d, const quadrature::QuadOptions& opt = {},
                           quadrature::QuadStats* stats = nullptr);

// chi(S) * 2pi versus the full-chart curvature integral of a catalog
// surface with declared Euler characteristic.
VerificationReport verify_compact(const catalog::CatalogEntry& surface, double tol,
                                  const quadrature::QuadOptions& opt = {});

// 2pi versus curvature integral + geodesic-curvature integral + corner sum
// for a region bounded by a single loop.
VerificationReport verify_local(const MetricPatch& m, const Frame& f, const OneForm& w,
                                const DomainSpec& d, double tol,
                                const quadrature::QuadOptions& opt = {});

// 2pi chi(D) versus the three-term sum over all boundary loops.
VerificationReport verify_general(const MetricPatch& m, const Frame& f, const OneForm& w,
                                  const DomainSpec& d, double tol,
                                  const quadrature::QuadOptions& opt = {});

// 2pi versus the total turning of a closed plane curve.
VerificationReport verify_turning(const PiecewiseCurve& c, double tol);

}  // namespace curvatura::verify
