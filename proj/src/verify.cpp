// Region integration (tensor and scanline), Euler characteristics, and the
// theorem-level verification runs.

#include "curvatura/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <utility>

namespace curvatura::verify {

using boundary::Crossing;
using boundary::SegmentPtr;
using quadrature::QuadOptions;
using quadrature::QuadStats;

long euler_characteristic(const Triangulation& t) {
    long v = t.vertices, e = t.edges, f = t.faces;
    if (v < 0 || e < 0 || f < 0) throw VerifyError("triangulation counts must be non-negative");
    if (!t.face_list.empty()) {
        auto norm = [](long a, long b) { return a < b ? std::pair(a, b) : std::pair(b, a); };
        std::map<std::pair<long, long>, int> edge_use;
        for (const auto& face : t.face_list) {
            if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
                throw VerifyError("triangulation face is not a 3-cycle");
            for (int k = 0; k < 3; ++k) ++edge_use[norm(face[k], face[(k + 1) % 3])];
        }
        for (const auto& [edge, uses] : edge_use)
            if (uses > 2)
                throw VerifyError("triangulation edge (" + std::to_string(edge.first) + ", " +
                                  std::to_string(edge.second) + ") bounds more than two faces");
        if (!t.edge_list.empty()) {
            std::set<std::pair<long, long>> declared;
            for (const auto& ed : t.edge_list) declared.insert(norm(ed[0], ed[1]));
            for (const auto& [edge, uses] : edge_use)
                if (!declared.count(edge)) throw VerifyError("triangulation face edge not in edge list");
            e = static_cast<long>(declared.size());
        } else {
            e = static_cast<long>(edge_use.size());
        }
        f = static_cast<long>(t.face_list.size());
        std::set<long> ids;
        for (const auto& face : t.face_list) ids.insert(face.begin(), face.end());
        if (v == 0) v = static_cast<long>(ids.size());
    }
    return v - e + f;
}

DomainSpec DomainSpec::rectangle(const ChartRect& r) {
    DomainSpec d;
    d.kind = Kind::Rect;
    d.rect = r;
    return d;
}

DomainSpec DomainSpec::bounded(std::vector<PiecewiseCurve> loops, std::optional<int> chi) {
    DomainSpec d;
    d.kind = Kind::Loops;
    d.loops = std::move(loops);
    d.euler_char = chi;
    return d;
}

namespace {

struct BoundarySegment {
    SegmentPtr seg;
    std::vector<double> breaks;  // monotone pieces of v(t)
};

// Scanline section structure at a fixed v level: the list of u-intervals
// inside the region.
std::vector<std::pair<double, double>> sections_at(const std::vector<BoundarySegment>& boundary,
                                                   const ChartRect& chart, double level) {
    std::vector<std::pair<double, int>> crossings;  // (u, depth change)
    for (const auto& bs : boundary)
        for (const Crossing& c : boundary::crossings_at_level(bs.seg, bs.breaks, level))
            crossings.emplace_back(c.u, -c.sign);  // v increasing at the crossing = leaving
    std::sort(crossings.begin(), crossings.end());

    // Depth profile along u, shifted so its minimum is zero.
    int depth = 0, min_depth = 0;
    for (const auto& [u, dd] : crossings) {
        depth += dd;
        min_depth = std::min(min_depth, depth);
    }
    int current = -min_depth;  // depth on [chart.u0, first crossing)

    std::vector<std::pair<double, double>> sections;
    double start = chart.u0;
    for (const auto& [u, dd] : crossings) {
        if (current >= 1 && u > start) sections.emplace_back(start, u);
        current += dd;
        start = u;
    }
    if (current >= 1 && chart.u1 > start) sections.emplace_back(start, chart.u1);
    return sections;
}

template <class F>
double integrate_loop_region(F&& integrand, const std::vector<PiecewiseCurve>& loops,
                             const ChartRect& chart, const QuadOptions& opt, QuadStats* stats) {
    std::vector<BoundarySegment> boundary;
    std::vector<double> levels;
    for (const PiecewiseCurve& loop : loops) {
        for (const SegmentPtr& seg : loop.segments) {
            BoundarySegment bs{seg, boundary::monotone_v_breaks(seg)};
            for (double b : bs.breaks) levels.push_back(seg->at(b).v.f);
            boundary.push_back(std::move(bs));
        }
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(),
                             [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                 levels.end());
    if (levels.size() < 2) throw VerifyError("degenerate loop region: no v extent");
    const double v_lo = levels.front(), v_hi = levels.back();

    QuadOptions inner = opt;
    inner.tol = opt.tol / (16 * std::max(1.0, v_hi - v_lo));
    inner.parallel = false;  // scanlines already run under the outer rule

    auto scanline = [&](double v) {
        const auto sections = sections_at(boundary, chart, v);
        QuadOptions per = inner;
        per.tol = inner.tol / std::max<size_t>(sections.size(), 1);
        double g = 0;
        for (const auto& [a, b] : sections)
            g += quadrature::adaptive_1d([&](double u) { return integrand(u, v); }, a, b, per,
                                         stats);
        return g;
    };

    const size_t pieces = levels.size() - 1;
    QuadOptions outer = opt;
    outer.tol = opt.tol / 2 / static_cast<double>(pieces);
    double total = 0;
    for (size_t i = 0; i + 1 < levels.size(); ++i)
        total += quadrature::adaptive_1d(scanline, levels[i], levels[i + 1], outer, stats);
    return total;
}

}  // namespace

double integrate_curvature(const MetricPatch& m, const Frame& f, const OneForm& w,
                           const DomainSpec& d, const QuadOptions& opt, QuadStats* stats) {
    (void)f;
    const connection::TwoForm omega2 = connection::exterior_derivative(w);
    auto integrand = [&](double u, double v) { return omega2.c.value(u, v); };
    switch (d.kind) {
        case DomainSpec::Kind::FullChart:
            return quadrature::adaptive_rect(integrand, m.chart.u0, m.chart.u1, m.chart.v0,
                                             m.chart.v1, opt, stats);
        case DomainSpec::Kind::Rect:
            return quadrature::adaptive_rect(integrand, d.rect.u0, d.rect.u1, d.rect.v0, d.rect.v1,
                                             opt, stats);
        case DomainSpec::Kind::Loops: {
            for (const PiecewiseCurve& loop : d.loops) {
                if (!loop.closed) throw VerifyError("region boundary loop is not closed");
                boundary::validate_curve(m, loop);
            }
            const double value = integrate_loop_region(integrand, d.loops, m.chart, opt, stats);
            return d.orientation >= 0 ? value : -value;
        }
    }
    throw VerifyError("unreachable domain kind");
}

namespace {

VerificationReport make_report(std::string name, double lhs, double rhs, double tol,
                               const QuadStats& stats) {
    VerificationReport r;
    r.scenario = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.residual = std::fabs(lhs - rhs);
    r.tolerance = tol;
    r.pass = r.residual < tol;
    r.quadrature_panels = stats.panels;
    r.quadrature_max_depth = stats.max_depth;
    return r;
}

}  // namespace

VerificationReport verify_compact(const catalog::CatalogEntry& surface, double tol,
                                  const QuadOptions& opt) {
    if (!surface.euler_char)
        throw VerifyError("verify_compact needs a surface with a declared Euler characteristic");
    const Frame f = geometry::coordinate_frame(surface.metric);
    const OneForm w = connection::connection_form(surface.metric, f);
    QuadStats stats;
    const double total =
        integrate_curvature(surface.metric, f, w, DomainSpec::full_chart(), opt, &stats);
    return make_report("compact:" + surface.name, 2 * std::numbers::pi * *surface.euler_char, total,
                       tol, stats);
}

VerificationReport verify_local(const MetricPatch& m, const Frame& f, const OneForm& w,
                                const DomainSpec& d, double tol, const QuadOptions& opt) {
    if (d.kind != DomainSpec::Kind::Loops || d.loops.size() != 1)
        throw VerifyError("verify_local needs a region bounded by exactly one loop");
    boundary::validate_curve(m, d.loops.front());
    QuadStats stats;
    const double area_term = integrate_curvature(m, f, w, d, opt, &stats);
    const double kg_term =
        boundary::geodesic_curvature_integral(m, f, w, d.loops.front(), opt, &stats);
    double corner_sum = 0;
    for (double a : boundary::exterior_angles(d.loops.front(), m)) corner_sum += a;
    return make_report("local", 2 * std::numbers::pi, area_term + kg_term + corner_sum, tol, stats);
}

VerificationReport verify_general(const MetricPatch& m, const Frame& f, const OneForm& w,
                                  const DomainSpec& d, double tol, const QuadOptions& opt) {
    if (d.kind != DomainSpec::Kind::Loops || d.loops.empty())
        throw VerifyError("verify_general needs a loop-bounded region");
    if (!d.euler_char) throw VerifyError("verify_general needs the region's Euler characteristic");
    for (const PiecewiseCurve& loop : d.loops) boundary::validate_curve(m, loop);
    QuadStats stats;
    double rhs = integrate_curvature(m, f, w, d, opt, &stats);
    for (const PiecewiseCurve& loop : d.loops) {
        rhs += boundary::geodesic_curvature_integral(m, f, w, loop, opt, &stats);
        for (double a : boundary::exterior_angles(loop, m)) rhs += a;
    }
    return make_report("general", 2 * std::numbers::pi * *d.euler_char, rhs, tol, stats);
}

VerificationReport verify_turning(const PiecewiseCurve& c, double tol) {
    const RotationAngle turn = boundary::turning_angle(c);
    return make_report("turning", 2 * std::numbers::pi, turn.lift, tol, {});
}

}  // namespace curvatura::verify
