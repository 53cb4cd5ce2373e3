// Scenario file parsing and execution.

#include "curvatura/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "curvatura/report.hpp"
#include "curvatura/rotation.hpp"
#include "curvatura/transport.hpp"

namespace curvatura::scenario {
namespace {

using boundary::PiecewiseCurve;
using boundary::SegmentPtr;
using expr::Field;
using geometry::ChartRect;
using geometry::MetricPatch;
using geometry::SingularLine;
using geometry::Vec2;
using geometry::VectorField;

struct Entry {
    std::string key, value;
    int line = 0, col = 0;  // col: 1-based start of the value text
    mutable bool used = false;
};

struct Section {
    std::string name;  // e.g. "surface", "curve outer"
    int line = 0;
    std::vector<Entry> entries;
};

std::string trim(std::string s) {
    auto space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && space(s.front())) s.erase(s.begin());
    while (!s.empty() && space(s.back())) s.pop_back();
    return s;
}

std::vector<Section> split_sections(const std::string& text) {
    std::vector<Section> out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ScenarioError("unterminated section header", lineno, 1);
            const std::string name = trim(body.substr(1, body.size() - 2));
            if (name.empty()) throw ScenarioError("empty section header", lineno, 1);
            out.push_back({name, lineno, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("expected `key = value` or `[section]`", lineno, 1);
        if (out.empty()) throw ScenarioError("entry before any [section] header", lineno, 1);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ScenarioError("missing key before `=`", lineno, 1);
        size_t vstart = eq + 1;
        while (vstart < line.size() && std::isspace(static_cast<unsigned char>(line[vstart])))
            ++vstart;
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty())
            throw ScenarioError("missing value for key `" + key + "`", lineno,
                                static_cast<int>(eq) + 2);
        out.back().entries.push_back({key, value, lineno, static_cast<int>(vstart) + 1});
    }
    return out;
}

const Entry* get(const Section& s, const std::string& key) {
    const Entry* hit = nullptr;
    for (const auto& e : s.entries) {
        if (e.key != key) continue;
        if (hit) throw ScenarioError("duplicate key `" + key + "` in [" + s.name + "]", e.line, 1);
        hit = &e;
        e.used = true;
    }
    return hit;
}

std::vector<const Entry*> get_all(const Section& s, const std::string& key) {
    std::vector<const Entry*> out;
    for (const auto& e : s.entries) {
        if (e.key != key) continue;
        e.used = true;
        out.push_back(&e);
    }
    return out;
}

const Entry& require(const Section& s, const std::string& key) {
    if (const Entry* e = get(s, key)) return *e;
    throw ScenarioError("[" + s.name + "] is missing required key `" + key + "`", s.line, 1);
}

void reject_unused(const Section& s) {
    for (const auto& e : s.entries)
        if (!e.used) throw ScenarioError("unknown key `" + e.key + "` in [" + s.name + "]", e.line, 1);
}

// ---- value parsing ------------------------------------------------------

Field field_text(const std::string& text, std::vector<std::string> vars, int line, int col) {
    try {
        return Field::parse(text, std::move(vars));
    } catch (const expr::ParseError& pe) {
        throw ScenarioError("bad expression `" + text + "`: " + pe.what(), line,
                            col + static_cast<int>(pe.offset()));
    }
}

double scalar_text(const std::string& text, int line, int col) {
    const Field f = field_text(text, {}, line, col);
    try {
        return f.value(0.0, 0.0);
    } catch (const expr::EvalError& ee) {
        throw ScenarioError("cannot evaluate `" + text + "`: " + ee.what(), line, col);
    }
}

double scalar_of(const Entry& e) { return scalar_text(e.value, e.line, e.col); }

long int_of(const Entry& e) {
    const double d = scalar_of(e);
    const double r = std::round(d);
    if (std::abs(d - r) > 1e-9) throw ScenarioError("expected an integer", e.line, e.col);
    return static_cast<long>(r);
}

bool bool_of(const Entry& e) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ScenarioError("expected `true` or `false`", e.line, e.col);
}

// Splits at top-level (paren depth zero) occurrences of `sep`.
std::vector<std::string> split_text(const std::string& value, char sep, int line, int col) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (const char c : value) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    for (const auto& p : out)
        if (p.empty()) throw ScenarioError("empty item in list", line, col);
    return out;
}

std::vector<std::string> split_parts(const Entry& e, char sep) {
    return split_text(e.value, sep, e.line, e.col);
}

// `name(arg, arg, ...)` with arguments split at top-level commas.
struct Call {
    std::string name;
    std::vector<std::string> args;
};

Call parse_call(const std::string& text, int line, int col) {
    const auto open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw ScenarioError("expected `name(...)`, got `" + text + "`", line, col);
    Call call;
    call.name = trim(text.substr(0, open));
    if (call.name.empty()) throw ScenarioError("expected a name before `(`", line, col);
    const std::string inner = trim(text.substr(open + 1, text.size() - open - 2));
    if (!inner.empty()) call.args = split_text(inner, ',', line, col);
    return call;
}

// `(a, b)` with scalar entries.
Vec2 pair_text(const std::string& text, int line, int col) {
    const std::string t = trim(text);
    if (t.size() < 2 || t.front() != '(' || t.back() != ')')
        throw ScenarioError("expected a point `(u, v)`, got `" + text + "`", line, col);
    const auto parts = split_text(t.substr(1, t.size() - 2), ',', line, col);
    if (parts.size() != 2)
        throw ScenarioError("expected two coordinates in `" + text + "`", line, col);
    return {scalar_text(parts[0], line, col), scalar_text(parts[1], line, col)};
}

void expect_args(const Call& call, size_t n, int line, int col) {
    if (call.args.size() != n)
        throw ScenarioError("`" + call.name + "` takes " + std::to_string(n) + " argument" +
                                (n == 1 ? "" : "s") + ", got " + std::to_string(call.args.size()),
                            line, col);
}

// ---- surface / frame ----------------------------------------------------

catalog::CatalogEntry build_surface(const Section& s) {
    if (const Entry* cat = get(s, "catalog")) {
        std::map<std::string, double> params;
        for (const auto& e : s.entries) {
            if (e.used) continue;
            params[e.key] = scalar_of(e);
            e.used = true;
        }
        try {
            return catalog::make_surface(cat->value, params);
        } catch (const geometry::GeometryError& ge) {
            throw ScenarioError(ge.what(), cat->line, cat->col);
        }
    }

    const Entry& chart_e = require(s, "chart");
    const auto corners = split_parts(chart_e, ';');
    if (corners.size() != 4)
        throw ScenarioError("chart needs four values `u0; u1; v0; v1`", chart_e.line, chart_e.col);
    ChartRect chart;
    chart.u0 = scalar_text(corners[0], chart_e.line, chart_e.col);
    chart.u1 = scalar_text(corners[1], chart_e.line, chart_e.col);
    chart.v0 = scalar_text(corners[2], chart_e.line, chart_e.col);
    chart.v1 = scalar_text(corners[3], chart_e.line, chart_e.col);
    if (!(chart.u0 < chart.u1 && chart.v0 < chart.v1))
        throw ScenarioError("chart corners must satisfy u0 < u1 and v0 < v1", chart_e.line,
                            chart_e.col);
    if (const Entry* p = get(s, "periodic")) {
        std::istringstream toks(p->value);
        std::string tok;
        while (toks >> tok) {
            if (tok == "u")
                chart.periodic_u = true;
            else if (tok == "v")
                chart.periodic_v = true;
            else
                throw ScenarioError("periodic takes axis names `u` and/or `v`", p->line, p->col);
        }
    }

    std::vector<SingularLine> singular;
    if (const Entry* su = get(s, "singular_u"))
        for (const auto& part : split_parts(*su, ';'))
            singular.push_back({0, scalar_text(part, su->line, su->col)});
    if (const Entry* sv = get(s, "singular_v"))
        for (const auto& part : split_parts(*sv, ';'))
            singular.push_back({1, scalar_text(part, sv->line, sv->col)});

    const Entry* eE = get(s, "E");
    const Entry* eF = get(s, "F");
    const Entry* eG = get(s, "G");
    const Entry* ex = get(s, "x");
    const Entry* ey = get(s, "y");
    const Entry* ez = get(s, "z");
    const bool has_metric = eE || eF || eG;
    const bool has_embedding = ex || ey || ez;
    if (has_metric == has_embedding)
        throw ScenarioError("[surface] needs either E, F, G or x, y, z (and not both)", s.line, 1);

    catalog::CatalogEntry entry;
    entry.name = "inline";
    entry.signature = "inline surface";
    const std::vector<std::string> uv = {"u", "v"};
    try {
        if (has_embedding) {
            if (!(ex && ey && ez))
                throw ScenarioError("an embedded surface needs all of x, y, z", s.line, 1);
            geometry::Embedding emb{chart,
                                    field_text(ex->value, uv, ex->line, ex->col),
                                    field_text(ey->value, uv, ey->line, ey->col),
                                    field_text(ez->value, uv, ez->line, ez->col),
                                    singular};
            entry.embedding = emb;
            entry.metric = geometry::induced_metric(emb);
        } else {
            if (!(eE && eF && eG))
                throw ScenarioError("a metric surface needs all of E, F, G", s.line, 1);
            entry.metric = MetricPatch{chart,
                                       field_text(eE->value, uv, eE->line, eE->col),
                                       field_text(eF->value, uv, eF->line, eF->col),
                                       field_text(eG->value, uv, eG->line, eG->col),
                                       singular};
        }
        geometry::validate_metric(entry.metric);
    } catch (const geometry::GeometryError& ge) {
        throw ScenarioError(ge.what(), s.line, 1);
    }
    if (const Entry* chi = get(s, "euler_char")) entry.euler_char = static_cast<int>(int_of(*chi));
    reject_unused(s);
    return entry;
}

geometry::Frame build_frame(const MetricPatch& m, const Section* fs) {
    if (!fs) return geometry::coordinate_frame(m);
    const std::vector<std::string> uv = {"u", "v"};
    auto seed = [&](const Entry& e) {
        const auto parts = split_parts(e, ';');
        if (parts.size() != 2)
            throw ScenarioError("a frame seed needs two components `a(u,v); b(u,v)`", e.line,
                                e.col);
        return VectorField{field_text(parts[0], uv, e.line, e.col),
                           field_text(parts[1], uv, e.line, e.col)};
    };
    const VectorField X1 = seed(require(*fs, "X"));
    const VectorField Y1 = seed(require(*fs, "Y"));
    reject_unused(*fs);
    try {
        return geometry::gram_schmidt_frame(m, X1, Y1);
    } catch (const geometry::GeometryError& ge) {
        throw ScenarioError(ge.what(), fs->line, 1);
    }
}

// ---- curves -------------------------------------------------------------

SegmentPtr build_segment(const std::string& text, int line, int col) {
    const Call call = parse_call(text, line, col);
    if (call.name == "expr") {
        expect_args(call, 2, line, col);
        return boundary::expression_segment(field_text(call.args[0], {"t"}, line, col),
                                            field_text(call.args[1], {"t"}, line, col));
    }
    if (call.name == "line") {
        expect_args(call, 2, line, col);
        return boundary::line_segment(pair_text(call.args[0], line, col),
                                      pair_text(call.args[1], line, col));
    }
    if (call.name == "arc") {
        expect_args(call, 4, line, col);
        return boundary::arc_segment(pair_text(call.args[0], line, col),
                                     scalar_text(call.args[1], line, col),
                                     scalar_text(call.args[2], line, col),
                                     scalar_text(call.args[3], line, col));
    }
    if (call.name == "great_circle_arc") {
        expect_args(call, 2, line, col);
        try {
            return boundary::great_circle_arc(pair_text(call.args[0], line, col),
                                              pair_text(call.args[1], line, col));
        } catch (const boundary::CurveError& ce) {
            throw ScenarioError(ce.what(), line, col);
        }
    }
    if (call.name == "reversed") {
        expect_args(call, 1, line, col);
        return boundary::reversed(build_segment(call.args[0], line, col));
    }
    throw ScenarioError("unknown segment type `" + call.name +
                            "` (expected expr, line, arc, great_circle_arc or reversed)",
                        line, col);
}

PiecewiseCurve build_builtin(const Entry& e) {
    const Call call = parse_call(e.value, e.line, e.col);
    if (call.name == "circle") {
        expect_args(call, 3, e.line, e.col);
        return boundary::circle(scalar_text(call.args[0], e.line, e.col),
                                scalar_text(call.args[1], e.line, e.col),
                                scalar_text(call.args[2], e.line, e.col));
    }
    if (call.name == "latitude") {
        expect_args(call, 1, e.line, e.col);
        return boundary::latitude(scalar_text(call.args[0], e.line, e.col));
    }
    if (call.name == "polygon") {
        if (call.args.size() < 3)
            throw ScenarioError("polygon needs at least three vertices", e.line, e.col);
        std::vector<Vec2> vertices;
        vertices.reserve(call.args.size());
        for (const auto& arg : call.args) vertices.push_back(pair_text(arg, e.line, e.col));
        return boundary::polygon(vertices);
    }
    if (call.name == "great_circle_arc") {
        PiecewiseCurve c;
        c.segments.push_back(build_segment(e.value, e.line, e.col));
        c.closed = false;
        return c;
    }
    throw ScenarioError("unknown builtin curve `" + call.name +
                            "` (expected circle, latitude, polygon or great_circle_arc)",
                        e.line, e.col);
}

PiecewiseCurve build_curve(const Section& s, const ChartRect& chart) {
    const Entry* builtin = get(s, "builtin");
    const auto segments = get_all(s, "segment");
    if ((builtin != nullptr) == !segments.empty())
        throw ScenarioError("[" + s.name + "] needs either builtin = or segment = lines", s.line,
                            1);

    PiecewiseCurve c;
    if (builtin) {
        c = build_builtin(*builtin);
    } else {
        for (const Entry* e : segments)
            c.segments.push_back(build_segment(e->value, e->line, e->col));
        const Vec2 first = [&] {
            const auto j = c.segments.front()->at(0.0);
            return Vec2{j.u.f, j.v.f};
        }();
        const Vec2 last = [&] {
            const auto j = c.segments.back()->at(1.0);
            return Vec2{j.u.f, j.v.f};
        }();
        c.closed = chart.distance(last, first) <= 1e-9;
    }
    if (const Entry* cl = get(s, "closed")) c.closed = bool_of(*cl);
    if (const Entry* rev = get(s, "reversed"); rev && bool_of(*rev)) c = boundary::reversed(c);
    reject_unused(s);
    return c;
}

// ---- sections -> scenario ----------------------------------------------

const PiecewiseCurve& curve_ref(const Scenario& s, const std::string& name, int line, int col) {
    for (const auto& [n, c] : s.curves)
        if (n == name) return c;
    throw ScenarioError("unknown curve `" + name + "`", line, col);
}

verify::DomainSpec build_domain(const Section& sec, const Scenario& s) {
    const Entry* loops = get(sec, "loops");
    const Entry* rect = get(sec, "rect");
    const Entry* full = get(sec, "full");
    const int given = (loops ? 1 : 0) + (rect ? 1 : 0) + (full ? 1 : 0);
    if (given != 1)
        throw ScenarioError("[domain] needs exactly one of loops =, rect = or full =", sec.line, 1);

    verify::DomainSpec d;
    if (loops) {
        std::vector<PiecewiseCurve> list;
        for (const auto& name : split_parts(*loops, ';'))
            list.push_back(curve_ref(s, name, loops->line, loops->col));
        d = verify::DomainSpec::bounded(std::move(list));
    } else if (rect) {
        const auto corners = split_parts(*rect, ';');
        if (corners.size() != 4)
            throw ScenarioError("rect needs four values `u0; u1; v0; v1`", rect->line, rect->col);
        ChartRect r;
        r.u0 = scalar_text(corners[0], rect->line, rect->col);
        r.u1 = scalar_text(corners[1], rect->line, rect->col);
        r.v0 = scalar_text(corners[2], rect->line, rect->col);
        r.v1 = scalar_text(corners[3], rect->line, rect->col);
        if (!(r.u0 < r.u1 && r.v0 < r.v1))
            throw ScenarioError("rect corners must satisfy u0 < u1 and v0 < v1", rect->line,
                                rect->col);
        d = verify::DomainSpec::rectangle(r);
    } else {
        if (!bool_of(*full)) throw ScenarioError("full only accepts `true`", full->line, full->col);
        d = verify::DomainSpec::full_chart();
    }
    if (const Entry* chi = get(sec, "euler_char")) d.euler_char = static_cast<int>(int_of(*chi));
    if (const Entry* ori = get(sec, "orientation")) {
        const long o = int_of(*ori);
        if (o != 1 && o != -1)
            throw ScenarioError("orientation must be 1 or -1", ori->line, ori->col);
        d.orientation = static_cast<int>(o);
    }
    reject_unused(sec);
    return d;
}

Theorem theorem_of(const Entry& e) {
    if (e.value == "compact") return Theorem::Compact;
    if (e.value == "local") return Theorem::Local;
    if (e.value == "general") return Theorem::General;
    if (e.value == "turning") return Theorem::Turning;
    if (e.value == "holonomy") return Theorem::Holonomy;
    if (e.value == "curvature-grid") return Theorem::CurvatureGrid;
    throw ScenarioError("unknown theorem `" + e.value +
                            "` (expected compact, local, general, turning, holonomy or "
                            "curvature-grid)",
                        e.line, e.col);
}

class Config {
public:
    explicit Config(std::vector<Section> sections) : sections_(std::move(sections)) {
        for (const auto& s : sections_) {
            const bool is_curve = s.name.rfind("curve ", 0) == 0;
            static const char* known[] = {"scenario", "surface", "frame",   "domain",
                                          "quadrature", "holonomy", "turning", "grid"};
            const bool is_known =
                is_curve || std::any_of(std::begin(known), std::end(known),
                                        [&](const char* k) { return s.name == k; });
            if (!is_known) throw ScenarioError("unknown section [" + s.name + "]", s.line, 1);
        }
    }

    const Section* find(const std::string& name) const {
        const Section* hit = nullptr;
        for (const auto& s : sections_) {
            if (s.name != name) continue;
            if (hit) throw ScenarioError("duplicate [" + name + "] section", s.line, 1);
            hit = &s;
        }
        return hit;
    }

    std::vector<const Section*> curve_sections() const {
        std::vector<const Section*> out;
        for (const auto& s : sections_)
            if (s.name.rfind("curve ", 0) == 0) out.push_back(&s);
        return out;
    }

private:
    std::vector<Section> sections_;
};

}  // namespace

const PiecewiseCurve& Scenario::curve(const std::string& curve_name) const {
    for (const auto& [n, c] : curves)
        if (n == curve_name) return c;
    throw std::runtime_error("unknown curve `" + curve_name + "`");
}

Scenario parse_scenario(const std::string& text, const std::string& display_name) {
    const Config cfg{split_sections(text)};

    const Section* meta = cfg.find("scenario");
    if (!meta) throw ScenarioError("missing [scenario] section", 1, 1);

    Scenario s;
    s.name = display_name;
    if (const Entry* n = get(*meta, "name")) s.name = n->value;
    const Entry& th = require(*meta, "theorem");
    s.theorem = theorem_of(th);
    if (const Entry* tol = get(*meta, "tolerance")) {
        s.tolerance = scalar_of(*tol);
        if (!(s.tolerance > 0))
            throw ScenarioError("tolerance must be positive", tol->line, tol->col);
    }
    reject_unused(*meta);

    if (const Section* q = cfg.find("quadrature")) {
        if (const Entry* tol = get(*q, "tol")) {
            s.quad.tol = scalar_of(*tol);
            if (!(s.quad.tol > 0))
                throw ScenarioError("quadrature tol must be positive", tol->line, tol->col);
        }
        if (const Entry* depth = get(*q, "max_depth")) {
            const long d = int_of(*depth);
            if (d < 1 || d > 40)
                throw ScenarioError("max_depth must be between 1 and 40", depth->line, depth->col);
            s.quad.max_depth = static_cast<int>(d);
        }
        if (const Entry* order = get(*q, "order")) {
            if (int_of(*order) != 16)
                throw ScenarioError("only the 16-point Gauss-Legendre rule is provided",
                                    order->line, order->col);
        }
        if (const Entry* par = get(*q, "parallel")) s.quad.parallel = bool_of(*par);
        reject_unused(*q);
    }

    const Section* surf = cfg.find("surface");
    const Section* frame = cfg.find("frame");
    if (surf) {
        s.surface = build_surface(*surf);
        s.frame = build_frame(s.surface->metric, frame);
        s.omega = connection::connection_form(s.surface->metric, *s.frame);
    } else if (frame) {
        throw ScenarioError("[frame] requires a [surface]", frame->line, 1);
    }

    const ChartRect closure_chart =
        surf ? s.surface->metric.chart : ChartRect{-1e9, 1e9, -1e9, 1e9, false, false};
    for (const Section* cs : cfg.curve_sections()) {
        const std::string cname = trim(cs->name.substr(6));
        if (cname.empty()) throw ScenarioError("curve sections are named: [curve NAME]", cs->line, 1);
        for (const auto& [existing, c] : s.curves)
            if (existing == cname)
                throw ScenarioError("duplicate curve name `" + cname + "`", cs->line, 1);
        s.curves.emplace_back(cname, build_curve(*cs, closure_chart));
    }

    if (const Section* d = cfg.find("domain")) {
        s.domain = build_domain(*d, s);
        s.has_domain = true;
    }
    if (const Section* h = cfg.find("holonomy")) {
        const Entry& loop = require(*h, "loop");
        curve_ref(s, loop.value, loop.line, loop.col);
        s.holonomy_loop = loop.value;
        if (const Entry* ex = get(*h, "expected")) s.holonomy_expected = scalar_of(*ex);
        reject_unused(*h);
    }
    if (const Section* t = cfg.find("turning")) {
        const Entry& curve = require(*t, "curve");
        curve_ref(s, curve.value, curve.line, curve.col);
        s.turning_curve = curve.value;
        reject_unused(*t);
    }
    if (const Section* g = cfg.find("grid")) {
        if (const Entry* n = get(*g, "n")) {
            const long v = int_of(*n);
            if (v < 1 || v > 4096)
                throw ScenarioError("grid n must be between 1 and 4096", n->line, n->col);
            s.grid_n = static_cast<int>(v);
        }
        if (const Entry* out = get(*g, "out")) s.grid_out = out->value;
        reject_unused(*g);
    }

    auto need_surface = [&] {
        if (!s.surface) throw ScenarioError("this theorem needs a [surface] section", 1, 1);
    };
    switch (s.theorem) {
        case Theorem::Compact:
            need_surface();
            if (!s.surface->euler_char)
                throw ScenarioError("a compact scenario needs a surface with euler_char", 1, 1);
            break;
        case Theorem::Local:
            need_surface();
            if (!s.has_domain || s.domain.kind != verify::DomainSpec::Kind::Loops ||
                s.domain.loops.size() != 1)
                throw ScenarioError("a local scenario needs a [domain] with a single loop", 1, 1);
            break;
        case Theorem::General:
            need_surface();
            if (!s.has_domain || s.domain.kind != verify::DomainSpec::Kind::Loops)
                throw ScenarioError("a general scenario needs a [domain] with loops", 1, 1);
            if (!s.domain.euler_char)
                throw ScenarioError("a general scenario needs the domain's euler_char", 1, 1);
            break;
        case Theorem::Turning:
            if (s.turning_curve.empty())
                throw ScenarioError("a turning scenario needs a [turning] section", 1, 1);
            break;
        case Theorem::Holonomy:
            need_surface();
            if (s.holonomy_loop.empty())
                throw ScenarioError("a holonomy scenario needs a [holonomy] section", 1, 1);
            if (!s.holonomy_expected && !s.has_domain)
                throw ScenarioError(
                    "a holonomy scenario needs expected = or a [domain] to compare against", 1, 1);
            break;
        case Theorem::CurvatureGrid:
            need_surface();
            break;
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path, 0, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string display = path;
    if (const auto slash = display.find_last_of('/'); slash != std::string::npos)
        display.erase(0, slash + 1);
    if (const auto dot = display.find_last_of('.'); dot != std::string::npos && dot > 0)
        display.erase(dot);
    return parse_scenario(buf.str(), display);
}

namespace {

std::vector<double> sample_curvature(const geometry::MetricPatch& m, const geometry::Frame& f,
                                     int n, bool parallel) {
    const Field k = connection::gauss_curvature(m, f);
    const ChartRect& c = m.chart;
    return quadrature::sample_grid([&](double u, double v) { return k.value(u, v); }, c.u0, c.u1,
                                   c.v0, c.v1, n, parallel);
}

std::string grid_csv_of(const std::vector<double>& values, const ChartRect& c, int n) {
    std::string out = "u,v,k\n";
    const double du = c.width() / n, dv = c.height() / n;
    for (int i = 0; i < n; ++i) {
        const double u = c.u0 + (i + 0.5) * du;
        for (int j = 0; j < n; ++j) {
            const double v = c.v0 + (j + 0.5) * dv;
            out += report::format17(u);
            out += ',';
            out += report::format17(v);
            out += ',';
            out += report::format17(values[static_cast<size_t>(i) * n + j]);
            out += '\n';
        }
    }
    return out;
}

}  // namespace

std::string curvature_grid_csv(const geometry::MetricPatch& m, const geometry::Frame& f, int n,
                               bool parallel) {
    return grid_csv_of(sample_curvature(m, f, n, parallel), m.chart, n);
}

verify::VerificationReport run_scenario(const Scenario& s) {
    verify::VerificationReport rep;
    switch (s.theorem) {
        case Theorem::Compact:
            rep = verify::verify_compact(*s.surface, s.tolerance, s.quad);
            break;
        case Theorem::Local:
            rep = verify::verify_local(s.surface->metric, *s.frame, *s.omega, s.domain,
                                       s.tolerance, s.quad);
            break;
        case Theorem::General:
            rep = verify::verify_general(s.surface->metric, *s.frame, *s.omega, s.domain,
                                         s.tolerance, s.quad);
            break;
        case Theorem::Turning:
            rep = verify::verify_turning(s.curve(s.turning_curve), s.tolerance);
            break;
        case Theorem::Holonomy: {
            const MetricPatch& m = s.surface->metric;
            quadrature::QuadStats stats{};
            const transport::TransportMap hol =
                transport::holonomy(*s.omega, s.curve(s.holonomy_loop), m.chart, s.quad, &stats);
            double reference = 0;
            if (s.has_domain) {
                quadrature::QuadStats rstats{};
                reference = verify::integrate_curvature(m, *s.frame, *s.omega, s.domain, s.quad,
                                                        &rstats);
                stats.merge(rstats);
            } else {
                reference = *s.holonomy_expected;
            }
            rep.lhs = hol.angle.mod_two_pi();
            rep.rhs = RotationAngle{reference}.mod_two_pi();
            rep.residual = hol.angle.circle_distance_to(reference);
            rep.tolerance = s.tolerance;
            rep.pass = rep.residual < rep.tolerance;
            rep.quadrature_panels = stats.panels;
            rep.quadrature_max_depth = stats.max_depth;
            break;
        }
        case Theorem::CurvatureGrid: {
            const MetricPatch& m = s.surface->metric;
            const auto values = sample_curvature(m, *s.frame, s.grid_n, s.quad.parallel);
            if (!s.grid_out.empty()) {
                std::ofstream out(s.grid_out, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write grid output: " + s.grid_out);
                out << grid_csv_of(values, m.chart, s.grid_n);
            }
            rep.lhs = *std::max_element(values.begin(), values.end());
            rep.rhs = *std::min_element(values.begin(), values.end());
            rep.residual = 0;
            rep.tolerance = s.tolerance;
            rep.pass = true;
            rep.quadrature_panels = static_cast<long>(values.size());
            rep.quadrature_max_depth = 0;
            break;
        }
    }
    rep.scenario = s.name;
    return rep;
}

}  // namespace curvatura::scenario
