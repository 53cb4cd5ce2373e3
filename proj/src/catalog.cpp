#include "curvatura/catalog.hpp"

#include <cmath>
#include <cstdio>

namespace curvatura::catalog {

using geometry::ChartRect;
using geometry::GeometryError;
using geometry::SingularLine;
using expr::Field;

namespace {

const std::vector<std::string>& uv() {
    static const std::vector<std::string> vars{"u", "v"};
    return vars;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Field parse_uv(const std::string& src) { return Field::parse(src, uv()); }

double param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::string& surface, const std::map<std::string, double>& params,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : params) {
        (void)value;
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw GeometryError("surface '" + surface + "' has no parameter '" + key + "'");
    }
}

}  // namespace

CatalogEntry make_surface(const std::string& name, const std::map<std::string, double>& params) {
    CatalogEntry entry;
    entry.name = name;

    if (name == "plane") {
        reject_unknown(name, params, {});
        entry.signature = "plane";
        entry.metric.chart = ChartRect{-5, 5, -5, 5, false, false};
        entry.metric.E = parse_uv("1");
        entry.metric.F = parse_uv("0");
        entry.metric.G = parse_uv("1");
    } else if (name == "sphere") {
        reject_unknown(name, params, {"radius"});
        const double R = param(params, "radius", 1);
        if (!(R > 0)) throw GeometryError("sphere: radius must be positive");
        entry.signature = "sphere(radius = " + num(R) + ")";
        entry.metric.chart = ChartRect{0, M_PI, 0, 2 * M_PI, false, true};
        entry.metric.singular = {SingularLine{0, 0.0}, SingularLine{0, M_PI}};
        entry.metric.E = parse_uv(num(R * R));
        entry.metric.F = parse_uv("0");
        entry.metric.G = parse_uv(num(R * R) + "*sin(u)^2");
        Embedding emb;
        emb.chart = entry.metric.chart;
        emb.singular = entry.metric.singular;
        emb.x = parse_uv(num(R) + "*sin(u)*cos(v)");
        emb.y = parse_uv(num(R) + "*sin(u)*sin(v)");
        emb.z = parse_uv(num(R) + "*cos(u)");
        entry.embedding = emb;
        entry.euler_char = 2;
    } else if (name == "bumpy_sphere") {
        reject_unknown(name, params, {"radius", "eps", "m"});
        const double R = param(params, "radius", 1);
        const double eps = param(params, "eps", 0.1);
        const double m = param(params, "m", 3);
        if (!(R > 0)) throw GeometryError("bumpy_sphere: radius must be positive");
        if (!(std::fabs(eps) < 1)) throw GeometryError("bumpy_sphere: |eps| must be below 1");
        if (m != std::floor(m) || m < 0)
            throw GeometryError("bumpy_sphere: m must be a non-negative integer");
        entry.signature =
            "bumpy_sphere(radius = " + num(R) + ", eps = " + num(eps) + ", m = " + num(m) + ")";
        // Radial profile rho(u, v) = R (1 + eps sin(u)^3 cos(m v)); the cubic
        // keeps the perturbation flat at the poles, so the surface stays smooth.
        const std::string rho = "(" + num(R) + "*(1 + " + num(eps) + "*sin(u)^3*cos(" + num(m) + "*v)))";
        Embedding emb;
        emb.chart = ChartRect{0, M_PI, 0, 2 * M_PI, false, true};
        emb.singular = {SingularLine{0, 0.0}, SingularLine{0, M_PI}};
        emb.x = parse_uv(rho + "*sin(u)*cos(v)");
        emb.y = parse_uv(rho + "*sin(u)*sin(v)");
        emb.z = parse_uv(rho + "*cos(u)");
        entry.metric = induced_metric(emb);
        entry.embedding = emb;
        entry.euler_char = 2;
    } else if (name == "torus") {
        reject_unknown(name, params, {"radius", "minor_radius"});
        const double R = param(params, "radius", 2);
        const double r = param(params, "minor_radius", 1);
        if (!(R > r && r > 0)) throw GeometryError("torus: need radius > minor_radius > 0");
        entry.signature = "torus(radius = " + num(R) + ", minor_radius = " + num(r) + ")";
        entry.metric.chart = ChartRect{0, 2 * M_PI, 0, 2 * M_PI, true, true};
        entry.metric.E = parse_uv(num(r * r));
        entry.metric.F = parse_uv("0");
        entry.metric.G = parse_uv("(" + num(R) + " + " + num(r) + "*cos(u))^2");
        Embedding emb;
        emb.chart = entry.metric.chart;
        emb.x = parse_uv("(" + num(R) + " + " + num(r) + "*cos(u))*cos(v)");
        emb.y = parse_uv("(" + num(R) + " + " + num(r) + "*cos(u))*sin(v)");
        emb.z = parse_uv(num(r) + "*sin(u)");
        entry.embedding = emb;
        entry.euler_char = 0;
    } else if (name == "poincare_disk") {
        reject_unknown(name, params, {"rho_max"});
        const double a = param(params, "rho_max", 0.6);
        if (!(a > 0 && a * std::sqrt(2.0) < 1))
            throw GeometryError("poincare_disk: rho_max must lie in (0, 0.7071) so the square chart "
                                "stays inside the unit disk");
        entry.signature = "poincare_disk(rho_max = " + num(a) + ")";
        entry.metric.chart = ChartRect{-a, a, -a, a, false, false};
        const std::string conformal = "4/(1 - u^2 - v^2)^2";
        entry.metric.E = parse_uv(conformal);
        entry.metric.F = parse_uv("0");
        entry.metric.G = parse_uv(conformal);
    } else {
        throw GeometryError("unknown catalog surface '" + name + "'");
    }

    validate_metric(entry.metric);
    return entry;
}

const std::vector<CatalogInfo>& catalog_list() {
    static const std::vector<CatalogInfo> entries{
        {"plane", "", "flat square chart [-5,5]^2, E = G = 1, F = 0"},
        {"sphere", "radius = 1",
         "round sphere in polar coordinates; chart (0,pi) x (0,2pi), poles singular"},
        {"bumpy_sphere", "radius = 1, eps = 0.1, m = 3",
         "sphere with radial profile radius*(1 + eps*sin(u)^3*cos(m*v)); metric induced from the "
         "embedding"},
        {"torus", "radius = 2, minor_radius = 1",
         "torus of revolution; both chart axes periodic"},
        {"poincare_disk", "rho_max = 0.6",
         "conformal disk model, E = G = 4/(1 - u^2 - v^2)^2; constant curvature -1"},
    };
    return entries;
}

}  // namespace curvatura::catalog
