// curvatura command-line tool: catalog listing, theorem verification runs,
// holonomy and curvature queries, and scenario-file execution.
//
// Exit codes: 0 all checks pass, 1 at least one check failed, 2 the run
// itself could not be completed (bad input, validation error, quadrature
// non-convergence, unwritable output).

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "curvatura/boundary.hpp"
#include "curvatura/catalog.hpp"
#include "curvatura/connection.hpp"
#include "curvatura/expr.hpp"
#include "curvatura/report.hpp"
#include "curvatura/scenario.hpp"
#include "curvatura/transport.hpp"
#include "curvatura/verify.hpp"

namespace {

using curvatura::RotationAngle;
using curvatura::boundary::PiecewiseCurve;
using curvatura::expr::Field;
using curvatura::geometry::Vec2;
using curvatura::report::format17;
using curvatura::verify::VerificationReport;
namespace boundary = curvatura::boundary;
namespace catalog = curvatura::catalog;
namespace connection = curvatura::connection;
namespace geometry = curvatura::geometry;
namespace quadrature = curvatura::quadrature;
namespace report = curvatura::report;
namespace scenario = curvatura::scenario;
namespace transport = curvatura::transport;
namespace verify = curvatura::verify;

// ---- small parsing helpers ---------------------------------------------

double scalar(const std::string& text) {
    return Field::parse(text, {}).value(0.0, 0.0);
}

std::vector<std::string> split_top(const std::string& text, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (const char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Vec2 parse_pair(const std::string& text) {
    std::string t = text;
    while (!t.empty() && t.front() == ' ') t.erase(t.begin());
    while (!t.empty() && t.back() == ' ') t.pop_back();
    if (t.size() < 2 || t.front() != '(' || t.back() != ')')
        throw std::runtime_error("expected a point `(u, v)`, got `" + text + "`");
    const auto parts = split_top(t.substr(1, t.size() - 2), ',');
    if (parts.size() != 2) throw std::runtime_error("expected two coordinates in `" + text + "`");
    return {scalar(parts[0]), scalar(parts[1])};
}

// Inline curve syntax: `latitude:THETA`, `circle:CX,CY,R`,
// `polygon:(u1,v1),(u2,v2),...`, and `reversed:<spec>`.
PiecewiseCurve parse_curve_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::runtime_error("curve spec needs the form `name:arguments`, got `" + spec + "`");
    const std::string name = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (name == "reversed") return boundary::reversed(parse_curve_spec(rest));
    if (name == "latitude") return boundary::latitude(scalar(rest));
    if (name == "circle") {
        const auto parts = split_top(rest, ',');
        if (parts.size() != 3)
            throw std::runtime_error("circle spec needs `circle:CX,CY,R`, got `" + spec + "`");
        return boundary::circle(scalar(parts[0]), scalar(parts[1]), scalar(parts[2]));
    }
    if (name == "polygon") {
        const auto parts = split_top(rest, ',');
        std::vector<Vec2> vertices;
        for (const auto& p : parts) vertices.push_back(parse_pair(p));
        if (vertices.size() < 3) throw std::runtime_error("polygon needs at least three vertices");
        return boundary::polygon(vertices);
    }
    throw std::runtime_error("unknown curve spec `" + name +
                             "` (expected latitude, circle, polygon or reversed)");
}

// ---- shared option groups ----------------------------------------------

struct SurfaceOpts {
    std::string name;
    double radius = 0, minor_radius = 0, eps = 0, m = 0, rho_max = 0;
    CLI::Option* o_radius = nullptr;
    CLI::Option* o_minor = nullptr;
    CLI::Option* o_eps = nullptr;
    CLI::Option* o_m = nullptr;
    CLI::Option* o_rho = nullptr;
    std::vector<std::string> extra;

    void attach(CLI::App* sub, bool required) {
        auto* s = sub->add_option("--surface", name, "catalog surface name");
        if (required) s->required();
        o_radius = sub->add_option("--radius", radius, "surface parameter");
        o_minor = sub->add_option("--minor-radius", minor_radius, "surface parameter");
        o_eps = sub->add_option("--eps", eps, "surface parameter");
        o_m = sub->add_option("--m", m, "surface parameter");
        o_rho = sub->add_option("--rho-max", rho_max, "surface parameter");
        sub->add_option("--param", extra, "extra surface parameter NAME=VALUE (repeatable)");
    }

    catalog::CatalogEntry make() const {
        std::map<std::string, double> params;
        if (o_radius->count()) params["radius"] = radius;
        if (o_minor->count()) params["minor_radius"] = minor_radius;
        if (o_eps->count()) params["eps"] = eps;
        if (o_m->count()) params["m"] = m;
        if (o_rho->count()) params["rho_max"] = rho_max;
        for (const auto& kv : extra) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0)
                throw std::runtime_error("--param needs NAME=VALUE, got `" + kv + "`");
            params[kv.substr(0, eq)] = scalar(kv.substr(eq + 1));
        }
        return catalog::make_surface(name, params);
    }
};

struct QuadOpts {
    double tol = 1e-9;
    int max_depth = 12;
    bool serial = false;

    void attach(CLI::App* sub) {
        sub->add_option("--quad-tol", tol, "quadrature tolerance");
        sub->add_option("--max-depth", max_depth, "quadrature refinement depth limit");
        sub->add_flag("--serial", serial, "run quadrature serially");
    }

    quadrature::QuadOptions make() const { return {tol, max_depth, !serial}; }
};

struct OutputOpts {
    std::string format = "json";
    std::string out;

    void attach(CLI::App* sub) {
        sub->add_option("--format", format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", out, "write the report to this path instead of stdout");
    }

    void emit(const std::vector<VerificationReport>& reports) const {
        const std::string text =
            format == "csv" ? report::to_csv(reports) : report::to_json(reports);
        if (out.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write output file: " + out);
        f << text;
    }
};

int emit_and_grade(const OutputOpts& output, const std::vector<VerificationReport>& reports) {
    output.emit(reports);
    for (const auto& r : reports)
        if (!r.pass) return 1;
    return 0;
}

int jobs_default() {
    if (const char* env = std::getenv("CURVATURA_JOBS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// ---- subcommand actions -------------------------------------------------

int run_catalog_list() {
    for (const auto& info : catalog::catalog_list()) {
        std::cout << info.name << "(" << info.parameters << ")\n    " << info.description << "\n";
    }
    return 0;
}

struct ScenarioJob {
    scenario::Scenario scen;
    std::string file;
};

int run_scenarios(const std::vector<std::string>& files, int jobs, const OutputOpts& output) {
    std::vector<ScenarioJob> jobs_list;
    jobs_list.reserve(files.size());
    for (const auto& f : files) jobs_list.push_back({scenario::load_scenario(f), f});

    const size_t n = jobs_list.size();
    std::vector<VerificationReport> reports(n);
    std::vector<std::string> errors(n);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                reports[i] = scenario::run_scenario(jobs_list[i].scen);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const size_t pool = std::min<size_t>(std::max(jobs, 1), n);
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (size_t i = 0; i < pool; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    bool failed = false;
    for (size_t i = 0; i < n; ++i) {
        if (errors[i].empty()) continue;
        std::cerr << "error: " << jobs_list[i].file << ": " << errors[i] << "\n";
        failed = true;
    }
    if (failed) return 2;
    return emit_and_grade(output, reports);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvatura: orthonormal-frame surface geometry toolkit"};
    app.require_subcommand(1);

    // catalog list
    auto* cat = app.add_subcommand("catalog", "surface catalog");
    cat->require_subcommand(1);
    auto* cat_list = cat->add_subcommand("list", "list the built-in surfaces");

    // verify <theorem>
    auto* ver = app.add_subcommand("verify", "verify a theorem");
    ver->require_subcommand(1);

    auto* ver_compact = ver->add_subcommand("compact", "total curvature of a closed surface");
    SurfaceOpts compact_surface;
    compact_surface.attach(ver_compact, true);
    QuadOpts compact_quad;
    compact_quad.attach(ver_compact);
    OutputOpts compact_output;
    compact_output.attach(ver_compact);
    double compact_tol = 1e-6;
    ver_compact->add_option("--tol", compact_tol, "pass/fail tolerance");

    auto* ver_local = ver->add_subcommand("local", "single-loop boundary statement");
    SurfaceOpts local_surface;
    local_surface.attach(ver_local, false);
    QuadOpts local_quad;
    local_quad.attach(ver_local);
    OutputOpts local_output;
    local_output.attach(ver_local);
    double local_tol = 1e-6;
    std::string local_loop, local_scenario;
    ver_local->add_option("--tol", local_tol, "pass/fail tolerance");
    ver_local->add_option("--loop", local_loop, "boundary loop (inline curve spec)");
    ver_local->add_option("--scenario", local_scenario, "scenario file describing the run");

    auto* ver_general = ver->add_subcommand("general", "multi-loop boundary statement");
    SurfaceOpts general_surface;
    general_surface.attach(ver_general, false);
    QuadOpts general_quad;
    general_quad.attach(ver_general);
    OutputOpts general_output;
    general_output.attach(ver_general);
    double general_tol = 1e-8;
    std::vector<std::string> general_loops;
    std::string general_scenario;
    int general_chi = 1;
    CLI::Option* general_chi_opt = ver_general->add_option(
        "--chi", general_chi, "Euler characteristic of the bounded domain");
    ver_general->add_option("--tol", general_tol, "pass/fail tolerance");
    ver_general->add_option("--loop", general_loops, "boundary loop (repeatable)");
    ver_general->add_option("--scenario", general_scenario, "scenario file describing the run");

    auto* ver_turning = ver->add_subcommand("turning", "total turning of a closed plane curve");
    OutputOpts turning_output;
    turning_output.attach(ver_turning);
    double turning_tol = 1e-8;
    std::string turning_curve;
    ver_turning->add_option("--tol", turning_tol, "pass/fail tolerance");
    ver_turning->add_option("--curve", turning_curve, "closed plane curve (inline curve spec)")
        ->required();

    // holonomy
    auto* hol = app.add_subcommand("holonomy", "parallel-transport holonomy of a loop");
    SurfaceOpts hol_surface;
    hol_surface.attach(hol, true);
    QuadOpts hol_quad;
    hol_quad.attach(hol);
    double hol_tol = 1e-6;
    std::string hol_loop, hol_expected;
    bool hol_enclosed = false;
    hol->add_option("--loop", hol_loop, "loop (inline curve spec)")->required();
    hol->add_option("--expected", hol_expected, "expected rotation class, radians");
    hol->add_flag("--compare-enclosed", hol_enclosed,
                  "compare against the curvature integral over the enclosed region");
    hol->add_option("--tol", hol_tol, "comparison tolerance");

    // curvature
    auto* curv = app.add_subcommand("curvature", "sample the Gauss curvature to a CSV grid");
    SurfaceOpts curv_surface;
    curv_surface.attach(curv, true);
    int curv_grid = 64;
    std::string curv_out;
    bool curv_serial = false;
    curv->add_option("--grid", curv_grid, "samples per axis")->check(CLI::Range(1, 4096));
    curv->add_option("--out", curv_out, "output path (default: stdout)");
    curv->add_flag("--serial", curv_serial, "sample serially");

    // run
    auto* run = app.add_subcommand("run", "execute scenario files");
    std::vector<std::string> run_files;
    int run_jobs = jobs_default();
    OutputOpts run_output;
    run_output.attach(run);
    run->add_option("files", run_files, "scenario files")->required()->expected(-1);
    run->add_option("--jobs", run_jobs, "maximum concurrent scenarios")->check(CLI::Range(1, 256));

    CLI11_PARSE(app, argc, argv);

    try {
        if (cat_list->parsed()) return run_catalog_list();

        if (ver_compact->parsed()) {
            const auto entry = compact_surface.make();
            const auto rep = verify::verify_compact(entry, compact_tol, compact_quad.make());
            return emit_and_grade(compact_output, {rep});
        }

        if (ver_local->parsed()) {
            VerificationReport rep;
            if (!local_scenario.empty()) {
                const auto scen = scenario::load_scenario(local_scenario);
                if (scen.theorem != scenario::Theorem::Local)
                    throw std::runtime_error("scenario `" + local_scenario +
                                             "` does not declare the local theorem");
                rep = scenario::run_scenario(scen);
            } else {
                if (local_surface.name.empty() || local_loop.empty())
                    throw std::runtime_error(
                        "verify local needs either --scenario or --surface plus --loop");
                const auto entry = local_surface.make();
                const auto frame = geometry::coordinate_frame(entry.metric);
                const auto omega = connection::connection_form(entry.metric, frame);
                const auto domain =
                    verify::DomainSpec::bounded({parse_curve_spec(local_loop)});
                rep = verify::verify_local(entry.metric, frame, omega, domain, local_tol,
                                           local_quad.make());
            }
            return emit_and_grade(local_output, {rep});
        }

        if (ver_general->parsed()) {
            VerificationReport rep;
            if (!general_scenario.empty()) {
                const auto scen = scenario::load_scenario(general_scenario);
                if (scen.theorem != scenario::Theorem::General)
                    throw std::runtime_error("scenario `" + general_scenario +
                                             "` does not declare the general theorem");
                rep = scenario::run_scenario(scen);
            } else {
                if (general_surface.name.empty() || general_loops.empty() ||
                    !general_chi_opt->count())
                    throw std::runtime_error(
                        "verify general needs either --scenario or --surface, --loop and --chi");
                const auto entry = general_surface.make();
                const auto frame = geometry::coordinate_frame(entry.metric);
                const auto omega = connection::connection_form(entry.metric, frame);
                std::vector<PiecewiseCurve> loops;
                for (const auto& spec : general_loops) loops.push_back(parse_curve_spec(spec));
                const auto domain = verify::DomainSpec::bounded(std::move(loops), general_chi);
                rep = verify::verify_general(entry.metric, frame, omega, domain, general_tol,
                                             general_quad.make());
            }
            return emit_and_grade(general_output, {rep});
        }

        if (ver_turning->parsed()) {
            const auto rep = verify::verify_turning(parse_curve_spec(turning_curve), turning_tol);
            return emit_and_grade(turning_output, {rep});
        }

        if (hol->parsed()) {
            const auto entry = hol_surface.make();
            const auto frame = geometry::coordinate_frame(entry.metric);
            const auto omega = connection::connection_form(entry.metric, frame);
            const auto loop = parse_curve_spec(hol_loop);
            boundary::validate_curve(entry.metric, loop);
            const auto map =
                transport::holonomy(omega, loop, entry.metric.chart, hol_quad.make());
            std::cout << "lift = " << format17(map.angle.lift) << "\n";
            std::cout << "mod_two_pi = " << format17(map.angle.mod_two_pi()) << "\n";
            bool pass = true;
            if (!hol_expected.empty()) {
                const double expected = scalar(hol_expected);
                const double residual = map.angle.circle_distance_to(expected);
                std::cout << "expected = " << format17(RotationAngle{expected}.mod_two_pi())
                          << "\n";
                std::cout << "residual = " << format17(residual) << "\n";
                pass = pass && residual < hol_tol;
            }
            if (hol_enclosed) {
                const auto domain = verify::DomainSpec::bounded({loop});
                const double enclosed =
                    verify::integrate_curvature(entry.metric, frame, omega, domain,
                                                hol_quad.make());
                const double residual = map.angle.circle_distance_to(enclosed);
                std::cout << "enclosed = " << format17(enclosed) << "\n";
                std::cout << "enclosed_mod_two_pi = "
                          << format17(RotationAngle{enclosed}.mod_two_pi()) << "\n";
                std::cout << "residual_vs_enclosed = " << format17(residual) << "\n";
                pass = pass && residual < hol_tol;
            }
            if (!hol_expected.empty() || hol_enclosed)
                std::cout << "result = " << (pass ? "pass" : "fail") << "\n";
            return pass ? 0 : 1;
        }

        if (curv->parsed()) {
            const auto entry = curv_surface.make();
            const auto frame = geometry::coordinate_frame(entry.metric);
            const std::string csv =
                scenario::curvature_grid_csv(entry.metric, frame, curv_grid, !curv_serial);
            if (curv_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream f(curv_out, std::ios::binary);
                if (!f) throw std::runtime_error("cannot write output file: " + curv_out);
                f << csv;
            }
            return 0;
        }

        if (run->parsed()) return run_scenarios(run_files, run_jobs, run_output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
