// Scenario files: a flat key-value format with sections declaring a
// surface, a frame, curves, a domain and one theorem to verify; plus the
// runner that executes a parsed scenario into a VerificationReport.
// The grammar is documented in docs/scenario-format.md.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvatura/boundary.hpp"
#include "curvatura/catalog.hpp"
#include "curvatura/connection.hpp"
#include "curvatura/geometry.hpp"
#include "curvatura/quadrature.hpp"
#include "curvatura/verify.hpp"

namespace curvatura::scenario {

class ScenarioError : public std::runtime_error {
public:
    // line 0 marks errors with no source position (e.g. an unreadable file).
    ScenarioError(const std::string& what, int line, int col)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                                            std::to_string(col) + ")"
                                      : what),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_, col_;
};

enum class Theorem { Compact, Local, General, Turning, Holonomy, CurvatureGrid };

struct Scenario {
    std::string name;
    Theorem theorem = Theorem::Compact;
    double tolerance = 1e-6;
    quadrature::QuadOptions quad;

    std::optional<catalog::CatalogEntry> surface;
    std::optional<geometry::Frame> frame;
    std::optional<connection::OneForm> omega;

    std::vector<std::pair<std::string, boundary::PiecewiseCurve>> curves;  // declaration order
    verify::DomainSpec domain;
    bool has_domain = false;

    std::string holonomy_loop;
    std::optional<double> holonomy_expected;  // expected class, radians
    std::string turning_curve;
    int grid_n = 32;
    std::string grid_out;

    const boundary::PiecewiseCurve& curve(const std::string& curve_name) const;
};

// Parses scenario text; `display_name` appears in error messages.
Scenario parse_scenario(const std::string& text, const std::string& display_name = "scenario");

Scenario load_scenario(const std::string& path);

// Executes the scenario's theorem and returns its report (report.scenario is
// the scenario's declared name).  Curvature-grid scenarios also write their
// CSV grid when an output path was declared.
verify::VerificationReport run_scenario(const Scenario& s);

// n x n cell-centred samples of the Gauss curvature over the chart, as CSV
// text with header "u,v,k" and 17-significant-digit values.
std::string curvature_grid_csv(const geometry::MetricPatch& m, const geometry::Frame& f, int n,
                               bool parallel = true);

}  // namespace curvatura::scenario
