// JSON and CSV report writers.  No timestamps, no environment data: two runs
// over the same inputs emit identical bytes.

#include "curvatura/report.hpp"

#include <cstdio>

namespace curvatura::report {

std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string to_json(const std::vector<verify::VerificationReport>& reports) {
    std::string out = "[\n";
    for (size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        out += "  {\n";
        out += "    \"scenario\": \"" + escape(r.scenario) + "\",\n";
        out += "    \"lhs\": " + format17(r.lhs) + ",\n";
        out += "    \"rhs\": " + format17(r.rhs) + ",\n";
        out += "    \"residual\": " + format17(r.residual) + ",\n";
        out += "    \"tolerance\": " + format17(r.tolerance) + ",\n";
        out += std::string("    \"pass\": ") + (r.pass ? "true" : "false") + ",\n";
        out += "    \"quadrature_panels\": " + std::to_string(r.quadrature_panels) + ",\n";
        out += "    \"quadrature_max_depth\": " + std::to_string(r.quadrature_max_depth) + "\n";
        out += i + 1 == reports.size() ? "  }\n" : "  },\n";
    }
    out += "]\n";
    return out;
}

std::string to_csv(const std::vector<verify::VerificationReport>& reports) {
    std::string out =
        "scenario,lhs,rhs,residual,tolerance,pass,quadrature_panels,quadrature_max_depth\n";
    for (const auto& r : reports) {
        out += r.scenario + "," + format17(r.lhs) + "," + format17(r.rhs) + "," +
               format17(r.residual) + "," + format17(r.tolerance) + "," +
               (r.pass ? "true" : "false") + "," + std::to_string(r.quadrature_panels) + "," +
               std::to_string(r.quadrature_max_depth) + "\n";
    }
    return out;
}

}  // namespace curvatura::report
