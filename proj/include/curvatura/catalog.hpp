// Built-in surface catalog.
//
//   plane                      flat square chart, E = G = 1, F = 0
//   sphere(radius)             polar chart, poles excluded as singular lines
//   bumpy_sphere(radius, eps, m)  radially perturbed sphere, metric induced
//                              from the embedding
//   torus(radius, minor_radius)   flat chart, both axes periodic
//   poincare_disk(rho_max)     conformal disk model, constant curvature -1
//
// Each entry carries its chart, metric, optional embedding, and (for the
// closed surfaces) the declared Euler characteristic.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvatura/geometry.hpp"

namespace curvatura::catalog {

using geometry::Embedding;
using geometry::MetricPatch;

struct CatalogEntry {
    std::string name;         // e.g. "sphere"
    std::string signature;    // e.g. "sphere(radius = 1)"
    MetricPatch metric;
    std::optional<Embedding> embedding;
    std::optional<int> euler_char;  // declared for the closed surfaces
};

struct CatalogInfo {
    std::string name;
    std::string parameters;  // "radius = 1, eps = 0.1, m = 3"
    std::string description;
};

// Parameters not present in `params` take their documented defaults.
// Unknown surface names or invalid parameters raise GeometryError.
CatalogEntry make_surface(const std::string& name, const std::map<std::string, double>& params = {});

const std::vector<CatalogInfo>& catalog_list();

}  // namespace curvatura::catalog
