// Report emission: verification reports as JSON or CSV with a fixed field
// order and 17-significant-digit numbers (see docs/report-schema.md).
// Output is deterministic byte-for-byte for identical inputs.

#pragma once

#include <string>
#include <vector>

#include "curvatura/verify.hpp"

namespace curvatura::report {

// 17 significant digits, the round-trip-exact form used everywhere.
std::string format17(double x);

std::string to_json(const std::vector<verify::VerificationReport>& reports);
std::string to_csv(const std::vector<verify::VerificationReport>& reports);

}  // namespace curvatura::report
