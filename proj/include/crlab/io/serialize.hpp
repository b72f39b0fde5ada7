#pragma once

#include <string>

#include "crlab/geom/structure.hpp"

namespace crlab {

// Flat binary layout: row-major nodes, little-endian 64-bit real/imag pairs.
// A JSON sidecar (<path>.json) records chart kind, dims, periods and weight.
void save_field(const Field& f, const std::string& path);

// Loads a field saved by save_field; reconstructs the chart from the sidecar.
Field load_field(const std::string& path);

// A solved structure serializes as a bundle of field files (contact form and
// coframe components, torsion, curvature) plus manifest.json in `dir`.
void save_structure(const Structure& st, const std::string& dir);

std::string chart_kind_name(ChartKind k);

} // namespace crlab
