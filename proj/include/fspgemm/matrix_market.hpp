#pragma once

#include <filesystem>
#include <iosfwd>

#include "fspgemm/matrix.hpp"

namespace fspgemm {

// Reads a coordinate Matrix Market stream (real, integer or pattern; general or
// symmetric). Indices become 0-based, symmetric storage is expanded to general,
// pattern entries get value 1.0. Duplicate coordinates are rejected.
CooMatrix parse_matrix_market(std::istream& in);
CooMatrix read_matrix_market(const std::filesystem::path& path);

// Writes "coordinate real general" with values that round-trip exactly.
void write_matrix_market(const CsrMatrix& m, std::ostream& out);
void write_matrix_market(const CsrMatrix& m, const std::filesystem::path& path);

}  // namespace fspgemm
