#pragma once

#include <string>

#include "gstokes/csr_matrix.hpp"

namespace gstokes {

/// Reads a Matrix Market coordinate file with real entries.
/// "general" files are taken as-is; "symmetric" files store one triangle
/// and are expanded to the full matrix. Other fields are rejected.
CsrMatrix mm_read(const std::string& path);

/// Writes a coordinate-format "real general" file with 1-based indices.
/// Values are printed with 17 significant digits so a read round-trips
/// bit-identically.
void mm_write(const std::string& path, const CsrMatrix& A);

} // namespace gstokes
