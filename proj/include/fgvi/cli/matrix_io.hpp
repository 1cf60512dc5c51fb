#pragma once

#include <iosfwd>
#include <string>

#include "fgvi/linalg.hpp"

namespace fgvi::cli {

/// Plain-text matrix: first line "n", then n lines of n whitespace-separated
/// decimals. Blank lines after the last row are allowed; anything else is a
/// DomainError naming the offending line.
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);

/// Same format, "%.17g" per entry.
void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix_file(const std::string& path, const Matrix& m);

}  // namespace fgvi::cli
