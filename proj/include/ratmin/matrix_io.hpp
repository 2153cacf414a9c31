#pragma once

#include <filesystem>
#include <iosfwd>

#include "ratmin/dense.hpp"

namespace ratmin {

// CSV layout: first line holds k, then k lines of k comma-separated decimals.
// Values use the shortest decimal form that reads back to the same double.
DenseMatrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const DenseMatrix& m);

// Binary layout: k as a little-endian uint64, then k*k little-endian IEEE-754
// doubles in row-major order.
DenseMatrix read_matrix_bin(std::istream& in);
void write_matrix_bin(std::ostream& out, const DenseMatrix& m);

/// Dispatches on extension: ".bin" is binary, anything else CSV.
DenseMatrix load_matrix(const std::filesystem::path& p);
void save_matrix(const std::filesystem::path& p, const DenseMatrix& m);

/// One value per line, or comma separated on one or more lines.
Vector read_vector_csv(std::istream& in);
Vector load_vector(const std::filesystem::path& p);

}  // namespace ratmin
