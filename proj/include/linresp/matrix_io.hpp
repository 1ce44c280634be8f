#pragma once

#include "linresp/stochastic_matrix.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace linresp::io {

// Coordinate text format: a header line "n nnz", then nnz lines "i j value"
// with 1-based indices. Values are written with 17 significant digits.

[[nodiscard]] SparseMatrix read_matrix(std::istream& in);
[[nodiscard]] SparseMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(std::ostream& out, const SparseMatrix& m);
void write_matrix(const std::filesystem::path& path, const SparseMatrix& m);

// One value per line.
[[nodiscard]] Vector read_vector(std::istream& in);
[[nodiscard]] Vector read_vector(const std::filesystem::path& path);
void write_vector(std::ostream& out, const Vector& v);
void write_vector(const std::filesystem::path& path, const Vector& v);

[[nodiscard]] std::string format_double(double value);

}  // namespace linresp::io
