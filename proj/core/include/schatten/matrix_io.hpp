#pragma once

#include <filesystem>
#include <string>

#include "schatten/matrix.hpp"

namespace schatten {

/// Matrix file format: {"n": <int>, "entries": [[re, im], ...]} with n*n
/// entries in row-major order. Doubles are written in shortest round-trip
/// form, so a written matrix reloads bit-for-bit.
std::string matrix_to_json(const ComplexMatrix& m);

/// Throws ParseError on malformed text, wrong entry count or non-square payload.
ComplexMatrix matrix_from_json(const std::string& text);

ComplexMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m);

} // namespace schatten
