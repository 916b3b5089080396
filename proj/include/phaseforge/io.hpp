#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "phaseforge/types.hpp"

namespace phaseforge::io {

/// A matrix whose field is only known at run time (read from a file).
using AnyMatrix = std::variant<Matrix<double>, Matrix<Complex>>;

ScalarField field_of_matrix(const AnyMatrix& m);

/// Shortest round-trip decimal; locale independent. Complex values print as "re+imj".
std::string format_real(double v);
std::string format_complex(const Complex& v);

/// Parses one CSV cell. Accepts plain reals and "re+imj"/"re-imj" tokens.
/// Returns false on malformed input.
bool parse_cell(std::string_view token, Complex& value, bool& is_complex);

/// CSV: one row per line, cells separated by ',', '\n' line endings.
template <Scalar S>
void write_csv(std::ostream& out, const Matrix<S>& m);
AnyMatrix read_csv(std::istream& in);

/// Binary: 16-byte little-endian header {"PFG1", u32 field (0 real, 1 complex),
/// u32 rows, u32 cols}, followed by row-major little-endian float64 values
/// (complex as re, im pairs).
template <Scalar S>
void write_binary(std::ostream& out, const Matrix<S>& m);
AnyMatrix read_binary(std::istream& in);

enum class Format { Csv, Binary };

/// ".csv" is CSV; anything else is binary.
Format format_for(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const AnyMatrix& m);
AnyMatrix read_matrix(const std::filesystem::path& path);

/// Requires the stored field to be exactly S, except that real data may be read as complex.
template <Scalar S>
Matrix<S> as(const AnyMatrix& m);

}  // namespace phaseforge::io
