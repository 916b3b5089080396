#include "phaseforge/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "phaseforge/errors.hpp"

namespace phaseforge::io {

namespace {

constexpr char kMagic[4] = {'P', 'F', 'G', '1'};
constexpr std::size_t kHeaderBytes = 16;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t get_le(const std::string& buf, std::size_t pos, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + static_cast<std::size_t>(i)])) << (8 * i);
  }
  return v;
}

}  // namespace

ScalarField field_of_matrix(const AnyMatrix& m) {
  return std::holds_alternative<Matrix<double>>(m) ? ScalarField::Real : ScalarField::Complex;
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_complex(const Complex& v) {
  std::string out = format_real(v.real());
  out += std::signbit(v.imag()) ? '-' : '+';
  out += format_real(std::abs(v.imag()));
  out += 'j';
  return out;
}

bool parse_cell(std::string_view token, Complex& value, bool& is_complex) {
  token = trim(token);
  if (token.empty()) return false;
  if (token.back() != 'j') {
    double re = 0.0;
    if (!parse_double(token, re)) return false;
    value = Complex(re, 0.0);
    is_complex = false;
    return true;
  }
  token.remove_suffix(1);
  // The imaginary part starts at the last sign that is not an exponent sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = token.size(); i-- > 1;) {
    if ((token[i] == '+' || token[i] == '-') && token[i - 1] != 'e' && token[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  double re = 0.0, im = 0.0;
  if (split == std::string_view::npos) {
    if (!parse_double(token, im)) return false;
  } else {
    if (!parse_double(token.substr(0, split), re) || !parse_double(token.substr(split), im)) return false;
  }
  value = Complex(re, im);
  is_complex = true;
  return true;
}

template <Scalar S>
void write_csv(std::ostream& out, const Matrix<S>& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      if constexpr (std::same_as<S, double>) {
        out << format_real(m(i, j));
      } else {
        out << format_complex(m(i, j));
      }
    }
    out << '\n';
  }
}

AnyMatrix read_csv(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::vector<Complex>> rows;
  bool any_complex = false;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    ++line_no;
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + pos, end - pos);
    if (!trim(line).empty()) {
      std::vector<Complex> row;
      std::size_t cell_start = 0;
      while (true) {
        const std::size_t comma = line.find(',', cell_start);
        const std::size_t cell_end = comma == std::string_view::npos ? line.size() : comma;
        Complex v;
        bool is_complex = false;
        if (!parse_cell(line.substr(cell_start, cell_end - cell_start), v, is_complex)) {
          throw ParseError("malformed CSV cell '" + std::string(trim(line.substr(cell_start, cell_end - cell_start))) + "'",
                           line_no, pos + cell_start);
        }
        any_complex = any_complex || is_complex;
        row.push_back(v);
        if (comma == std::string_view::npos) break;
        cell_start = comma + 1;
      }
      if (!rows.empty() && row.size() != rows.front().size()) {
        throw ParseError("CSV row has " + std::to_string(row.size()) + " cells, expected " +
                             std::to_string(rows.front().size()),
                         line_no, pos);
      }
      rows.push_back(std::move(row));
    }
    pos = end + 1;
  }
  if (rows.empty()) throw ParseError("CSV input holds no rows", line_no, text.size());

  const auto r = static_cast<Index>(rows.size());
  const auto c = static_cast<Index>(rows.front().size());
  if (any_complex) {
    Matrix<Complex> m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
  }
  Matrix<double> m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].real();
  return m;
}

template <Scalar S>
void write_binary(std::ostream& out, const Matrix<S>& m) {
  out.write(kMagic, 4);
  put_u32(out, std::same_as<S, double> ? 0u : 1u);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if constexpr (std::same_as<S, double>) {
        put_f64(out, m(i, j));
      } else {
        put_f64(out, m(i, j).real());
        put_f64(out, m(i, j).imag());
      }
    }
  }
}

AnyMatrix read_binary(std::istream& in) {
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kHeaderBytes) throw ParseError("binary input truncated inside the 16-byte header", 0, buf.size());
  if (buf.compare(0, 4, kMagic, 4) != 0) throw ParseError("bad magic, expected PFG1", 0, 0);
  const auto tag = get_le(buf, 4, 4);
  if (tag > 1) throw ParseError("unknown field tag " + std::to_string(tag), 0, 4);
  const auto rows = static_cast<Index>(get_le(buf, 8, 4));
  const auto cols = static_cast<Index>(get_le(buf, 12, 4));
  const std::size_t per = tag == 0 ? 8 : 16;
  const std::size_t expected = kHeaderBytes + static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * per;
  if (buf.size() < expected) {
    throw ParseError("binary payload truncated: " + std::to_string(expected) + " bytes expected", 0, buf.size());
  }
  if (buf.size() > expected) throw ParseError("trailing bytes after binary payload", 0, expected);

  auto value_at = [&](std::size_t k) { return std::bit_cast<double>(get_le(buf, kHeaderBytes + 8 * k, 8)); };
  if (tag == 0) {
    Matrix<double> m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = value_at(static_cast<std::size_t>(i * cols + j));
    return m;
  }
  Matrix<Complex> m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const auto k = static_cast<std::size_t>(2 * (i * cols + j));
      m(i, j) = Complex(value_at(k), value_at(k + 1));
    }
  }
  return m;
}

Format format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? Format::Csv : Format::Binary;
}

void write_matrix(const std::filesystem::path& path, const AnyMatrix& m) {
  const auto format = format_for(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
  std::visit(
      [&](const auto& mat) {
        if (format == Format::Csv) {
          write_csv(out, mat);
        } else {
          write_binary(out, mat);
        }
      },
      m);
  if (!out) throw InvalidArgument("failed writing '" + path.string() + "'");
}

AnyMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  return format_for(path) == Format::Csv ? read_csv(in) : read_binary(in);
}

template <>
Matrix<double> as<double>(const AnyMatrix& m) {
  if (const auto* real = std::get_if<Matrix<double>>(&m)) return *real;
  throw InvalidArgument("expected real-valued data, found complex");
}

template <>
Matrix<Complex> as<Complex>(const AnyMatrix& m) {
  if (const auto* real = std::get_if<Matrix<double>>(&m)) return real->cast<Complex>();
  return std::get<Matrix<Complex>>(m);
}

template void write_csv<double>(std::ostream&, const Matrix<double>&);
template void write_csv<Complex>(std::ostream&, const Matrix<Complex>&);
template void write_binary<double>(std::ostream&, const Matrix<double>&);
template void write_binary<Complex>(std::ostream&, const Matrix<Complex>&);

}  // namespace phaseforge::io
