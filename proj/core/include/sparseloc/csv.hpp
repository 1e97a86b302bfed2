#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sparseloc::csv {

/// Shortest decimal text that parses back to exactly `v`; "nan" for NaN.
std::string format_double(double v);

/// Parses a full field as a double ("nan" accepted). Returns nullopt on garbage.
std::optional<double> parse_double(std::string_view text);

/// Quotes a field when it contains a comma, quote, CR or LF (RFC 4180).
std::string quote_field(std::string_view field);

/// Writes one record terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Splits one line into fields, honouring RFC 4180 quoting. Quoted fields may not
/// span lines here; none of our formats need that.
std::vector<std::string> split_row(std::string_view line);

/// Reads a matrix written by write_matrix: one row per line, `nan` for missing.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
};
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

}  // namespace sparseloc::csv
