#include "sparseloc/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "sparseloc/errors.hpp"

namespace sparseloc::csv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text == "nan" || text == "NaN" || text == "NAN") return std::nan("");
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote_field(fields[i]);
  }
  out << '\n';
}

std::vector<std::string> split_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    std::vector<std::string> row;
    row.reserve(m.cols);
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(format_double(m.values[r * m.cols + c]));
    write_row(out, row);
  }
}

Matrix read_matrix(std::istream& in) {
  Matrix m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_row(line);
    if (m.rows == 0) {
      m.cols = fields.size();
    } else if (fields.size() != m.cols) {
      throw ParseError("expected " + std::to_string(m.cols) + " columns, got " + std::to_string(fields.size()),
                       lineno);
    }
    for (const auto& f : fields) {
      const auto v = parse_double(f);
      if (!v) throw ParseError("not a number: '" + f + "'", lineno);
      m.values.push_back(*v);
    }
    ++m.rows;
  }
  return m;
}

}  // namespace sparseloc::csv
