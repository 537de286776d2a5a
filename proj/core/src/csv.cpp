#include "peer/csv.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace peer {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_missing_token(std::string_view field) { return field.empty() || field == "NA"; }

bool parse_double(std::string_view field, double* out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_fields(std::string_view line,
                                           std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

struct ParsedCsv {
  std::vector<double> values;  // row-major; NaN marks missing
  std::vector<char> observed;
  Index rows = 0;
  Index cols = 0;
};

ParsedCsv parse_csv(const std::string& path, bool allow_missing) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInputError("csv: cannot open " + path);
  }
  ParsedCsv out;
  std::string line;
  std::vector<std::string_view> fields;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    split_fields(line, fields);

    if (first_content_row) {
      // Header auto-detection: any field that is neither numeric nor a
      // missing token makes this a header row.
      bool header = false;
      for (const auto f : fields) {
        double v;
        if (!is_missing_token(f) && !parse_double(f, &v)) {
          header = true;
          break;
        }
      }
      first_content_row = false;
      if (header) continue;
    }

    if (out.cols == 0) {
      out.cols = static_cast<Index>(fields.size());
    } else if (static_cast<Index>(fields.size()) != out.cols) {
      throw InvalidInputError("csv: ragged row " + std::to_string(out.rows + 1) +
                              " in " + path);
    }
    for (const auto f : fields) {
      if (is_missing_token(f)) {
        if (!allow_missing) {
          throw InvalidInputError("csv: missing value not allowed in " + path);
        }
        out.values.push_back(0.0);
        out.observed.push_back(0);
        continue;
      }
      double v;
      if (!parse_double(f, &v)) {
        throw InvalidInputError("csv: cannot parse field '" + std::string(f) +
                                "' in " + path);
      }
      out.values.push_back(v);
      out.observed.push_back(1);
    }
    ++out.rows;
  }
  if (out.rows == 0) {
    throw InvalidInputError("csv: no data rows in " + path);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Matrix read_matrix_csv(const std::string& path) {
  const ParsedCsv parsed = parse_csv(path, /*allow_missing=*/false);
  Matrix out(parsed.rows, parsed.cols);
  std::size_t flat = 0;
  for (Index i = 0; i < parsed.rows; ++i) {
    for (Index j = 0; j < parsed.cols; ++j) {
      out(i, j) = parsed.values[flat++];
    }
  }
  if (!all_finite(out)) {
    throw InvalidInputError("csv: non-finite value in " + path);
  }
  return out;
}

ObservedMatrix read_observed_csv(const std::string& path) {
  const ParsedCsv parsed = parse_csv(path, /*allow_missing=*/true);
  Matrix values(parsed.rows, parsed.cols);
  BoolArray mask(parsed.rows, parsed.cols);
  std::size_t flat = 0;
  for (Index i = 0; i < parsed.rows; ++i) {
    for (Index j = 0; j < parsed.cols; ++j, ++flat) {
      values(i, j) = parsed.values[flat];
      mask(i, j) = parsed.observed[flat] != 0;
    }
  }
  return ObservedMatrix::with_mask(values, std::move(mask));
}

void write_matrix_csv(const std::string& path, const Matrix& a) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInputError("csv: cannot write " + path);
  }
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
  if (!out) {
    throw NumericError("csv: write failed for " + path);
  }
}

void write_observed_csv(const std::string& path, const Matrix& values,
                        const BoolArray& mask) {
  if (values.rows() != mask.rows() || values.cols() != mask.cols()) {
    throw InvalidInputError("write_observed_csv: shape mismatch");
  }
  std::ofstream out(path);
  if (!out) {
    throw InvalidInputError("csv: cannot write " + path);
  }
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ',';
      if (mask(i, j)) {
        out << format_double(values(i, j));
      } else {
        out << "NA";
      }
    }
    out << '\n';
  }
  if (!out) {
    throw NumericError("csv: write failed for " + path);
  }
}

}  // namespace peer
