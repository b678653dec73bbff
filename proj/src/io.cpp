#include "nsim/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "nsim/error.hpp"

namespace nsim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no, std::size_t column, const std::string& source) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    fail(ErrorKind::data, "parse_error",
         source + ": row " + std::to_string(line_no) + ", column " + std::to_string(column + 1) +
             ": non-numeric cell '" + std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    fail(ErrorKind::data, "non_finite",
         source + ": row " + std::to_string(line_no) + ", column " + std::to_string(column + 1) +
             ": non-finite value");
  }
  return value;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& in, const std::string& source) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (!have_header) {
      for (auto c : cells) table.header.emplace_back(c);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      fail(ErrorKind::data, "ragged_row",
           source + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
               " cells, header has " + std::to_string(table.header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_cell(cells[c], line_no, c, source);
    table.rows.push_back(std::move(row));
  }
  if (!have_header) fail(ErrorKind::data, "empty_file", source + ": missing header row");
  if (table.rows.empty()) fail(ErrorKind::data, "empty_sample", source + ": no data rows");
  return table;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::data, "io_error", "cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

Preprocessing Preprocessing::identity(std::size_t dim) {
  Preprocessing p;
  p.raw_dim = dim;
  p.kept_columns.resize(dim);
  std::iota(p.kept_columns.begin(), p.kept_columns.end(), std::size_t{0});
  return p;
}

Matrix Preprocessing::apply(const Matrix& raw) const {
  if (static_cast<std::size_t>(raw.cols()) != raw_dim) {
    fail(ErrorKind::data, "dimension_mismatch",
         "input has " + std::to_string(raw.cols()) + " feature columns, expected " + std::to_string(raw_dim));
  }
  Matrix out(raw.rows(), static_cast<Index>(kept_columns.size()));
  for (std::size_t c = 0; c < kept_columns.size(); ++c) {
    const auto col = raw.col(static_cast<Index>(kept_columns[c]));
    if (standardized) {
      out.col(static_cast<Index>(c)) = (col.array() - means[c]) / stds[c];
    } else {
      out.col(static_cast<Index>(c)) = col;
    }
  }
  return out;
}

LoadedDataset parse_csv(std::istream& in, const IngestOptions& options, const std::string& source) {
  const Table table = read_table(in, source);
  if (table.header.size() < 2) {
    fail(ErrorKind::data, "no_feature_columns", source + ": need at least one feature column and a response");
  }
  const std::size_t raw_dim = table.header.size() - 1;
  const auto n = static_cast<Index>(table.rows.size());

  Matrix raw(n, static_cast<Index>(raw_dim));
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < raw_dim; ++c) raw(i, static_cast<Index>(c)) = row[c];
    y[i] = row[raw_dim];
  }

  LoadedDataset out;
  out.response_name = table.header.back();
  out.preprocessing = Preprocessing::identity(raw_dim);
  out.preprocessing.log_response = options.log_response;

  if (options.log_response) {
    for (Index i = 0; i < n; ++i) {
      if (!(y[i] > 0.0)) {
        fail(ErrorKind::data, "non_positive_response",
             source + ": --log-response needs positive responses (row " + std::to_string(i + 2) + ")");
      }
      y[i] = std::log(y[i]);
    }
  }

  if (options.standardize) {
    auto& p = out.preprocessing;
    p.standardized = true;
    p.kept_columns.clear();
    for (std::size_t c = 0; c < raw_dim; ++c) {
      const auto col = raw.col(static_cast<Index>(c));
      const double mean = col.mean();
      const double sd = std::sqrt((col.array() - mean).square().mean());
      if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
        out.warnings.push_back("dropping constant feature column '" + table.header[c] + "'");
        continue;
      }
      p.kept_columns.push_back(c);
      p.means.push_back(mean);
      p.stds.push_back(sd);
    }
    if (p.kept_columns.empty()) {
      fail(ErrorKind::data, "no_feature_columns", source + ": every feature column is constant");
    }
  }

  for (auto c : out.preprocessing.kept_columns) out.feature_names.push_back(table.header[c]);
  out.data.features = out.preprocessing.apply(raw);
  out.data.responses = std::move(y);
  out.data.validate();
  return out;
}

LoadedDataset ingest_csv(const std::string& path, const IngestOptions& options) {
  auto in = open_input(path);
  return parse_csv(in, options, path);
}

Matrix read_feature_csv(const std::string& path, std::size_t expected_dim) {
  auto in = open_input(path);
  const Table table = read_table(in, path);
  const std::size_t cols = table.header.size();
  if (cols != expected_dim && cols != expected_dim + 1) {
    fail(ErrorKind::data, "dimension_mismatch",
         path + ": expected " + std::to_string(expected_dim) + " feature columns (optionally plus a response), got " +
             std::to_string(cols));
  }
  Matrix out(static_cast<Index>(table.rows.size()), static_cast<Index>(expected_dim));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t c = 0; c < expected_dim; ++c) out(static_cast<Index>(i), static_cast<Index>(c)) = table.rows[i][c];
  }
  return out;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string to_csv(const Dataset& data, std::vector<std::string> header) {
  if (header.empty()) {
    for (std::size_t d = 0; d < data.dim(); ++d) header.push_back("x" + std::to_string(d + 1));
    header.emplace_back("y");
  }
  if (header.size() != data.dim() + 1) {
    fail(ErrorKind::usage, "length_mismatch", "CSV header must name every feature and the response");
  }
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (Index i = 0; i < data.features.rows(); ++i) {
    for (Index d = 0; d < data.features.cols(); ++d) {
      out += format_double(data.features(i, d));
      out += ',';
    }
    out += format_double(data.responses[i]);
    out += '\n';
  }
  return out;
}

void export_csv(const std::string& path, const Dataset& data, std::vector<std::string> header) {
  write_text_file(path, to_csv(data, std::move(header)));
}

std::string read_text_file(const std::string& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::data, "io_error", "cannot open '" + path + "' for writing");
  out << contents;
  if (!out) fail(ErrorKind::data, "io_error", "failed writing '" + path + "'");
}

}  // namespace nsim
