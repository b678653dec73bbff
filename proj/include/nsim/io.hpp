#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "nsim/dataset.hpp"

namespace nsim {

// Feature transform learned at ingestion and replayed on prediction inputs.
struct Preprocessing {
  std::size_t raw_dim = 0;
  std::vector<std::size_t> kept_columns;  // raw column indices kept
  std::vector<double> means;              // per kept column, only when standardized
  std::vector<double> stds;
  bool standardized = false;
  bool log_response = false;

  static Preprocessing identity(std::size_t dim);
  Matrix apply(const Matrix& raw) const;
  std::size_t output_dim() const { return kept_columns.size(); }
};

struct IngestOptions {
  bool standardize = false;
  bool log_response = false;
};

struct LoadedDataset {
  Dataset data;
  std::vector<std::string> feature_names;
  std::string response_name;
  Preprocessing preprocessing;
  std::vector<std::string> warnings;
};

/// Header row, numeric feature columns, response in the last column.
/// --standardize maps every feature to (x - mean) / std (population std) and
/// drops constant columns with a warning; --log-response replaces y by log(y).
LoadedDataset ingest_csv(const std::string& path, const IngestOptions& options = {});
LoadedDataset parse_csv(std::istream& in, const IngestOptions& options, const std::string& source);

/// Feature rows for prediction: accepts `expected_dim` columns, or one more
/// (a trailing response column, which is ignored).
Matrix read_feature_csv(const std::string& path, std::size_t expected_dim);

void export_csv(const std::string& path, const Dataset& data, std::vector<std::string> header = {});
std::string to_csv(const Dataset& data, std::vector<std::string> header = {});

/// 17 significant digits; lossless for doubles.
std::string format_double(double value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace nsim
