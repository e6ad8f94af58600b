#pragma once

// CSV ingestion with FRED-MD style stationarity transforms, and CSV output.

#include <gosdpca/common.hpp>

#include <map>
#include <string>
#include <vector>

namespace gosdpca {

struct DatasetSpec {
  std::string path;
  std::string target_column;
  std::map<std::string, int> transform_codes;  // column -> 1..7; default 1
  std::string date_column;                     // optional; becomes the row index
  bool drop_incomplete_columns = false;        // drop predictors with missing values instead of rows
};

struct LoadReport {
  Index rows_read = 0;
  Index leading_rows_dropped = 0;  // consumed by differencing
  Index missing_rows_dropped = 0;
  std::vector<std::string> columns_dropped;
};

struct LoadedDataset {
  SeriesMatrix series;
  Index target = 0;
  LoadReport report;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  Index column(const std::string& name) const;  // -1 when absent
};

/// Comma-separated, header row, optional double-quoted cells.
CsvTable read_csv_table(const std::string& path);

/// Parses a decimal real; empty, NA, NaN and "." read as missing (NaN).
/// Throws InputError naming the row and column otherwise.
double parse_cell(const std::string& cell, Index row, const std::string& column);

/// Transform codes: 1 none, 2 diff, 3 second diff, 4 log, 5 log diff,
/// 6 log second diff, 7 diff of (x_t / x_{t-1} - 1). Output has the input
/// length; rows consumed by differencing are NaN.
VectorXd apply_transform(const VectorXd& x, int code, const std::string& column);

/// Rows consumed at the start by `code`.
Index transform_lag(int code);

/// A row whose first cell is "Transform:" right after the header supplies
/// per-column codes (FRED-MD layout); explicit codes in the spec win.
LoadedDataset load_csv(const DatasetSpec& spec);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Header `index_name,<names...>`; index labels default to 1..n.
void write_series_csv(const std::string& path, const SeriesMatrix& series,
                      const std::string& index_name = "t");

void write_text_file(const std::string& path, const std::string& text);

}  // namespace gosdpca
