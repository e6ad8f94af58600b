#include <gosdpca/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gosdpca {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line, Index line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) throw InputError("CSV line " + std::to_string(line_no) + ": unterminated quote");
  cells.push_back(trim(cell));
  return cells;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Index CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<Index>(it - header.begin());
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto cells = split_line(line, line_no);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      throw InputError("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw InputError("'" + path + "' has no header row");
  return table;
}

double parse_cell(const std::string& cell, Index row, const std::string& column) {
  const std::string s = trim(cell);
  const std::string l = lower(s);
  if (s.empty() || l == "na" || l == "nan" || s == ".") return std::numeric_limits<double>::quiet_NaN();
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  double value = 0;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError("unparseable cell '" + s + "' at row " + std::to_string(row) + ", column '" +
                     column + "'");
  return value;
}

Index transform_lag(int code) {
  switch (code) {
    case 1: case 4: return 0;
    case 2: case 5: return 1;
    case 3: case 6: case 7: return 2;
    default: throw InputError("transform code must be 1..7, got " + std::to_string(code));
  }
}

VectorXd apply_transform(const VectorXd& x, int code, const std::string& column) {
  const Index lag = transform_lag(code);
  const Index n = x.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  VectorXd v = x;
  if (code >= 4 && code <= 6) {
    for (Index i = 0; i < n; ++i) {
      if (std::isnan(v(i))) continue;
      if (!(v(i) > 0))
        throw InputError("column '" + column + "': non-positive value at row " + std::to_string(i) +
                         " under log transform code " + std::to_string(code));
      v(i) = std::log(v(i));
    }
  }
  VectorXd out = VectorXd::Constant(n, nan);
  for (Index i = lag; i < n; ++i) {
    switch (code) {
      case 1: case 4: out(i) = v(i); break;
      case 2: case 5: out(i) = v(i) - v(i - 1); break;
      case 3: case 6: out(i) = (v(i) - v(i - 1)) - (v(i - 1) - v(i - 2)); break;
      case 7: {
        if (v(i - 1) == 0 || v(i - 2) == 0)
          throw InputError("column '" + column + "': zero denominator at row " + std::to_string(i) +
                           " under transform code 7");
        out(i) = (v(i) / v(i - 1) - 1.0) - (v(i - 1) / v(i - 2) - 1.0);
        break;
      }
      default: break;
    }
  }
  return out;
}

LoadedDataset load_csv(const DatasetSpec& spec) {
  CsvTable table = read_csv_table(spec.path);
  const Index date_col = spec.date_column.empty() ? -1 : table.column(spec.date_column);
  if (!spec.date_column.empty() && date_col < 0)
    throw InputError("date column '" + spec.date_column + "' not found in '" + spec.path + "'");
  if (table.column(spec.target_column) < 0)
    throw InputError("target column '" + spec.target_column + "' not found in '" + spec.path + "'");
  for (const auto& [name, code] : spec.transform_codes) {
    if (table.column(name) < 0) throw InputError("transform code given for unknown column '" + name + "'");
    transform_lag(code);
  }

  std::map<std::string, int> codes;
  if (!table.rows.empty() && lower(table.rows.front().front()).rfind("transform", 0) == 0) {
    const auto& row = table.rows.front();
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (static_cast<Index>(j) == date_col || row[j].empty()) continue;
      const double c = parse_cell(row[j], 0, table.header[j]);
      if (!(c >= 1 && c <= 7 && c == std::floor(c)))
        throw InputError("column '" + table.header[j] + "': bad transform code '" + row[j] + "'");
      codes[table.header[j]] = static_cast<int>(c);
    }
    table.rows.erase(table.rows.begin());
  }
  for (const auto& [name, code] : spec.transform_codes) codes[name] = code;

  std::vector<Index> data_cols;
  for (Index j = 0; j < static_cast<Index>(table.header.size()); ++j)
    if (j != date_col) data_cols.push_back(j);

  LoadedDataset out;
  LoadReport& report = out.report;
  const auto n = static_cast<Index>(table.rows.size());
  report.rows_read = n;

  MatrixXd values(n, static_cast<Index>(data_cols.size()));
  Index lead = 0;
  for (std::size_t k = 0; k < data_cols.size(); ++k) {
    const Index j = data_cols[k];
    const std::string& name = table.header[static_cast<std::size_t>(j)];
    VectorXd raw(n);
    for (Index i = 0; i < n; ++i)
      raw(i) = parse_cell(table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], i + 1, name);
    const auto it = codes.find(name);
    const int code = it == codes.end() ? 1 : it->second;
    lead = std::max(lead, transform_lag(code));
    values.col(static_cast<Index>(k)) = apply_transform(raw, code, name);
  }
  report.leading_rows_dropped = std::min(lead, n);

  std::vector<Index> keep_cols;
  for (std::size_t k = 0; k < data_cols.size(); ++k) {
    const std::string& name = table.header[static_cast<std::size_t>(data_cols[k])];
    const bool incomplete =
        values.col(static_cast<Index>(k)).tail(n - report.leading_rows_dropped).hasNaN();
    if (spec.drop_incomplete_columns && incomplete && name != spec.target_column) {
      report.columns_dropped.push_back(name);
      continue;
    }
    keep_cols.push_back(static_cast<Index>(k));
  }

  std::vector<Index> keep_rows;
  for (Index i = report.leading_rows_dropped; i < n; ++i) {
    bool ok = true;
    for (const Index k : keep_cols) ok = ok && !std::isnan(values(i, k));
    if (ok) keep_rows.push_back(i);
    else ++report.missing_rows_dropped;
  }

  SeriesMatrix& s = out.series;
  s.values.resize(static_cast<Index>(keep_rows.size()), static_cast<Index>(keep_cols.size()));
  for (std::size_t c = 0; c < keep_cols.size(); ++c) {
    const Index k = keep_cols[c];
    s.names.push_back(table.header[static_cast<std::size_t>(data_cols[static_cast<std::size_t>(k)])]);
    for (std::size_t r = 0; r < keep_rows.size(); ++r)
      s.values(static_cast<Index>(r), static_cast<Index>(c)) = values(keep_rows[r], k);
  }
  for (const Index i : keep_rows)
    s.index.push_back(date_col >= 0 ? table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(date_col)]
                                    : std::to_string(i + 1));
  out.target = s.column(spec.target_column);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_series_csv(const std::string& path, const SeriesMatrix& series,
                      const std::string& index_name) {
  std::ostringstream os;
  os << index_name;
  for (const auto& name : series.names) os << ',' << name;
  os << '\n';
  for (Index i = 0; i < series.rows(); ++i) {
    os << (static_cast<std::size_t>(i) < series.index.size() ? series.index[static_cast<std::size_t>(i)]
                                                             : std::to_string(i + 1));
    for (Index j = 0; j < series.cols(); ++j) os << ',' << format_double(series.values(i, j));
    os << '\n';
  }
  write_text_file(path, os.str());
}

}  // namespace gosdpca
