#include <gosdpca/common.hpp>

#include <algorithm>

namespace gosdpca {

Index SeriesMatrix::column(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InputError("no column named '" + name + "'");
  return static_cast<Index>(it - names.begin());
}

SeriesMatrix SeriesMatrix::slice_rows(Index first, Index count) const {
  if (first < 0 || count < 0 || first + count > rows())
    throw InputError("slice_rows: range out of bounds");
  SeriesMatrix out;
  out.values = values.middleRows(first, count);
  out.names = names;
  if (!index.empty())
    out.index.assign(index.begin() + first, index.begin() + first + count);
  return out;
}

TargetSplit split_target(const SeriesMatrix& series, Index target) {
  if (target < 0 || target >= series.cols())
    throw InputError("split_target: target column " + std::to_string(target) +
                     " out of range");
  TargetSplit split;
  split.y = series.values.col(target);
  split.x.resize(series.rows(), series.cols() - 1);
  Index k = 0;
  for (Index c = 0; c < series.cols(); ++c) {
    if (c == target) continue;
    split.x.col(k++) = series.values.col(c);
    split.predictor_columns.push_back(c);
  }
  return split;
}

}  // namespace gosdpca
