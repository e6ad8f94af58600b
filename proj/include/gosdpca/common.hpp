#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace gosdpca {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raised when a caller violates a documented precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by iterative solvers that exhaust their iteration budget.
/// The last iterate travels with the exception.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, VectorXd last_iterate)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}

  const VectorXd& last_iterate() const noexcept { return last_iterate_; }

 private:
  VectorXd last_iterate_;
};

/// Column-major panel of n aligned observations of m named series.
/// One column is designated the target by the caller; the others are
/// the predictors.
struct SeriesMatrix {
  MatrixXd values;
  std::vector<std::string> names;
  std::vector<std::string> index;  // optional time labels, one per row

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  /// Column position of `name`, or throws InputError.
  Index column(const std::string& name) const;

  /// Rows [first, first + count).
  SeriesMatrix slice_rows(Index first, Index count) const;
};

/// Target series and the predictor block obtained by removing it.
struct TargetSplit {
  VectorXd y;
  MatrixXd x;
  std::vector<Index> predictor_columns;  // column of `x` -> column in the panel
};

TargetSplit split_target(const SeriesMatrix& series, Index target);

}  // namespace gosdpca
