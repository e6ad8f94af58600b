#pragma once

// Group orthogonal greedy selection with HDAIC stopping, and the peeling
// loop that reruns it on a shrinking candidate pool.

#include <gosdpca/common.hpp>

#include <optional>
#include <vector>

namespace gosdpca {

/// Lag-block predictors and the aligned response for h-step screening.
/// Row t of group j is (x_{t+q1-1,j}, ..., x_{t,j}); the response row is
/// y_{t+q1-1+h} (0-based t).
struct GroupDesign {
  std::vector<MatrixXd> groups;
  VectorXd response;
  Index q1 = 0;
  Index h = 0;
  Index n = 0;
  std::vector<Index> predictor_columns;  // group -> panel column

  Index rows() const { return response.size(); }
  Index size() const { return static_cast<Index>(groups.size()); }
};

GroupDesign build_group_design(const SeriesMatrix& series, Index target, Index q1, Index h);

/// Same stencil applied to a bare response vector and predictor block.
GroupDesign build_group_design(const VectorXd& y, const MatrixXd& x, Index q1, Index h);

/// Subtracts the column means of every group and of the response, which is
/// the same as carrying an unpenalized intercept through the projections.
GroupDesign center(GroupDesign design);

/// Orthonormal bases of each group's column space; empty for all-zero groups.
std::vector<MatrixXd> group_bases(const GroupDesign& design, double rank_tol = 1e-10);

/// One greedy step: the candidate whose column space removes the most of
/// `residual`, lowest index on ties.
Index goga_step(const VectorXd& residual, const GroupDesign& design,
                const std::vector<Index>& candidates);

Index goga_step(const VectorXd& residual, const std::vector<MatrixXd>& bases,
                const std::vector<Index>& candidates);

/// (1 + C k ln(p_total) / n_eff) * sigma2
double hdaic(double sigma2, Index k, Index p_total, Index n_eff, double C);

/// ceil(5 sqrt(n_eff / ln p_total)) capped at floor(n_eff / (2 q1)), at least 1.
Index default_max_iterations(Index n_eff, Index p_total, Index q1);

struct SelectionResult {
  std::vector<Index> path;          // greedy order
  std::vector<double> sigma2_path;  // sigma2 after step k = 1..K
  std::vector<double> hdaic_path;   // HDAIC after step k = 1..K
  double sigma2_null = 0;           // ||y||^2 / n_eff, the k = 0 model
  Index chosen_k = 0;
  std::vector<Index> selected;      // first chosen_k entries of path
};

struct GogaOptions {
  Index max_iterations = 0;     // 0 = default_max_iterations
  double C = 2.0;
  Index p_total = 0;            // 0 = number of groups in the design
  bool allow_empty = true;      // compare against the intercept-only model
  double rank_tol = 1e-10;
};

SelectionResult goga_hdaic(const GroupDesign& design, const std::vector<Index>& candidates,
                           const GogaOptions& options = {});

/// Overload reusing precomputed group bases.
SelectionResult goga_hdaic(const GroupDesign& design, const std::vector<MatrixXd>& bases,
                           const std::vector<Index>& candidates, const GogaOptions& options);

struct PeelResult {
  std::vector<SelectionResult> rounds;
  std::vector<Index> union_set;  // sorted ascending
};

PeelResult peel(const GroupDesign& design, Index M, const GogaOptions& options = {});

}  // namespace gosdpca
