#pragma once

// Benchmark forecasters: diffusion-index PCA (SW), autocovariance
// eigenanalysis factors (LYB) and BIC-tuned Lasso.

#include <gosdpca/common.hpp>
#include <gosdpca/sdpca.hpp>

namespace gosdpca {

/// Standardized principal-component factors of the predictor block.
FactorPanel sw_factors(const MatrixXd& x, Index r);

/// sum_{l=1..q} S(l) S(l)^T with S(l) the lag-l autocovariance of the
/// demeaned panel, 1/n normalization. Dense p x p; used for small p and in
/// tests.
MatrixXd lyb_matrix(const MatrixXd& x, Index q);

/// Loadings are the top-r eigenvectors of lyb_matrix(x, q); for p > n they
/// are computed through a low-rank factor of that matrix instead of forming it.
FactorPanel lyb_factors(const MatrixXd& x, Index q, Index r);

struct LassoFit {
  double intercept = 0;
  VectorXd coefficients;  // original scale
  double lambda = 0;
  double bic = 0;
  Index nonzero_count = 0;
  Index sweeps = 0;
  bool path_truncated = false;  // lasso_bic: a later path point failed to converge
};

struct LassoOptions {
  double tolerance = 1e-8;     // max standardized coefficient change
  Index max_sweeps = 10000;
  bool early_stop = true;      // lasso_bic: end the path once the fit saturates
};

/// Minimizes (2n)^-1 ||y - b0 - Xb||^2 + lambda ||b||_1 over standardized
/// columns by cyclic coordinate descent; coefficients are returned on the
/// original scale.
LassoFit lasso_coordinate_descent(const MatrixXd& x, const VectorXd& y, double lambda,
                                  const LassoOptions& options = {});

/// Warm-started path fits; returns the fit minimizing n ln(RSS/n) + df ln n.
/// The path is cut short once 99.9% of the deviance is explained, the
/// explained fraction stalls, or df reaches n - 1. A convergence failure
/// past the first point also ends the path; the best fit so far is kept.
LassoFit lasso_bic(const MatrixXd& x, const VectorXd& y, Index path_len = 100,
                   const LassoOptions& options = {});

/// Design for the Lasso forecaster: row for origin t holds
/// (y_t..y_{t-q+1}, x_{t,.}, ..., x_{t-q+1,.}); rows cover t = q-1 .. last.
MatrixXd lagged_design(const VectorXd& y, const MatrixXd& x, Index q, Index first, Index last);

}  // namespace gosdpca
