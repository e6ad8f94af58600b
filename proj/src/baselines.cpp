#include <gosdpca/baselines.hpp>

#include <gosdpca/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gosdpca {

namespace {

bool negligible_spread(double sd, double mean) {
  return sd <= 1e-12 * std::max(1.0, std::abs(mean));
}

struct Standardized {
  MatrixXd z;            // centered, unit (1/n) variance; zero for constant columns
  VectorXd mean, scale;  // scale 0 marks an excluded column
  VectorXd yc;
  double ybar = 0;
  std::vector<Index> usable;
};

Standardized standardize(const MatrixXd& x, const VectorXd& y) {
  const Index n = x.rows();
  Standardized s;
  s.mean = x.colwise().mean().transpose();
  s.scale = VectorXd::Zero(x.cols());
  s.z = x.rowwise() - s.mean.transpose();
  for (Index j = 0; j < x.cols(); ++j) {
    const double sd = std::sqrt(s.z.col(j).squaredNorm() / static_cast<double>(n));
    if (negligible_spread(sd, s.mean(j))) {
      s.z.col(j).setZero();
      continue;
    }
    s.scale(j) = sd;
    s.z.col(j) /= sd;
    s.usable.push_back(j);
  }
  s.ybar = y.mean();
  s.yc = y.array() - s.ybar;
  return s;
}

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

// Coordinate descent on the standardized problem, warm-started from `beta`
// with `resid` = yc - Z beta kept in sync. Returns the number of sweeps.
Index coordinate_descent(const Standardized& s, double lambda, VectorXd& beta, VectorXd& resid,
                         const LassoOptions& options) {
  const auto n = static_cast<double>(s.z.rows());
  Index sweeps = 0;
  auto sweep = [&](const std::vector<Index>& idx) {
    double max_delta = 0;
    for (const Index j : idx) {
      const auto col = s.z.col(j);
      const double old = beta(j);
      const double updated = soft_threshold(col.dot(resid) / n + old, lambda);
      const double delta = updated - old;
      if (delta != 0) {
        resid.noalias() -= delta * col;
        beta(j) = updated;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    ++sweeps;
    return max_delta;
  };
  auto budget_left = [&] { return sweeps < options.max_sweeps; };

  while (budget_left()) {
    if (sweep(s.usable) < options.tolerance) return sweeps;
    std::vector<Index> active;
    for (const Index j : s.usable)
      if (beta(j) != 0) active.push_back(j);
    while (budget_left() && sweep(active) >= options.tolerance) {
    }
  }
  VectorXd original = VectorXd::Zero(beta.size());
  for (const Index j : s.usable) original(j) = beta(j) / s.scale(j);
  throw ConvergenceError("lasso: no convergence after " + std::to_string(options.max_sweeps) +
                             " sweeps at lambda=" + std::to_string(lambda),
                         original);
}

LassoFit finish(const Standardized& s, const VectorXd& beta, const VectorXd& resid,
                double lambda, Index sweeps) {
  LassoFit fit;
  fit.lambda = lambda;
  fit.sweeps = sweeps;
  fit.coefficients = VectorXd::Zero(beta.size());
  double shift = 0;
  for (const Index j : s.usable) {
    if (beta(j) == 0) continue;
    fit.coefficients(j) = beta(j) / s.scale(j);
    shift += fit.coefficients(j) * s.mean(j);
    ++fit.nonzero_count;
  }
  fit.intercept = s.ybar - shift;
  const auto n = static_cast<double>(resid.size());
  const double rss = std::max(accurate_squared_norm(resid), std::numeric_limits<double>::min());
  fit.bic = n * std::log(rss / n) + static_cast<double>(fit.nonzero_count) * std::log(n);
  return fit;
}

void check_lasso_input(const MatrixXd& x, const VectorXd& y) {
  if (x.rows() != y.size()) throw InputError("lasso: design rows differ from response length");
  if (x.rows() < 2) throw InputError("lasso: need at least two observations");
}

}  // namespace

LassoFit lasso_coordinate_descent(const MatrixXd& x, const VectorXd& y, double lambda,
                                  const LassoOptions& options) {
  check_lasso_input(x, y);
  if (!(lambda >= 0)) throw InputError("lasso: lambda must be non-negative");
  const Standardized s = standardize(x, y);
  VectorXd beta = VectorXd::Zero(x.cols());
  VectorXd resid = s.yc;
  const Index sweeps = coordinate_descent(s, lambda, beta, resid, options);
  return finish(s, beta, resid, lambda, sweeps);
}

LassoFit lasso_bic(const MatrixXd& x, const VectorXd& y, Index path_len,
                   const LassoOptions& options) {
  check_lasso_input(x, y);
  if (path_len < 2) throw InputError("lasso_bic: path_len must be at least 2");
  const Standardized s = standardize(x, y);
  const auto n = static_cast<double>(x.rows());

  double lambda_max = 0;
  for (const Index j : s.usable)
    lambda_max = std::max(lambda_max, std::abs(s.z.col(j).dot(s.yc)) / n);

  VectorXd beta = VectorXd::Zero(x.cols());
  VectorXd resid = s.yc;
  LassoFit best = finish(s, beta, resid, lambda_max, 0);
  if (lambda_max == 0) return best;

  // The path stops early once the fit is nearly saturated (deviance ratio
  // >= 0.999, or a negligible gain between steps), as glmnet does.
  const double null_dev = accurate_squared_norm(s.yc);
  double prev_ratio = 0;
  const double ratio = std::pow(1e-4, 1.0 / static_cast<double>(path_len - 1));
  double lambda = lambda_max;
  for (Index k = 0; k < path_len; ++k, lambda *= ratio) {
    Index sweeps = 0;
    try {
      sweeps = coordinate_descent(s, lambda, beta, resid, options);
    } catch (const ConvergenceError&) {
      if (k == 0) throw;
      best.path_truncated = true;
      break;
    }
    LassoFit fit = finish(s, beta, resid, lambda, sweeps);
    const Index df = fit.nonzero_count;
    if (fit.bic < best.bic) best = std::move(fit);
    const double dev_ratio = null_dev > 0 ? 1.0 - accurate_squared_norm(resid) / null_dev : 1.0;
    if (options.early_stop && k > 0 &&
        (dev_ratio >= 0.999 || dev_ratio - prev_ratio < 1e-5 * dev_ratio || df >= x.rows() - 1))
      break;
    prev_ratio = dev_ratio;
  }
  return best;
}

MatrixXd lagged_design(const VectorXd& y, const MatrixXd& x, Index q, Index first, Index last) {
  if (q < 1) throw InputError("lagged_design: q must be at least 1");
  if (first < q - 1 || last >= y.size() || last < first || x.rows() != y.size())
    throw InputError("lagged_design: origin range out of bounds");
  const Index rows = last - first + 1, p = x.cols();
  MatrixXd d(rows, q + q * p);
  for (Index i = 0; i < rows; ++i) {
    const Index t = first + i;
    for (Index k = 0; k < q; ++k) d(i, k) = y(t - k);
    for (Index k = 0; k < q; ++k) d.row(i).segment(q + k * p, p) = x.row(t - k);
  }
  return d;
}

FactorPanel sw_factors(const MatrixXd& x, Index r) {
  const Index n = x.rows(), p = x.cols();
  if (n < 2) throw InputError("sw_factors: need at least two observations");
  if (r < 1 || r > std::min(n, p))
    throw InputError("sw_factors: r=" + std::to_string(r) + " out of range");

  FactorPanel out;
  out.method = FactorMethod::sw;
  out.r = r;
  out.first_row = 0;

  const VectorXd mean = x.colwise().mean().transpose();
  MatrixXd z = x.rowwise() - mean.transpose();
  std::vector<Index> kept;
  for (Index j = 0; j < p; ++j) {
    const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(n));
    if (negligible_spread(sd, mean(j))) {
      out.warnings.push_back("predictor " + std::to_string(j) + " has zero variance; dropped");
      continue;
    }
    z.col(j) /= sd;
    kept.push_back(j);
  }
  const auto k = static_cast<Index>(kept.size());
  if (r > std::min(n, k)) throw InputError("sw_factors: r exceeds the non-constant predictors");

  MatrixXd zk(n, k);
  for (Index c = 0; c < k; ++c) zk.col(c) = z.col(kept[static_cast<std::size_t>(c)]);
  const auto axes = principal_axes(zk, r);
  out.loadings = MatrixXd::Zero(p, r);
  for (Index c = 0; c < k; ++c) out.loadings.row(kept[static_cast<std::size_t>(c)]) = axes.loadings.row(c);
  out.eigenvalues = axes.values;
  out.factors = zk * axes.loadings;
  return out;
}

MatrixXd lyb_matrix(const MatrixXd& x, Index q) {
  const Index n = x.rows();
  if (q < 1) throw InputError("lyb_matrix: q must be at least 1");
  if (n <= q + 2) throw InputError("lyb_matrix: need n > q + 2");
  const MatrixXd d = x.rowwise() - x.colwise().mean();
  MatrixXd m = MatrixXd::Zero(x.cols(), x.cols());
  for (Index l = 1; l <= q; ++l) {
    const MatrixXd cov = d.bottomRows(n - l).transpose() * d.topRows(n - l) / static_cast<double>(n);
    m.noalias() += cov * cov.transpose();
  }
  return (m + m.transpose()) / 2.0;
}

FactorPanel lyb_factors(const MatrixXd& x, Index q, Index r) {
  const Index n = x.rows(), p = x.cols();
  if (q < 1) throw InputError("lyb_factors: q must be at least 1");
  if (n <= q + 2) throw InputError("lyb_factors: need n > q + 2");
  if (r < 1 || r > p) throw InputError("lyb_factors: r=" + std::to_string(r) + " out of range");

  FactorPanel out;
  out.method = FactorMethod::lyb;
  out.r = r;
  out.first_row = 0;
  const MatrixXd d = x.rowwise() - x.colwise().mean();

  if (p <= n) {
    const auto pairs = sym_eig_top(lyb_matrix(x, q), r);
    out.loadings.resize(p, r);
    out.eigenvalues.resize(r);
    for (Index k = 0; k < r; ++k) {
      out.loadings.col(k) = pairs[static_cast<std::size_t>(k)].vector;
      out.eigenvalues(k) = pairs[static_cast<std::size_t>(k)].value;
    }
  } else {
    // S(l) S(l)^T = A^T (B B^T) A / n^2 with A, B the lagged row blocks.
    // Factor B B^T = V D V^T so the sum over lags is Z Z^T with
    // Z = [A_l^T V_l D_l^{1/2} / n]_l, of width q n instead of p.
    Index width = 0;
    for (Index l = 1; l <= q; ++l) width += n - l;
    MatrixXd zt(width, p);
    Index offset = 0;
    for (Index l = 1; l <= q; ++l) {
      const Index m = n - l;
      const auto a = d.bottomRows(m);
      const auto b = d.topRows(m);
      MatrixXd gram = b * b.transpose();
      gram = (gram + gram.transpose()).eval() / 2.0;
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
      const VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
      zt.middleRows(offset, m) =
          (root.asDiagonal() * eig.eigenvectors().transpose() * a) / static_cast<double>(n);
      offset += m;
    }
    const auto axes = principal_axes(zt, r);
    out.loadings = axes.loadings;
    out.eigenvalues = axes.values * static_cast<double>(width);
  }
  out.factors = d * out.loadings;
  return out;
}

}  // namespace gosdpca
