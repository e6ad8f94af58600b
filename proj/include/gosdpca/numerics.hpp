#pragma once

// Dense kernels shared by every estimator: rank-revealing least squares,
// orthonormal bases, symmetric eigenpairs and principal axes.

#include <gosdpca/common.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace gosdpca {

inline constexpr double kDefaultRankTol = 1e-10;

template <typename Scalar>
struct LeastSquaresFit {
  VectorX<Scalar> coefficients;
  VectorX<Scalar> fitted;
  VectorX<Scalar> residuals;
  Index effective_rank = 0;
};

template <typename Scalar>
struct EigPair {
  Scalar value;
  VectorX<Scalar> vector;
};

/// Neumaier-compensated inner product.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar accurate_dot(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) throw InputError("accurate_dot: size mismatch");
  Scalar sum = 0, comp = 0;
  for (Index i = 0; i < a.size(); ++i) {
    const Scalar term = a.derived().coeff(i) * b.derived().coeff(i);
    const Scalar t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

template <typename Derived>
typename Derived::Scalar accurate_squared_norm(const Eigen::MatrixBase<Derived>& a) {
  return accurate_dot(a, a);
}

// Flip the sign so the largest-magnitude entry is positive; ties go to the
// lowest index.
template <typename Derived>
void canonicalize_sign(Eigen::MatrixBase<Derived>&& v) {
  using Scalar = typename Derived::Scalar;
  Index best = 0;
  Scalar best_abs = -1;
  for (Index i = 0; i < v.size(); ++i) {
    const Scalar a = std::abs(v.coeff(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (v.size() > 0 && v.coeff(best) < 0) v = -v;
}

template <typename Derived>
void canonicalize_sign(Eigen::MatrixBase<Derived>& v) {
  canonicalize_sign(std::move(v));
}

namespace detail {

// Number of leading pivots of a column-pivoted QR whose |R_ii| exceeds
// `threshold`.
template <typename QR>
Index leading_rank(const QR& qr, typename QR::RealScalar threshold) {
  const auto& r = qr.matrixQR();
  const Index diag = std::min(r.rows(), r.cols());
  Index rank = 0;
  while (rank < diag && std::abs(r(rank, rank)) > threshold) ++rank;
  return rank;
}

template <typename QR>
typename QR::RealScalar max_pivot(const QR& qr) {
  const auto& r = qr.matrixQR();
  if (std::min(r.rows(), r.cols()) == 0) return 0;
  return std::abs(r(0, 0));
}

}  // namespace detail

/// Minimizes ||y - X b||^2 through column-pivoted Householder QR. Columns
/// whose pivot falls below rank_tol times the largest pivot get a zero
/// coefficient and do not count toward effective_rank.
template <typename DerivedX, typename DerivedY>
LeastSquaresFit<typename DerivedX::Scalar> least_squares(
    const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
    typename DerivedX::Scalar rank_tol = kDefaultRankTol) {
  using Scalar = typename DerivedX::Scalar;
  if (X.rows() != y.size())
    throw InputError("least_squares: design has " + std::to_string(X.rows()) +
                     " rows but response has " + std::to_string(y.size()));
  if (X.rows() == 0) throw InputError("least_squares: empty design");
  if (!(rank_tol > 0)) throw InputError("least_squares: rank_tol must be positive");

  LeastSquaresFit<Scalar> fit;
  fit.coefficients = VectorX<Scalar>::Zero(X.cols());
  if (X.cols() > 0) {
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(X);
    const Index rank = detail::leading_rank(qr, rank_tol * detail::max_pivot(qr));
    fit.effective_rank = rank;
    if (rank > 0) {
      VectorX<Scalar> qty = y;
      qty.applyOnTheLeft(qr.householderQ().adjoint());
      VectorX<Scalar> z = qr.matrixQR()
                              .topLeftCorner(rank, rank)
                              .template triangularView<Eigen::Upper>()
                              .solve(qty.head(rank));
      const auto& perm = qr.colsPermutation().indices();
      for (Index i = 0; i < rank; ++i) fit.coefficients(perm(i)) = z(i);
    }
  }
  fit.fitted = X * fit.coefficients;
  fit.residuals = y - fit.fitted;
  return fit;
}

/// Orthonormal basis of the column space of X, keeping pivots above the
/// absolute threshold `abs_tol`.
template <typename Derived>
MatrixX<typename Derived::Scalar> orthonormal_basis_abs(
    const Eigen::MatrixBase<Derived>& X, typename Derived::Scalar abs_tol) {
  using Scalar = typename Derived::Scalar;
  if (X.rows() < 1) throw InputError("orthonormal_basis: X needs at least one row");
  if (X.cols() == 0) return MatrixX<Scalar>(X.rows(), 0);
  Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(X);
  const Index rank = detail::leading_rank(qr, abs_tol);
  MatrixX<Scalar> q = MatrixX<Scalar>::Identity(X.rows(), rank);
  if (rank > 0) q.applyOnTheLeft(qr.householderQ());
  return q;
}

/// Orthonormal basis of the numerical column space of X; an all-zero X
/// yields zero columns.
template <typename Derived>
MatrixX<typename Derived::Scalar> orthonormal_basis(
    const Eigen::MatrixBase<Derived>& X,
    typename Derived::Scalar rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  if (X.rows() < 1) throw InputError("orthonormal_basis: X needs at least one row");
  if (X.cols() == 0) return MatrixX<Scalar>(X.rows(), 0);
  Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(X);
  const Scalar top = detail::max_pivot(qr);
  const Index rank = detail::leading_rank(qr, rank_tol * top);
  MatrixX<Scalar> q = MatrixX<Scalar>::Identity(X.rows(), rank);
  if (rank > 0) q.applyOnTheLeft(qr.householderQ());
  return q;
}

/// The r largest eigenpairs of a symmetric matrix, descending by value,
/// each vector sign-normalized.
template <typename Derived>
std::vector<EigPair<typename Derived::Scalar>> sym_eig_top(
    const Eigen::MatrixBase<Derived>& S, Index r) {
  using Scalar = typename Derived::Scalar;
  if (S.rows() != S.cols()) throw InputError("sym_eig_top: matrix is not square");
  if (r < 1 || r > S.cols())
    throw InputError("sym_eig_top: r=" + std::to_string(r) + " out of range [1, " +
                     std::to_string(S.cols()) + "]");
  const Scalar scale = S.cwiseAbs().maxCoeff();
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-10) * scale)
    throw InputError("sym_eig_top: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(S);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sym_eig_top: eigensolver failed");

  const Index n = S.cols();
  std::vector<EigPair<Scalar>> out;
  out.reserve(static_cast<std::size_t>(r));
  for (Index i = 0; i < r; ++i) {
    EigPair<Scalar> pair{solver.eigenvalues()(n - 1 - i), solver.eigenvectors().col(n - 1 - i)};
    canonicalize_sign(pair.vector);
    out.push_back(std::move(pair));
  }
  return out;
}

template <typename Scalar>
struct PrincipalAxes {
  MatrixX<Scalar> loadings;  // cols(X) x r, orthonormal
  VectorX<Scalar> values;    // top-r eigenvalues of X^T X / rows(X)
  Scalar total = 0;          // trace of X^T X / rows(X)
};

/// Top-r principal axes of the (already centered) data matrix X, i.e. the
/// leading eigenvectors of X^T X / rows. Works on the smaller of the two
/// Gram matrices; when rows < cols the axes are recovered as X^T u.
template <typename Derived>
PrincipalAxes<typename Derived::Scalar> principal_axes(const Eigen::MatrixBase<Derived>& X,
                                                       Index r) {
  using Scalar = typename Derived::Scalar;
  const Index rows = X.rows(), cols = X.cols();
  if (rows < 1) throw InputError("principal_axes: empty data");
  if (r < 1 || r > cols) throw InputError("principal_axes: r out of range");

  PrincipalAxes<Scalar> axes;
  axes.total = X.squaredNorm() / Scalar(rows);
  auto primal = [&] {
    MatrixX<Scalar> s = (X.transpose() * X) / Scalar(rows);
    s = (s + s.transpose()).eval() / Scalar(2);
    const auto pairs = sym_eig_top(s, r);
    axes.loadings.resize(cols, r);
    axes.values.resize(r);
    for (Index k = 0; k < r; ++k) {
      axes.loadings.col(k) = pairs[static_cast<std::size_t>(k)].vector;
      axes.values(k) = pairs[static_cast<std::size_t>(k)].value;
    }
  };
  if (cols <= rows || r > rows) {
    primal();
    return axes;
  }

  MatrixX<Scalar> g = (X * X.transpose()) / Scalar(rows);
  g = (g + g.transpose()).eval() / Scalar(2);
  const auto pairs = sym_eig_top(g, r);
  const Scalar floor = Scalar(1e-10) * std::max(pairs.front().value, Scalar(0));
  if (pairs.back().value <= floor) {
    // Requested more axes than the data's rank supports; the dual route cannot
    // produce them.
    primal();
    return axes;
  }
  axes.loadings.resize(cols, r);
  axes.values.resize(r);
  for (Index k = 0; k < r; ++k) {
    VectorX<Scalar> v = X.transpose() * pairs[static_cast<std::size_t>(k)].vector;
    v.normalize();
    canonicalize_sign(v);
    axes.loadings.col(k) = v;
    axes.values(k) = pairs[static_cast<std::size_t>(k)].value;
  }
  return axes;
}

}  // namespace gosdpca
