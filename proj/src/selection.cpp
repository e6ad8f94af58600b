#include <gosdpca/selection.hpp>

#include <gosdpca/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gosdpca {

GroupDesign build_group_design(const VectorXd& y, const MatrixXd& x, Index q1, Index h) {
  const Index n = y.size();
  if (x.rows() != n) throw InputError("build_group_design: predictor rows differ from target");
  if (q1 < 1) throw InputError("build_group_design: q1 must be at least 1");
  if (h < 1) throw InputError("build_group_design: h must be at least 1");
  if (n <= q1 + h)
    throw InputError("build_group_design: insufficient usable rows (n=" + std::to_string(n) +
                     ", q1=" + std::to_string(q1) + ", h=" + std::to_string(h) + ")");

  GroupDesign design;
  design.q1 = q1;
  design.h = h;
  design.n = n;
  const Index rows = n - h - q1 + 1;
  design.response = y.segment(q1 - 1 + h, rows);
  design.groups.reserve(static_cast<std::size_t>(x.cols()));
  for (Index j = 0; j < x.cols(); ++j) {
    MatrixXd g(rows, q1);
    for (Index lag = 0; lag < q1; ++lag) g.col(lag) = x.col(j).segment(q1 - 1 - lag, rows);
    design.groups.push_back(std::move(g));
    design.predictor_columns.push_back(j);
  }
  return design;
}

GroupDesign build_group_design(const SeriesMatrix& series, Index target, Index q1, Index h) {
  const TargetSplit split = split_target(series, target);
  GroupDesign design = build_group_design(split.y, split.x, q1, h);
  design.predictor_columns = split.predictor_columns;
  return design;
}

GroupDesign center(GroupDesign design) {
  design.response.array() -= design.response.mean();
  for (auto& g : design.groups) g.rowwise() -= g.colwise().mean();
  return design;
}

std::vector<MatrixXd> group_bases(const GroupDesign& design, double rank_tol) {
  std::vector<MatrixXd> bases;
  bases.reserve(design.groups.size());
  for (const auto& g : design.groups) bases.push_back(orthonormal_basis(g, rank_tol));
  return bases;
}

Index goga_step(const VectorXd& residual, const std::vector<MatrixXd>& bases,
                const std::vector<Index>& candidates) {
  if (candidates.empty()) throw InputError("goga_step: empty candidate set");
  Index best = -1;
  double best_score = -1;
  for (const Index j : candidates) {
    if (j < 0 || j >= static_cast<Index>(bases.size()))
      throw InputError("goga_step: candidate index out of range");
    const MatrixXd& q = bases[static_cast<std::size_t>(j)];
    if (q.rows() != residual.size()) throw InputError("goga_step: residual length mismatch");
    // ||u - P_j u||^2 = ||u||^2 - ||Q_j^T u||^2, so maximize the explained part.
    const double score = q.cols() == 0 ? 0.0 : (q.transpose() * residual).squaredNorm();
    if (score > best_score || (score == best_score && j < best)) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

Index goga_step(const VectorXd& residual, const GroupDesign& design,
                const std::vector<Index>& candidates) {
  if (candidates.empty()) throw InputError("goga_step: empty candidate set");
  if (residual.size() != design.rows()) throw InputError("goga_step: residual length mismatch");
  return goga_step(residual, group_bases(design), candidates);
}

double hdaic(double sigma2, Index k, Index p_total, Index n_eff, double C) {
  if (!(sigma2 >= 0)) throw InputError("hdaic: sigma2 must be non-negative");
  if (k < 1) throw InputError("hdaic: k must be at least 1");
  if (p_total < 2) throw InputError("hdaic: p_total must be at least 2");
  if (n_eff < 1) throw InputError("hdaic: n_eff must be at least 1");
  if (!(C > 0)) throw InputError("hdaic: C must be positive");
  return (1.0 + C * static_cast<double>(k) * std::log(static_cast<double>(p_total)) /
                    static_cast<double>(n_eff)) *
         sigma2;
}

Index default_max_iterations(Index n_eff, Index p_total, Index q1) {
  const double lp = std::log(static_cast<double>(std::max<Index>(p_total, 2)));
  const auto k = static_cast<Index>(std::ceil(5.0 * std::sqrt(static_cast<double>(n_eff) / lp)));
  const Index cap = n_eff / (2 * std::max<Index>(q1, 1));
  return std::max<Index>(1, std::min(k, cap));
}

namespace {

// Columns of `block` orthogonal to `basis`, orthonormalized. Two classical
// Gram-Schmidt passes; directions below rank_tol relative to the block's
// own scale are treated as already spanned.
MatrixXd extend_basis(const MatrixXd& basis, const MatrixXd& block, double rank_tol) {
  if (block.cols() == 0) return MatrixXd(block.rows(), 0);
  const double scale = block.colwise().norm().maxCoeff();
  if (scale == 0) return MatrixXd(block.rows(), 0);
  MatrixXd w = block;
  if (basis.cols() > 0) {
    w -= basis * (basis.transpose() * w);
    w -= basis * (basis.transpose() * w);
  }
  MatrixXd fresh = orthonormal_basis_abs(w, rank_tol * scale);
  if (basis.cols() > 0 && fresh.cols() > 0) {
    fresh -= basis * (basis.transpose() * fresh);
    for (Index c = 0; c < fresh.cols(); ++c) fresh.col(c).normalize();
  }
  return fresh;
}

}  // namespace

SelectionResult goga_hdaic(const GroupDesign& design, const std::vector<MatrixXd>& bases,
                           const std::vector<Index>& candidates, const GogaOptions& options) {
  if (candidates.empty()) throw InputError("goga_hdaic: empty candidate set");
  if (!(options.C > 0)) throw InputError("goga_hdaic: C must be positive");
  if (bases.size() != design.groups.size())
    throw InputError("goga_hdaic: bases do not match design");

  const Index n_eff = design.rows();
  const Index p_total = options.p_total > 0 ? options.p_total : std::max<Index>(design.size(), 2);
  Index max_iter = options.max_iterations > 0
                       ? options.max_iterations
                       : default_max_iterations(n_eff, p_total, design.q1);
  max_iter = std::min<Index>(max_iter, static_cast<Index>(candidates.size()));

  std::vector<Index> remaining = candidates;
  std::sort(remaining.begin(), remaining.end());
  remaining.erase(std::unique(remaining.begin(), remaining.end()), remaining.end());

  const VectorXd& y = design.response;
  SelectionResult result;
  result.sigma2_null = accurate_squared_norm(y) / static_cast<double>(n_eff);
  const double floor = 1e-12 * result.sigma2_null;

  MatrixXd q(n_eff, 0);
  VectorXd u = y;
  double sigma2 = result.sigma2_null;
  while (static_cast<Index>(result.path.size()) < max_iter && !remaining.empty() &&
         sigma2 > floor) {
    const Index j = goga_step(u, bases, remaining);
    remaining.erase(std::find(remaining.begin(), remaining.end(), j));
    const MatrixXd fresh = extend_basis(q, design.groups[static_cast<std::size_t>(j)],
                                        options.rank_tol);
    if (fresh.cols() == 0) continue;  // already spanned; try the next-best group

    MatrixXd grown(n_eff, q.cols() + fresh.cols());
    grown << q, fresh;
    q = std::move(grown);
    u = y - q * (q.transpose() * y);
    sigma2 = accurate_squared_norm(u) / static_cast<double>(n_eff);

    result.path.push_back(j);
    result.sigma2_path.push_back(sigma2);
    result.hdaic_path.push_back(
        hdaic(sigma2, static_cast<Index>(result.path.size()), p_total, n_eff, options.C));
  }

  double best = options.allow_empty ? result.sigma2_null
                                    : std::numeric_limits<double>::infinity();
  result.chosen_k = 0;
  for (std::size_t k = 0; k < result.hdaic_path.size(); ++k) {
    if (result.hdaic_path[k] < best) {
      best = result.hdaic_path[k];
      result.chosen_k = static_cast<Index>(k + 1);
    }
  }
  result.selected.assign(result.path.begin(), result.path.begin() + result.chosen_k);
  return result;
}

SelectionResult goga_hdaic(const GroupDesign& design, const std::vector<Index>& candidates,
                           const GogaOptions& options) {
  return goga_hdaic(design, group_bases(design, options.rank_tol), candidates, options);
}

PeelResult peel(const GroupDesign& design, Index M, const GogaOptions& options) {
  if (M < 1) throw InputError("peel: M must be at least 1");
  const auto bases = group_bases(design, options.rank_tol);
  GogaOptions round_options = options;
  if (round_options.p_total == 0) round_options.p_total = std::max<Index>(design.size(), 2);

  std::vector<Index> candidates(static_cast<std::size_t>(design.size()));
  for (Index j = 0; j < design.size(); ++j) candidates[static_cast<std::size_t>(j)] = j;

  PeelResult result;
  for (Index m = 0; m < M && !candidates.empty(); ++m) {
    SelectionResult round = goga_hdaic(design, bases, candidates, round_options);
    const bool empty = round.selected.empty();
    for (const Index j : round.selected) {
      result.union_set.push_back(j);
      candidates.erase(std::find(candidates.begin(), candidates.end(), j));
    }
    result.rounds.push_back(std::move(round));
    if (empty) break;
  }
  std::sort(result.union_set.begin(), result.union_set.end());
  return result;
}

}  // namespace gosdpca
