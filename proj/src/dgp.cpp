#include <gosdpca/dgp.hpp>

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace gosdpca {

using Engine = boost::random::mt19937_64;

void DgpConfig::validate() const {
  if (dgp_id < 1 || dgp_id > 3) throw InputError("dgp_id must be 1, 2 or 3");
  if (n < 20) throw InputError("DGP: n must be at least 20");
  if (p < 1) throw InputError("DGP: p must be at least 1");
  if (r_dgp < 1 || r_dgp > p) throw InputError("DGP: r_dgp must lie in [1, p]");
  if (s < 0 || s > p) throw InputError("DGP: s must lie in [0, p]");
  if (burn_in < 0) throw InputError("DGP: burn_in must be non-negative");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer over a Weyl step
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double spectral_norm(const MatrixXd& b, double tol, Index max_iter) {
  if (b.size() == 0) return 0;
  VectorXd v(b.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = 1.0 + 1e-3 * static_cast<double>(i % 7);
  v.normalize();
  double lambda = 0;
  for (Index it = 0; it < max_iter; ++it) {
    const VectorXd w = b.transpose() * (b * v);
    const double next = w.norm();
    if (next == 0) return 0;
    v = w / next;
    if (std::abs(next - lambda) <= tol * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

namespace {

MatrixXd normal_matrix(Engine& eng, Index rows, Index cols) {
  boost::random::normal_distribution<double> normal;
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(eng);
  return m;
}

std::vector<Index> choose_subset(Engine& eng, Index p, Index s) {
  std::vector<Index> idx(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < s; ++i) {
    boost::random::uniform_int_distribution<Index> pick(i, p - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(eng))]);
  }
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  return idx;
}

SeriesMatrix make_panel(const VectorXd& y, const MatrixXd& x) {
  SeriesMatrix series;
  series.values.resize(y.size(), x.cols() + 1);
  series.values.col(0) = y;
  series.values.rightCols(x.cols()) = x;
  series.names.push_back("y");
  for (Index j = 0; j < x.cols(); ++j) series.names.push_back("x" + std::to_string(j + 1));
  for (Index i = 0; i < y.size(); ++i) series.index.push_back(std::to_string(i + 1));
  return series;
}

// Absolute step layout shared by the generators: two pre-sample steps,
// burn-in, then the n + 1 kept rows.
struct Layout {
  Index total, first_kept, kept;
  explicit Layout(const DgpConfig& cfg)
      : total(2 + cfg.burn_in + cfg.n + 1), first_kept(2 + cfg.burn_in), kept(cfg.n + 1) {}
};

// rank-r_dgp product of Gaussian factors
MatrixXd low_rank(Engine& eng, Index p, Index r) {
  const MatrixXd u = normal_matrix(eng, p, r);
  const MatrixXd v = normal_matrix(eng, p, r);
  return u * v.transpose();
}

}  // namespace

GeneratedPanel generate_dgp1(const DgpConfig& cfg) {
  cfg.validate();
  if (cfg.dgp_id != 1) throw InputError("generate_dgp1: dgp_id must be 1");
  Engine eng(cfg.seed);
  const Layout lay(cfg);
  const Index p = cfg.p, r = cfg.r_dgp;

  GeneratedPanel out;
  DgpTruth& truth = out.truth;
  boost::random::uniform_real_distribution<double> load(-2.0, 2.0);
  MatrixXd b(p, r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < p; ++i) b(i, j) = load(eng);
  truth.support = choose_subset(eng, p, cfg.s);
  MatrixXd masked = MatrixXd::Zero(p, r);
  for (const Index i : truth.support) masked.row(i) = b.row(i);
  truth.B = masked;

  boost::random::uniform_real_distribution<double> u1(1.0, 2.5), u2(-2.0, -0.8);
  truth.beta1.resize(r);
  truth.beta2.resize(r);
  for (Index j = 0; j < r; ++j) truth.beta1(j) = u1(eng);
  for (Index j = 0; j < r; ++j) truth.beta2(j) = u2(eng);
  if (cfg.null_signal) {
    truth.beta1.setZero();
    truth.beta2.setZero();
  }

  const MatrixXd f = normal_matrix(eng, lay.total, r);
  boost::random::normal_distribution<double> normal;
  VectorXd eps(lay.total);
  for (Index a = 0; a < lay.total; ++a) eps(a) = normal(eng);

  VectorXd y = VectorXd::Zero(lay.total);
  for (Index a = 2; a < lay.total; ++a)
    y(a) = 0.6 * y(a - 1) + 0.2 * y(a - 2) + truth.beta1.dot(f.row(a - 1)) +
           truth.beta2.dot(f.row(a - 2)) + eps(a);

  boost::random::chi_squared_distribution<double> chi2(5.0);
  MatrixXd x(lay.kept, p);
  for (Index i = 0; i < lay.kept; ++i) {
    const Index a = lay.first_kept + i;
    VectorXd row = truth.B * f.row(a).transpose();
    for (Index j = 0; j < p; ++j) {
      const double z = normal(eng);
      const double t5 = z / std::sqrt(chi2(eng) / 5.0);
      row(j) += 2.0 * t5;
    }
    x.row(i) = row.transpose();
  }

  truth.factors = f.middleRows(lay.first_kept - 2, lay.kept + 2);
  truth.y_pre = y.segment(lay.first_kept - 2, 2);
  truth.epsilon = eps.tail(lay.kept);
  out.series = make_panel(y.tail(lay.kept), x);
  return out;
}

GeneratedPanel generate_dgp2(const DgpConfig& cfg) {
  cfg.validate();
  if (cfg.dgp_id != 2) throw InputError("generate_dgp2: dgp_id must be 2");
  Engine eng(cfg.seed);
  const Layout lay(cfg);
  const Index p = cfg.p;

  GeneratedPanel out;
  DgpTruth& truth = out.truth;
  const MatrixXd raw = low_rank(eng, p, cfg.r_dgp);
  truth.raw_spectral_norm = spectral_norm(raw);
  truth.B = raw / truth.raw_spectral_norm;

  truth.support = choose_subset(eng, p, cfg.s);
  boost::random::uniform_real_distribution<double> u1(1.0, 3.0), u2(-2.5, -0.5);
  truth.beta1 = VectorXd::Zero(p);
  truth.beta2 = VectorXd::Zero(p);
  for (const Index j : truth.support) truth.beta1(j) = u1(eng);
  for (const Index j : truth.support) truth.beta2(j) = u2(eng);
  if (cfg.null_signal) {
    truth.beta1.setZero();
    truth.beta2.setZero();
  }

  // delta for steps -1 .. total-1
  const MatrixXd delta = normal_matrix(eng, p, lay.total + 1);
  const MatrixXd mixed = 0.8 * (truth.B * delta.leftCols(lay.total));
  MatrixXd x(p, lay.total);  // column a holds x_a
  x = delta.rightCols(lay.total) + mixed;

  boost::random::normal_distribution<double> normal;
  VectorXd eps(lay.total);
  for (Index a = 0; a < lay.total; ++a) eps(a) = normal(eng);

  VectorXd y = VectorXd::Zero(lay.total);
  for (Index a = 2; a < lay.total; ++a)
    y(a) = 0.6 * y(a - 1) + 0.2 * y(a - 2) + truth.beta1.dot(x.col(a - 1)) +
           truth.beta2.dot(x.col(a - 2)) + eps(a);

  truth.x_pre = x.middleCols(lay.first_kept - 2, 2).transpose();
  truth.y_pre = y.segment(lay.first_kept - 2, 2);
  truth.epsilon = eps.tail(lay.kept);
  out.series = make_panel(y.tail(lay.kept), x.rightCols(lay.kept).transpose());
  return out;
}

GeneratedPanel generate_dgp3(const DgpConfig& cfg) {
  cfg.validate();
  if (cfg.dgp_id != 3) throw InputError("generate_dgp3: dgp_id must be 3");
  Engine eng(cfg.seed);
  const Layout lay(cfg);
  const Index p = cfg.p;

  GeneratedPanel out;
  DgpTruth& truth = out.truth;
  const MatrixXd raw = low_rank(eng, p, cfg.r_dgp);
  truth.raw_spectral_norm = spectral_norm(raw);
  truth.B = raw / (1.05 * truth.raw_spectral_norm);

  boost::random::uniform_real_distribution<double> u(0.1, 3.0);
  truth.beta1 = VectorXd::Zero(p);
  for (Index i = 0; i < cfg.s; ++i) {
    const double sign = (i + 1) % 2 == 0 ? 1.0 : -1.0;  // (-1)^j with j = i + 1
    truth.beta1(i) = sign * u(eng);
    truth.support.push_back(i);
  }
  if (cfg.null_signal) truth.beta1.setZero();

  const MatrixXd delta = normal_matrix(eng, p, lay.total);
  MatrixXd x(p, lay.total);
  x.col(0) = delta.col(0);
  for (Index a = 1; a < lay.total; ++a) x.col(a) = truth.B * x.col(a - 1) + delta.col(a);

  boost::random::normal_distribution<double> normal;
  VectorXd eps(lay.total);
  for (Index a = 0; a < lay.total; ++a) eps(a) = normal(eng);

  VectorXd y = VectorXd::Zero(lay.total);
  for (Index a = 1; a < lay.total; ++a)
    y(a) = 0.5 * y(a - 1) + truth.beta1.dot(x.col(a - 1)) + eps(a);

  truth.x_pre = x.middleCols(lay.first_kept - 2, 2).transpose();
  truth.y_pre = y.segment(lay.first_kept - 2, 2);
  truth.epsilon = eps.tail(lay.kept);
  out.series = make_panel(y.tail(lay.kept), x.rightCols(lay.kept).transpose());
  return out;
}

GeneratedPanel generate(const DgpConfig& cfg) {
  switch (cfg.dgp_id) {
    case 1: return generate_dgp1(cfg);
    case 2: return generate_dgp2(cfg);
    case 3: return generate_dgp3(cfg);
    default: throw InputError("dgp_id must be 1, 2 or 3");
  }
}

VectorXd replay_target(const GeneratedPanel& panel, int dgp_id) {
  const DgpTruth& t = panel.truth;
  const MatrixXd& v = panel.series.values;
  const Index rows = v.rows();
  const Index p = v.cols() - 1;
  VectorXd y(rows + 2);
  y.head(2) = t.y_pre;
  auto x_at = [&](Index i) -> VectorXd {  // x for kept row i, i >= -2
    if (i >= 0) return v.row(i).tail(p).transpose();
    return t.x_pre.row(i + 2).transpose();
  };
  for (Index i = 0; i < rows; ++i) {
    const Index k = i + 2;
    double value = 0;
    switch (dgp_id) {
      case 1:
        value = 0.6 * y(k - 1) + 0.2 * y(k - 2) + t.beta1.dot(t.factors.row(k - 1)) +
                t.beta2.dot(t.factors.row(k - 2));
        break;
      case 2:
        value = 0.6 * y(k - 1) + 0.2 * y(k - 2) + t.beta1.dot(x_at(i - 1)) + t.beta2.dot(x_at(i - 2));
        break;
      case 3:
        value = 0.5 * y(k - 1) + t.beta1.dot(x_at(i - 1));
        break;
      default:
        throw InputError("replay_target: unknown dgp_id");
    }
    y(k) = value + t.epsilon(i);
  }
  return y.tail(rows);
}

}  // namespace gosdpca
