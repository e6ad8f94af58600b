#pragma once

// Seeded generators for the three simulation designs: a sparse-loading
// factor model (1), a vector MA(1) with spiked covariance (2) and a
// low-rank VAR(1) (3).

#include <gosdpca/common.hpp>

#include <cstdint>
#include <vector>

namespace gosdpca {

struct DgpConfig {
  int dgp_id = 1;
  Index n = 200;       // training rows; one extra holdout row is appended
  Index p = 1000;
  Index r_dgp = 5;
  Index s = 50;
  std::uint64_t seed = 1;
  Index burn_in = 200;
  bool null_signal = false;  // force the predictor coefficients to zero

  void validate() const;
};

/// Planted parameters plus everything needed to replay the target series.
struct DgpTruth {
  MatrixXd B;              // DGP 1: p x r_dgp loadings; DGP 2/3: p x p
  VectorXd beta1, beta2;   // DGP 3 uses beta1 only
  std::vector<Index> support;
  double raw_spectral_norm = 0;  // ||B~|| before scaling (DGP 2/3)
  MatrixXd factors;        // DGP 1: f for rows -2..n, i.e. (n + 3) x r_dgp
  MatrixXd x_pre;          // DGP 2/3: x for rows -2, -1
  VectorXd y_pre;          // y for rows -2, -1
  VectorXd epsilon;        // innovations for rows 0..n
};

struct GeneratedPanel {
  SeriesMatrix series;  // n + 1 rows; column 0 is "y", then x1..xp
  DgpTruth truth;
};

GeneratedPanel generate_dgp1(const DgpConfig& cfg);
GeneratedPanel generate_dgp2(const DgpConfig& cfg);
GeneratedPanel generate_dgp3(const DgpConfig& cfg);
GeneratedPanel generate(const DgpConfig& cfg);

/// Recomputes y for rows 0..n from x (or f) and the truth record.
VectorXd replay_target(const GeneratedPanel& panel, int dgp_id);

/// Largest singular value by power iteration on B^T B.
double spectral_norm(const MatrixXd& b, double tol = 1e-15, Index max_iter = 100000);

/// Well-mixed 64-bit seed for replication `index` under `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace gosdpca
