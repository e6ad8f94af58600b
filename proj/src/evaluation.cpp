#include <gosdpca/evaluation.hpp>

#include <gosdpca/numerics.hpp>

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace gosdpca {

unsigned worker_count() {
  if (const char* env = std::getenv("GOSDPCA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(Index count, const std::function<void(Index)>& body) {
  if (count <= 0) return;
  const auto threads = static_cast<Index>(std::min<Index>(worker_count(), count));
  std::atomic<Index> next{0};
  std::mutex guard;
  Index failed_at = count;
  std::exception_ptr failure;

  auto work = [&] {
    for (Index i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (Index k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<ForecastRecord> rolling_forecast(const SeriesMatrix& series, Index target,
                                             const Forecaster& method, Index window, Index h,
                                             Index test_len) {
  const Index n = series.rows();
  if (target < 0 || target >= series.cols()) throw InputError("rolling_forecast: bad target column");
  if (window < 1 || h < 1 || test_len < 1)
    throw InputError("rolling_forecast: window, h and test_len must be positive");
  if (window + h + test_len > n)
    throw InputError("rolling_forecast: window + h + test_len = " +
                     std::to_string(window + h + test_len) + " exceeds n = " + std::to_string(n));
  if (!method.forecast) throw InputError("rolling_forecast: empty forecaster");

  const Index first_origin = n - h - test_len;
  std::vector<ForecastRecord> records(static_cast<std::size_t>(test_len));
  parallel_for(test_len, [&](Index k) {
    const Index t = first_origin + k;
    ForecastRecord& rec = records[static_cast<std::size_t>(k)];
    rec.origin = t;
    rec.horizon = h;
    rec.method = method.name;
    rec.config_digest = method.config_digest;
    rec.realized = series.values(t + h, target);
    try {
      rec.predicted = method.forecast(series.slice_rows(t - window + 1, window), target, h);
    } catch (const std::exception& e) {
      throw ForecastError(method.name + " failed at origin " + std::to_string(t) + ": " + e.what(), t);
    }
    if (!std::isfinite(rec.predicted))
      throw ForecastError(method.name + " produced a non-finite forecast at origin " + std::to_string(t), t);
  });
  return records;
}

double rmsfe(const VectorXd& errors) {
  if (errors.size() == 0) throw InputError("rmsfe: no forecasts");
  return std::sqrt(accurate_squared_norm(errors) / static_cast<double>(errors.size()));
}

double rmsfe(const std::vector<ForecastRecord>& records) {
  VectorXd e(static_cast<Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    e(static_cast<Index>(i)) = records[i].predicted - records[i].realized;
  return rmsfe(e);
}

DmResult dm_test(const VectorXd& errors_a, const VectorXd& errors_b, Index h) {
  if (errors_a.size() != errors_b.size()) throw InputError("dm_test: error vectors differ in length");
  const Index T = errors_a.size();
  if (T < 8) throw InputError("dm_test: need at least 8 forecasts");
  if (h < 1) throw InputError("dm_test: h must be at least 1");

  DmResult out;
  out.n_forecasts = T;
  out.horizon = h;
  const VectorXd d = errors_a.array().square() - errors_b.array().square();
  const auto tt = static_cast<double>(T);
  const double mean = d.sum() / tt;
  const VectorXd c = d.array() - mean;
  auto gamma = [&](Index l) { return c.tail(T - l).dot(c.head(T - l)) / tt; };

  const double g0 = gamma(0);
  if (!(g0 > 0)) {
    out.degenerate = true;
    if (mean == 0) {
      out.statistic = 0;
      out.p_value = 0.5;
    } else {
      out.statistic = mean < 0 ? -std::numeric_limits<double>::infinity()
                               : std::numeric_limits<double>::infinity();
      out.p_value = mean < 0 ? 0.0 : 1.0;
    }
    return out;
  }
  double v = g0;
  for (Index l = 1; l < h && l < T; ++l) v += 2.0 * gamma(l);
  if (!(v > 0)) {
    v = g0;
    out.degenerate = true;
  }
  const auto hh = static_cast<double>(h);
  const double harvey = std::sqrt((tt + 1.0 - 2.0 * hh + hh * (hh - 1.0) / tt) / tt);
  out.statistic = mean / std::sqrt(v / tt) * harvey;

  const boost::math::students_t dist(tt - 1.0);
  // upper >= 0.5, so 1 - upper is exact and the two tails sum to one exactly
  const double upper = 1.0 - boost::math::cdf(dist, -std::abs(out.statistic));
  out.p_value = out.statistic <= 0 ? 1.0 - upper : upper;
  return out;
}

void summarize_squared_errors(const std::vector<double>& sq, double& root_mean, double& stderr_out) {
  if (sq.empty()) {
    root_mean = std::numeric_limits<double>::quiet_NaN();
    stderr_out = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  const Index m = static_cast<Index>(sq.size());
  const Eigen::Map<const VectorXd> v(sq.data(), m);
  const double mse = accurate_dot(v, VectorXd::Ones(m)) / static_cast<double>(m);
  root_mean = std::sqrt(mse);
  if (m < 2 || mse == 0) {
    stderr_out = 0;
    return;
  }
  const VectorXd c = v.array() - mse;
  const double var = accurate_squared_norm(c) / static_cast<double>(m - 1);
  stderr_out = std::sqrt(var / static_cast<double>(m)) / (2.0 * root_mean);
}

McStudy monte_carlo_study(const DgpConfig& tmpl, const std::vector<McMethod>& methods,
                          Index replications, std::uint64_t base_seed) {
  if (replications < 1) throw InputError("monte_carlo_study: replications must be at least 1");
  tmpl.validate();
  const auto reps = static_cast<std::size_t>(replications);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  McStudy study;
  for (Index i = 0; i < replications; ++i)
    study.seeds.push_back(derive_seed(base_seed, static_cast<std::uint64_t>(i)));
  study.methods.resize(methods.size());
  std::vector<std::vector<std::string>> messages(methods.size(), std::vector<std::string>(reps));
  for (std::size_t m = 0; m < methods.size(); ++m) {
    study.methods[m].name = methods[m].name;
    study.methods[m].predicted.assign(reps, nan);
    study.methods[m].realized.assign(reps, nan);
  }

  parallel_for(replications, [&](Index i) {
    const auto ri = static_cast<std::size_t>(i);
    DgpConfig cfg = tmpl;
    cfg.seed = study.seeds[ri];
    GeneratedPanel panel;
    try {
      panel = generate(cfg);
    } catch (const std::exception& e) {
      for (std::size_t m = 0; m < methods.size(); ++m)
        messages[m][ri] = std::string("generation failed: ") + e.what();
      return;
    }
    const double realized = panel.series.values(cfg.n, 0);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      study.methods[m].realized[ri] = realized;
      try {
        const double f = methods[m].forecast(panel);
        if (!std::isfinite(f)) throw std::runtime_error("non-finite forecast");
        study.methods[m].predicted[ri] = f;
      } catch (const std::exception& e) {
        messages[m][ri] = e.what();
      }
    }
  });

  for (std::size_t m = 0; m < methods.size(); ++m) {
    McMethodSummary& s = study.methods[m];
    std::vector<double> sq;
    double abs_sum = 0;
    for (std::size_t i = 0; i < reps; ++i) {
      if (std::isnan(s.predicted[i])) {
        ++s.failures;
        s.failure_messages.push_back("replication " + std::to_string(i) + ": " + messages[m][i]);
        continue;
      }
      const double e = s.predicted[i] - s.realized[i];
      sq.push_back(e * e);
      abs_sum += std::abs(e);
    }
    s.used = static_cast<Index>(sq.size());
    summarize_squared_errors(sq, s.rmsfe, s.mc_stderr);
    s.mean_abs_error = sq.empty() ? std::numeric_limits<double>::quiet_NaN() : abs_sum / static_cast<double>(sq.size());
  }
  return study;
}

}  // namespace gosdpca
