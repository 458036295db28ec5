#include "pcace/ace.hpp"

#include <cmath>
#include <string>

#include "pcace/error.hpp"
#include "pcace/stats.hpp"

namespace pcace {

void AceOptions::validate() const {
  smoother.validate();
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be > 0");
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
}

namespace {

void center(std::vector<double>& v) {
  const double mu = mean(v);
  for (double& x : v) x -= mu;
}

double mean_squared_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

// Scales a zero-mean vector to unit variance; false if it has none.
bool normalize(std::vector<double>& v) {
  center(v);
  const double sd = std::sqrt(variance(v));
  if (sd == 0.0) return false;
  for (double& x : v) x /= sd;
  return true;
}

std::vector<double> sum_rows(const std::vector<std::vector<double>>& rows, std::size_t n) {
  std::vector<double> s(n, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < n; ++j) s[j] += r[j];
  }
  return s;
}

}  // namespace

AceResult ace(const DenseMatrix& predictors, const ResponseVector& y, const AceOptions& opts) {
  opts.validate();
  const std::size_t p = predictors.rows();
  const std::size_t n = predictors.cols();
  if (y.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "predictors have " + std::to_string(n) +
                                               " samples, response has " +
                                               std::to_string(y.size()));
  }
  if (n < kMinAceSamples) {
    throw Error(ErrorCode::InvalidArgument,
                "ACE needs at least " + std::to_string(kMinAceSamples) + " samples");
  }

  const auto yv = y.values();
  {
    const double sd = std::sqrt(variance(yv));
    if (is_degenerate(mean(yv), sd)) {
      throw Error(ErrorCode::DegenerateResponse, "response vector has zero variance");
    }
  }

  std::vector<RunningMeanSmoother> x_smoothers;
  x_smoothers.reserve(p);
  for (std::size_t k = 0; k < p; ++k) x_smoothers.emplace_back(predictors.row(k), opts.smoother);
  const RunningMeanSmoother y_smoother(yv, opts.smoother);

  AceResult res;
  res.theta.assign(yv.begin(), yv.end());
  normalize(res.theta);
  res.phis.assign(p, std::vector<double>(n, 0.0));
  std::vector<double> fitted(n, 0.0);
  double err = mean_squared_gap(res.theta, fitted);

  std::vector<double> residual(n);
  for (std::size_t iter = 1; iter <= opts.max_iter; ++iter) {
    res.iterations = iter;
    auto phis = res.phis;
    auto theta = res.theta;

    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t j = 0; j < n; ++j) residual[j] = theta[j] - (fitted[j] - phis[k][j]);
      auto updated = x_smoothers[k].apply(residual);
      center(updated);
      for (std::size_t j = 0; j < n; ++j) fitted[j] += updated[j] - phis[k][j];
      phis[k] = std::move(updated);
    }
    fitted = sum_rows(phis, n);

    auto next_theta = y_smoother.apply(fitted);
    const bool moved = normalize(next_theta);
    if (moved) theta = std::move(next_theta);

    const double next_err = mean_squared_gap(theta, fitted);
    if (next_err > err) {
      // Rejected: keep the previous state.
      fitted = sum_rows(res.phis, n);
      res.converged = next_err - err < opts.tol;
      break;
    }
    res.phis = std::move(phis);
    res.theta = std::move(theta);
    res.error_history.push_back(next_err);
    const double gain = err - next_err;
    err = next_err;
    if (gain < opts.tol || !moved) {
      res.converged = true;
      break;
    }
  }

  res.correlation = pearson(res.theta, fitted);
  const double fitted_var = variance(fitted);
  if (fitted_var > 0.0) {
    double cov = 0.0;
    for (std::size_t j = 0; j < n; ++j) cov += res.theta[j] * fitted[j];
    const double beta = cov / static_cast<double>(n) / fitted_var;
    for (auto& phi : res.phis) {
      for (double& v : phi) v *= beta;
    }
    fitted = sum_rows(res.phis, n);
  }
  res.final_error = mean_squared_gap(res.theta, fitted);
  return res;
}

}  // namespace pcace
