#pragma once

#include <cstddef>
#include <vector>

#include "pcace/matrix.hpp"
#include "pcace/smoother.hpp"

namespace pcace {

struct AceOptions {
  SmootherConfig smoother;
  double tol = 1e-4;           // stop once e^2 improves by less than this
  std::size_t max_iter = 100;  // outer iterations

  void validate() const;
  bool operator==(const AceOptions&) const = default;
};

struct AceResult {
  double correlation = 0.0;  // signed Pearson(theta, sum of phis)
  std::vector<double> theta;
  std::vector<std::vector<double>> phis;
  std::size_t iterations = 0;
  double final_error = 1.0;  // mean((theta - sum phis)^2)
  bool converged = false;
  std::vector<double> error_history;  // e^2 after each accepted outer iteration
};

inline constexpr std::size_t kMinAceSamples = 10;

/// Alternating conditional expectations between the rows of `predictors`
/// (p x n) and the response y (length n).
///
/// theta starts as standardized y and every phi at zero. Each outer iteration
/// runs one backfitting sweep phi_k = E[theta - sum_{i != k} phi_i | x_k]
/// (each re-centred), then sets theta = E[sum phi | y] normalized to zero mean
/// and unit variance. An iteration that would raise e^2 is rejected and ends
/// the loop. On exit the phis are rescaled by the least-squares coefficient of
/// theta on their sum, so final_error equals 1 - correlation^2.
///
/// Throws DegenerateResponse when y is constant.
AceResult ace(const DenseMatrix& predictors, const ResponseVector& y,
              const AceOptions& opts = {});

}  // namespace pcace
