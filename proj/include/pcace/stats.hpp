#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pcace/matrix.hpp"

namespace pcace {

// Moments use the population convention (divide by n) throughout.
double mean(std::span<const double> v);
double variance(std::span<const double> v);
/// Pearson product-moment coefficient; 0 when either input has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// True when a vector carries no usable variation: its standard deviation is
/// exactly zero or below 1e-12 of its mean magnitude.
bool is_degenerate(double mean_value, double stddev);

struct StandardizedRows {
  DenseMatrix matrix;
  std::vector<std::size_t> dropped;  // original indices of removed constant rows
};

/// Centers every row and scales it to unit variance. Constant rows are
/// removed instead of divided by zero. Throws AllRowsDegenerate when no row
/// survives.
StandardizedRows standardize_rows(const DenseMatrix& m);

/// How many principal components to keep.
class PcaConfig {
 public:
  PcaConfig() = default;
  static PcaConfig fraction(double f);
  static PcaConfig dimension(std::size_t p);

  bool is_fraction() const noexcept { return use_fraction_; }
  double fraction_value() const noexcept { return fraction_; }
  std::size_t dimension_value() const noexcept { return dimension_; }

  /// Resolved component count for a rows x cols input. A fraction rounds to
  /// the nearest count and is clamped to [1, min(rows, cols)]; an absolute
  /// dimension above min(rows, cols) throws RetentionTooLarge.
  std::size_t resolve(std::size_t rows, std::size_t cols) const;

  bool operator==(const PcaConfig&) const = default;

 private:
  bool use_fraction_ = true;
  double fraction_ = 0.5;
  std::size_t dimension_ = 0;
};

struct PcaResult {
  DenseMatrix scores;                             // p' x n projections
  std::vector<double> explained_variance_ratios;  // length p', non-increasing
};

/// Projects the column samples of m onto its top principal directions.
/// Rows are centered internally; the sample count is never changed. Each
/// direction is oriented so that its largest-magnitude loading is positive.
PcaResult pca_reduce(const DenseMatrix& m, const PcaConfig& cfg);

}  // namespace pcace
