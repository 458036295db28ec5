#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pcace {

struct SmootherConfig {
  double span = 0.3;  // fraction of samples in each window, (0, 1]

  /// Window size max(2, round(span * n)), capped at n.
  std::size_t window(std::size_t n) const;
  void validate() const;

  bool operator==(const SmootherConfig&) const = default;
};

/// Running-mean nearest-neighbour smoother over a fixed abscissa.
///
/// Samples are ranked by x (ties broken by original index). The estimate at
/// rank r is the mean of z over the w consecutive ranks centred on r; near
/// the ends the window slides inward so it always holds exactly w samples.
/// Samples sharing the same x value receive the average of their window
/// means, which makes the output a function of x alone.
///
/// Building the smoother once and applying it repeatedly avoids re-sorting x
/// inside the alternating loop.
class RunningMeanSmoother {
 public:
  RunningMeanSmoother(std::span<const double> x, SmootherConfig cfg);

  std::size_t size() const noexcept { return order_.size(); }
  std::size_t window() const noexcept { return window_; }

  /// Estimates E[z | x] at every sample, returned in original sample order.
  std::vector<double> apply(std::span<const double> z) const;

 private:
  std::vector<std::size_t> order_;       // sample index at each rank
  std::vector<std::size_t> tie_begin_;   // first rank of each tie group, plus n
  std::size_t window_;
};

/// One-shot convenience wrapper. Throws LengthMismatch when |x| != |z|.
std::vector<double> smooth(std::span<const double> x, std::span<const double> z,
                           const SmootherConfig& cfg);

}  // namespace pcace
