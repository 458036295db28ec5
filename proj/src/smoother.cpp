#include "pcace/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pcace/error.hpp"

namespace pcace {

void SmootherConfig::validate() const {
  if (!(span > 0.0 && span <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "smoother span must lie in (0, 1]");
  }
}

std::size_t SmootherConfig::window(std::size_t n) const {
  const auto w = static_cast<std::size_t>(std::llround(span * static_cast<double>(n)));
  return std::min(std::max<std::size_t>(2, w), n);
}

RunningMeanSmoother::RunningMeanSmoother(std::span<const double> x, SmootherConfig cfg)
    : order_(x.size()), window_(0) {
  cfg.validate();
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "smoother needs at least 2 samples");
  window_ = cfg.window(n);

  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  tie_begin_.push_back(0);
  for (std::size_t r = 1; r < n; ++r) {
    if (x[order_[r]] != x[order_[r - 1]]) tie_begin_.push_back(r);
  }
  tie_begin_.push_back(n);
}

std::vector<double> RunningMeanSmoother::apply(std::span<const double> z) const {
  const std::size_t n = order_.size();
  if (z.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "smoother built for " + std::to_string(n) +
                                               " samples, got " + std::to_string(z.size()));
  }

  // Accumulate deviations from a reference value so constant input is
  // reproduced exactly.
  const double ref = z[order_[0]];
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t r = 0; r < n; ++r) prefix[r + 1] = prefix[r] + (z[order_[r]] - ref);

  const std::size_t w = window_;
  const std::size_t half = (w - 1) / 2;
  std::vector<double> by_rank(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t lo = r >= half ? r - half : 0;
    if (lo + w > n) lo = n - w;
    by_rank[r] = (prefix[lo + w] - prefix[lo]) / static_cast<double>(w);
  }

  std::vector<double> out(n);
  for (std::size_t g = 0; g + 1 < tie_begin_.size(); ++g) {
    const std::size_t b = tie_begin_[g];
    const std::size_t e = tie_begin_[g + 1];
    double v = by_rank[b];
    if (e - b > 1) {
      double acc = 0.0;
      for (std::size_t r = b; r < e; ++r) acc += by_rank[r] - by_rank[b];
      v = by_rank[b] + acc / static_cast<double>(e - b);
    }
    for (std::size_t r = b; r < e; ++r) out[order_[r]] = ref + v;
  }
  return out;
}

std::vector<double> smooth(std::span<const double> x, std::span<const double> z,
                           const SmootherConfig& cfg) {
  if (x.size() != z.size()) {
    throw Error(ErrorCode::LengthMismatch, "x has " + std::to_string(x.size()) +
                                               " samples, z has " + std::to_string(z.size()));
  }
  return RunningMeanSmoother(x, cfg).apply(z);
}

}  // namespace pcace
