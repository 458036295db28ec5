#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pcace/ace.hpp"
#include "pcace/dump.hpp"
#include "pcace/stats.hpp"

namespace pcace {

struct PipelineConfig {
  PcaConfig pca = PcaConfig::fraction(0.5);
  SmootherConfig smoother;
  double tol = 1e-4;
  std::size_t max_iter = 100;

  AceOptions ace_options() const { return {smoother, tol, max_iter}; }
  void validate() const;

  bool operator==(const PipelineConfig&) const = default;
};

struct ChannelDiagnostics {
  std::size_t dropped_rows = 0;
  std::size_t retained_dim = 0;
  std::size_t iterations = 0;
  bool converged = false;
  bool dead = false;  // every activation constant across images
  double signed_correlation = 0.0;
};

struct ChannelScore {
  double pcace_value = 0.0;  // in [0, 1]
  ChannelDiagnostics diagnostics;
};

/// Standardize -> PCA -> ACE -> |correlation| for one channel.
///
/// A channel whose rows are all constant scores 0 and is flagged dead. An
/// absolute PCA dimension larger than what survives standardization is
/// clamped to the available rows, and components carrying no variance
/// (ratio below 1e-12) are not passed to ACE.
ChannelScore pcace_channel(const ChannelActivationMatrix& cam, const ResponseVector& y,
                           const PipelineConfig& cfg);

struct RankingEntry {
  std::size_t channel_index = 0;
  double pcace_value = 0.0;
  bool converged = false;
  std::size_t dropped_rows = 0;
  std::size_t retained_dim = 0;
  std::size_t iterations = 0;
  bool dead = false;

  bool operator==(const RankingEntry&) const = default;
};

struct PcaceRanking {
  std::string layer_name;
  std::optional<std::string> class_label;
  std::vector<RankingEntry> entries;  // pcace_value desc, then channel_index asc
  PipelineConfig config;

  bool operator==(const PcaceRanking&) const = default;
};

/// Sorts entries by the ranking order (value descending, index ascending).
void sort_entries(std::vector<RankingEntry>& entries);

/// Scores every channel of a dump. With jobs > 1 channels are evaluated on
/// worker threads; the result is identical to the serial one. The first
/// failing channel (lowest index) aborts the ranking with its index attached.
PcaceRanking rank_layer(const ActivationDump& dump, const PipelineConfig& cfg,
                        std::size_t jobs = 1);

/// Spearman rank correlation between two rankings of the same channel set,
/// with average ranks for tied values. Returns 0 when either side has no
/// rank variation. Throws ChannelSetMismatch.
double compare_rankings(const PcaceRanking& a, const PcaceRanking& b);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

/// Equal-width bins over [0, 1]; each bin is right-open except the last.
std::vector<HistogramBin> histogram(const PcaceRanking& r, std::size_t bins);

/// PCACE values in ranking order (non-increasing).
std::vector<double> sorted_values(const PcaceRanking& r);

}  // namespace pcace
