#include "pcace/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "pcace/error.hpp"

namespace pcace {

void PipelineConfig::validate() const { ace_options().validate(); }

ChannelScore pcace_channel(const ChannelActivationMatrix& cam, const ResponseVector& y,
                           const PipelineConfig& cfg) {
  if (cam.matrix.cols() != y.size()) {
    throw Error(ErrorCode::ShapeMismatch, "channel has " + std::to_string(cam.matrix.cols()) +
                                              " images, response has " + std::to_string(y.size()));
  }

  ChannelScore out;
  std::optional<StandardizedRows> std_rows;
  try {
    std_rows = standardize_rows(cam.matrix);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AllRowsDegenerate) throw;
    out.diagnostics.dead = true;
    out.diagnostics.dropped_rows = cam.matrix.rows();
    out.diagnostics.converged = true;
    return out;
  }
  out.diagnostics.dropped_rows = std_rows->dropped.size();

  const DenseMatrix& x = std_rows->matrix;
  PcaConfig pca = cfg.pca;
  if (!pca.is_fraction()) {
    pca = PcaConfig::dimension(std::min(pca.dimension_value(), std::min(x.rows(), x.cols())));
  }
  PcaResult reduced = pca_reduce(x, pca);

  std::size_t informative = 0;
  while (informative < reduced.explained_variance_ratios.size() &&
         reduced.explained_variance_ratios[informative] >= 1e-12) {
    ++informative;
  }
  informative = std::max<std::size_t>(informative, 1);
  if (informative < reduced.scores.rows()) {
    std::vector<double> head(reduced.scores.values().begin(),
                             reduced.scores.values().begin() +
                                 static_cast<std::ptrdiff_t>(informative * x.cols()));
    reduced.scores = DenseMatrix(informative, x.cols(), std::move(head));
  }
  out.diagnostics.retained_dim = reduced.scores.rows();

  const AceResult res = ace(reduced.scores, y, cfg.ace_options());
  out.pcace_value = std::clamp(std::abs(res.correlation), 0.0, 1.0);
  out.diagnostics.iterations = res.iterations;
  out.diagnostics.converged = res.converged;
  out.diagnostics.signed_correlation = res.correlation;
  return out;
}

void sort_entries(std::vector<RankingEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const RankingEntry& a, const RankingEntry& b) {
    if (a.pcace_value != b.pcace_value) return a.pcace_value > b.pcace_value;
    return a.channel_index < b.channel_index;
  });
}

PcaceRanking rank_layer(const ActivationDump& dump, const PipelineConfig& cfg, std::size_t jobs) {
  cfg.validate();
  const std::size_t c = dump.channels.size();
  std::vector<ChannelScore> scores(c);
  std::vector<std::exception_ptr> failures(c);

  auto work = [&](std::size_t i) {
    try {
      scores[i] = pcace_channel(dump.channels[i], dump.scores, cfg);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(c, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < c; ++i) {
      work(i);
      if (failures[i]) break;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < c && !abort; i = next++) {
          work(i);
          if (failures[i]) abort = true;
        }
      });
    }
  }

  for (std::size_t i = 0; i < c; ++i) {
    if (!failures[i]) continue;
    const std::size_t ch = dump.channels[i].channel_index;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "channel " + std::to_string(ch) + ": " + e.context());
    }
  }

  PcaceRanking r;
  r.layer_name = dump.manifest.layer_name;
  r.class_label = dump.manifest.class_label;
  r.config = cfg;
  r.entries.reserve(c);
  for (std::size_t i = 0; i < c; ++i) {
    const auto& d = scores[i].diagnostics;
    r.entries.push_back({dump.channels[i].channel_index, scores[i].pcace_value, d.converged,
                         d.dropped_rows, d.retained_dim, d.iterations, d.dead});
  }
  sort_entries(r.entries);
  return r;
}

namespace {

// Channel index -> average rank (1-based) by descending value.
std::map<std::size_t, double> average_ranks(const PcaceRanking& r) {
  std::vector<RankingEntry> e = r.entries;
  sort_entries(e);
  std::map<std::size_t, double> ranks;
  std::size_t i = 0;
  while (i < e.size()) {
    std::size_t j = i;
    while (j + 1 < e.size() && e[j + 1].pcace_value == e[i].pcace_value) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[e[k].channel_index] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double compare_rankings(const PcaceRanking& a, const PcaceRanking& b) {
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  if (ra.size() != a.entries.size() || rb.size() != b.entries.size()) {
    throw Error(ErrorCode::ChannelSetMismatch, "duplicate channel index in a ranking");
  }
  if (ra.size() != rb.size() ||
      !std::equal(ra.begin(), ra.end(), rb.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw Error(ErrorCode::ChannelSetMismatch, "rankings cover different channel sets");
  }

  const double n = static_cast<double>(ra.size());
  const double mid = (n + 1.0) / 2.0;  // mean of 1..n, also with average ranks
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (auto ia = ra.begin(), ib = rb.begin(); ia != ra.end(); ++ia, ++ib) {
    const double da = ia->second - mid;
    const double db = ib->second - mid;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<HistogramBin> histogram(const PcaceRanking& r, std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bins must be >= 1");
  std::vector<HistogramBin> out(bins);
  const double width = 1.0 / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lower = static_cast<double>(b) * width;
    out[b].upper = b + 1 == bins ? 1.0 : static_cast<double>(b + 1) * width;
  }
  for (const auto& e : r.entries) {
    const double v = std::clamp(e.pcace_value, 0.0, 1.0);
    auto b = static_cast<std::size_t>(std::floor(v * static_cast<double>(bins)));
    out[std::min(b, bins - 1)].count++;
  }
  return out;
}

std::vector<double> sorted_values(const PcaceRanking& r) {
  std::vector<double> v;
  v.reserve(r.entries.size());
  for (const auto& e : r.entries) v.push_back(e.pcace_value);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace pcace
