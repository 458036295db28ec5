#pragma once

// Test-only helpers: independent oracles and synthetic data generators.
// Nothing here calls into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pcace/dump.hpp"
#include "pcace/matrix.hpp"

namespace pcace::test {

inline std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
  std::normal_distribution<double> dist(0.0, sd);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline double oracle_mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / v.size());
}

inline double oracle_var(const std::vector<double>& v) {
  const long double mu = oracle_mean(v);
  long double s = 0;
  for (double x : v) s += (x - mu) * (x - mu);
  return static_cast<double>(s / v.size());
}

inline double percentile95(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size()))) - 1;
  return v[idx];
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix (row-major, n x n).
/// Returns eigenvalues in descending order.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(at(p, q)) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

/// Sample covariance (population convention) of the rows of a p x n matrix.
inline std::vector<double> row_covariance(const DenseMatrix& m) {
  const std::size_t p = m.rows(), n = m.cols();
  std::vector<double> mu(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < n; ++j) mu[i] += m(i, j);
    mu[i] /= static_cast<double>(n);
  }
  std::vector<double> cov(p * p, 0.0);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += (m(a, j) - mu[a]) * (m(b, j) - mu[b]);
      cov[a * p + b] = s / static_cast<double>(n);
    }
  return cov;
}

/// Synthetic dump: `channels` channels of k x k maps over n images with a
/// Gaussian score. The channel `planted` (if < channels) carries the score in
/// map entry 0 plus N(0, planted_noise^2); every other entry is pure noise.
inline ActivationDump planted_dump(std::uint64_t seed, std::size_t channels, std::size_t k,
                                   std::size_t n, std::size_t planted,
                                   double planted_noise = 0.01) {
  std::mt19937_64 rng(seed);
  const std::vector<double> score = gaussian(rng, n);
  ActivationDump dump{{}, {}, ResponseVector(score)};
  dump.manifest.layer_name = "synthetic";
  dump.manifest.n_images = n;
  dump.manifest.n_channels = channels;
  dump.manifest.map_height = k;
  dump.manifest.map_width = k;
  dump.manifest.score_file = "score.f32";
  for (std::size_t c = 0; c < channels; ++c) {
    dump.manifest.channel_files.push_back("channel_" + std::to_string(c) + ".f32");
    std::vector<double> values = gaussian(rng, k * k * n);
    if (c == planted) {
      const auto noise = gaussian(rng, n, planted_noise);
      for (std::size_t j = 0; j < n; ++j) values[j] = score[j] + noise[j];
    }
    dump.channels.push_back({c, DenseMatrix(k * k, n, std::move(values))});
  }
  return dump;
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pcace_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_dump(const std::filesystem::path& dir, const ActivationDump& d) {
  std::vector<DenseMatrix> mats;
  for (const auto& c : d.channels) mats.push_back(c.matrix);
  pcace::write_dump(dir, d.manifest, mats,
                    std::vector<double>(d.scores.values().begin(), d.scores.values().end()));
}

}  // namespace pcace::test
