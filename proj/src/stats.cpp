#include "pcace/stats.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "pcace/error.hpp"

namespace pcace {

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return ss / static_cast<double>(v.size());
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "pearson inputs differ in length");
  }
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

bool is_degenerate(double mean_value, double stddev) {
  return stddev == 0.0 || stddev < 1e-12 * std::abs(mean_value);
}

StandardizedRows standardize_rows(const DenseMatrix& m) {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> dropped;
  const std::size_t n = m.cols();
  std::vector<double> out;
  out.reserve(m.rows() * n);
  std::vector<double> centered(n);

  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    const double mu = mean(row);
    for (std::size_t j = 0; j < n; ++j) centered[j] = row[j] - mu;
    // second pass removes the rounding residue of the first mean
    const double mu2 = mean(centered);
    for (double& x : centered) x -= mu2;
    const double sd = std::sqrt(variance(centered));
    if (is_degenerate(mu, sd)) {
      dropped.push_back(r);
      continue;
    }
    kept.push_back(r);
    for (double x : centered) out.push_back(x / sd);
  }

  if (kept.empty()) {
    throw Error(ErrorCode::AllRowsDegenerate,
                "all " + std::to_string(m.rows()) + " rows are constant");
  }
  return {DenseMatrix(kept.size(), n, std::move(out)), std::move(dropped)};
}

PcaConfig PcaConfig::fraction(double f) {
  if (!(f > 0.0 && f <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "PCA fraction must lie in (0, 1]");
  }
  PcaConfig c;
  c.use_fraction_ = true;
  c.fraction_ = f;
  return c;
}

PcaConfig PcaConfig::dimension(std::size_t p) {
  if (p == 0) throw Error(ErrorCode::InvalidArgument, "PCA dimension must be >= 1");
  PcaConfig c;
  c.use_fraction_ = false;
  c.dimension_ = p;
  return c;
}

std::size_t PcaConfig::resolve(std::size_t rows, std::size_t cols) const {
  const std::size_t cap = std::min(rows, cols);
  if (use_fraction_) {
    const auto wanted = static_cast<std::size_t>(std::llround(fraction_ * static_cast<double>(rows)));
    return std::clamp<std::size_t>(wanted, 1, cap);
  }
  if (dimension_ > cap) {
    throw Error(ErrorCode::RetentionTooLarge,
                "requested " + std::to_string(dimension_) + " components but only " +
                    std::to_string(cap) + " are available");
  }
  return dimension_;
}

PcaResult pca_reduce(const DenseMatrix& m, const PcaConfig& cfg) {
  const std::size_t p = m.rows();
  const std::size_t n = m.cols();
  const std::size_t keep = cfg.resolve(p, n);

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::MatrixXd x = Eigen::Map<const RowMajor>(m.values().data(), p, n);
  x.colwise() -= x.rowwise().mean();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
  Eigen::MatrixXd u = svd.matrixU().leftCols(keep);
  const Eigen::VectorXd& s = svd.singularValues();

  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Index arg = 0;
    u.col(k).cwiseAbs().maxCoeff(&arg);
    if (u(arg, k) < 0.0) u.col(k) = -u.col(k);
  }

  const double total = x.squaredNorm();
  std::vector<double> ratios(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    ratios[k] = total > 0.0 ? s(static_cast<Eigen::Index>(k)) * s(static_cast<Eigen::Index>(k)) / total : 0.0;
  }

  const RowMajor proj = u.transpose() * x;
  std::vector<double> out(proj.data(), proj.data() + proj.size());
  return {DenseMatrix(keep, n, std::move(out)), std::move(ratios)};
}

}  // namespace pcace
