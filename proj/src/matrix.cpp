#include "pcace/matrix.hpp"

#include <cmath>
#include <string>

#include "pcace/error.hpp"

namespace pcace {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::NonFiniteValue,
                  std::string(what) + " entry " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : DenseMatrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0) {
    throw Error(ErrorCode::ShapeMismatch, "matrix must have at least one row and one column");
  }
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::ShapeMismatch,
                "expected " + std::to_string(rows_ * cols_) + " values, got " +
                    std::to_string(values_.size()));
  }
  require_finite(values_, "matrix");
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::ShapeMismatch, "no rows");
  const std::size_t cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw Error(ErrorCode::ShapeMismatch, "ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return DenseMatrix(rows.size(), cols, std::move(flat));
}

ResponseVector::ResponseVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::ShapeMismatch, "response vector is empty");
  require_finite(values_, "response");
}

}  // namespace pcace
