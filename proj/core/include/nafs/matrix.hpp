#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nafs {

// Dense row-major matrix of doubles. One type serves node features,
// propagated feature stacks, distance/weight profiles and embeddings.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::int64_t rows, std::int64_t cols, double fill = 0.0);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  std::span<double> row(std::int64_t i) {
    return {data_.data() + i * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(std::int64_t i) const {
    return {data_.data() + i * cols_, static_cast<std::size_t>(cols_)};
  }

  double& operator()(std::int64_t i, std::int64_t j) { return data_[i * cols_ + j]; }
  double operator()(std::int64_t i, std::int64_t j) const { return data_[i * cols_ + j]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const;

  // Scales every row to unit L2 norm; all-zero rows are left untouched.
  void l2_normalize_rows();

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<double> data_;
};

double max_abs_diff(const FeatureMatrix& a, const FeatureMatrix& b);

double l2_norm(std::span<const double> v);
double l1_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace nafs
