#include "nafs/matrix.hpp"

#include <cmath>
#include <cstdlib>

#include "nafs/error.hpp"

namespace nafs {

FeatureMatrix::FeatureMatrix(std::int64_t rows, std::int64_t cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ParamError("matrix dimensions must be non-negative");
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

bool FeatureMatrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void FeatureMatrix::l2_normalize_rows() {
  for (std::int64_t i = 0; i < rows_; ++i) {
    auto r = row(i);
    const double norm = l2_norm(r);
    if (norm == 0.0) continue;
    const double inv = 1.0 / norm;
    for (double& v : r) v *= inv;
  }
}

double max_abs_diff(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ParamError("max_abs_diff: shape mismatch");
  double worst = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i)
    worst = std::max(worst, std::abs(da[i] - db[i]));
  return worst;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace nafs
