#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace mrif::learn {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  std::vector<double> column(std::size_t c) const;
  Matrix select_rows(std::span<const std::size_t> indices) const;
  void append_row(std::span<const double> values);
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

/// Per-column mean and scale. A column whose standard deviation is below
/// 1e-12 keeps scale 1 so that it is only centred.
struct StandardizeParams {
  std::vector<double> mean;
  std::vector<double> scale;
};

StandardizeParams standardize_fit(const Matrix& train);
Matrix standardize_apply(const Matrix& data, const StandardizeParams& params);

struct Standardized {
  Matrix data;
  StandardizeParams params;
};
Standardized standardize_fit_transform(const Matrix& train);

// ---------------------------------------------------------------------------
// PCA
// ---------------------------------------------------------------------------

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymmetricEigen jacobi_eigen(const Matrix& symmetric, double tolerance = 1e-14,
                            int max_sweeps = 100);

Matrix sample_covariance(const Matrix& data, std::span<const double> mean);

struct PcaBasis {
  std::vector<double> mean;
  Matrix components;  // cols x k, orthonormal columns
  std::vector<double> eigenvalues;  // all eigenvalues, descending
  std::vector<double> explained_variance_ratio;  // first k

  std::size_t k() const noexcept { return components.cols(); }
};

PcaBasis pca_fit(const Matrix& data, std::size_t k);
Matrix pca_project(const PcaBasis& basis, const Matrix& data);
Matrix pca_reconstruct(const PcaBasis& basis, const Matrix& projected);

// ---------------------------------------------------------------------------
// Splitting and metrics
// ---------------------------------------------------------------------------

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per-class shuffled split; each class contributes round(fraction * n_c)
/// test rows. Both index lists are returned in ascending order.
Split stratified_split(std::span<const int> labels, double test_fraction,
                       std::uint64_t seed);

struct ClassificationMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;
  /// Misclassified / total, per class present in the truth labels.
  std::map<int, double> error_rate;
};

ClassificationMetrics compute_metrics(std::span<const int> predicted,
                                      std::span<const int> truth,
                                      int positive);

/// Quantile with linear interpolation between order statistics
/// (h = (n - 1) q).
double quantile(std::vector<double> values, double q);

}  // namespace mrif::learn
