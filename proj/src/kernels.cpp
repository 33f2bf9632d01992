#include "mrif/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "mrif/common.hpp"

namespace mrif::kernels {
namespace {

inline double dot_prefix(const double* a, const double* b, std::size_t len) {
  double s = 0.0;
  for (std::size_t k = 0; k < len; ++k) s += a[k] * b[k];
  return s;
}

inline double sq_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void check_square(std::span<const double> a, std::size_t n) {
  require(a.size() == n * n, ErrorKind::InvalidInput,
          "cholesky: buffer is not n x n");
}

void knn_one(const learn::Matrix& reference, std::span<const double> q,
             std::size_t self, bool exclude_self, std::size_t k,
             std::vector<std::pair<double, std::size_t>>& scratch,
             std::size_t* out_idx, double* out_dist) {
  scratch.clear();
  for (std::size_t j = 0; j < reference.rows(); ++j) {
    if (exclude_self && j == self) continue;
    scratch.emplace_back(sq_distance(q, reference.row(j)), j);
  }
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
                    scratch.end());
  for (std::size_t t = 0; t < k; ++t) {
    out_idx[t] = scratch[t].second;
    out_dist[t] = std::sqrt(scratch[t].first);
  }
}

Neighbors knn_prepare(const learn::Matrix& reference,
                      const learn::Matrix& queries, std::size_t k,
                      bool exclude_self) {
  require(reference.cols() == queries.cols() || queries.rows() == 0,
          ErrorKind::InvalidInput, "knn: dimension mismatch");
  const std::size_t available = reference.rows() - (exclude_self ? 1 : 0);
  require(k >= 1 && k <= available, ErrorKind::InvalidInput,
          "knn: k must be in [1, reference size]");
  if (exclude_self)
    require(queries.rows() == reference.rows(), ErrorKind::InvalidInput,
            "knn: exclude_self needs queries == reference");
  Neighbors nb;
  nb.k = k;
  nb.index.resize(queries.rows() * k);
  nb.distance.resize(queries.rows() * k);
  return nb;
}

}  // namespace

void cholesky_lower(std::span<double> a, std::size_t n) {
  check_square(a, n);
  double* m = a.data();
  for (std::size_t j = 0; j < n; ++j) {
    double* rj = m + j * n;
    const double pivot = rj[j] - dot_prefix(rj, rj, j);
    require(pivot > 0.0 && std::isfinite(pivot), ErrorKind::InvalidInput,
            "cholesky: matrix is not positive definite");
    const double ljj = std::sqrt(pivot);
    rj[j] = ljj;
    const auto first = static_cast<std::ptrdiff_t>(j + 1);
    const auto last = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = first; i < last; ++i) {
      double* ri = m + static_cast<std::size_t>(i) * n;
      ri[j] = (ri[j] - dot_prefix(ri, rj, j)) / ljj;
    }
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    std::fill(m + static_cast<std::size_t>(i) * n + static_cast<std::size_t>(i) + 1,
              m + (static_cast<std::size_t>(i) + 1) * n, 0.0);
}

std::vector<double> lower_matvec(std::span<const double> lower, std::size_t n,
                                 std::span<const double> z) {
  require(z.size() == n && lower.size() == n * n, ErrorKind::InvalidInput,
          "lower_matvec: size mismatch");
  std::vector<double> y(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto r = static_cast<std::size_t>(i);
    y[r] = dot_prefix(lower.data() + r * n, z.data(), r + 1);
  }
  return y;
}

Neighbors knn(const learn::Matrix& reference, const learn::Matrix& queries,
              std::size_t k, bool exclude_self) {
  Neighbors nb = knn_prepare(reference, queries, k, exclude_self);
#pragma omp parallel
  {
    std::vector<std::pair<double, std::size_t>> scratch;
    scratch.reserve(reference.rows());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(queries.rows()); ++i) {
      const auto q = static_cast<std::size_t>(i);
      knn_one(reference, queries.row(q), q, exclude_self, k, scratch,
              nb.index.data() + q * k, nb.distance.data() + q * k);
    }
  }
  return nb;
}

std::vector<std::size_t> radius_counts(const learn::Matrix& points,
                                       double radius) {
  const double r2 = radius * radius;
  std::vector<std::size_t> counts(points.rows(), 0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(points.rows()); ++i) {
    const auto a = static_cast<std::size_t>(i);
    std::size_t c = 0;
    for (std::size_t b = 0; b < points.rows(); ++b)
      if (b != a && sq_distance(points.row(a), points.row(b)) <= r2) ++c;
    counts[a] = c;
  }
  return counts;
}

namespace serial {

void cholesky_lower(std::span<double> a, std::size_t n) {
  check_square(a, n);
  // Cholesky-Banachiewicz, row by row.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < j; ++k) s += a[i * n + k] * a[j * n + k];
      if (i == j) {
        const double pivot = a[i * n + i] - s;
        require(pivot > 0.0 && std::isfinite(pivot), ErrorKind::InvalidInput,
                "cholesky: matrix is not positive definite");
        a[i * n + i] = std::sqrt(pivot);
      } else {
        a[i * n + j] = (a[i * n + j] - s) / a[j * n + j];
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) a[i * n + j] = 0.0;
  }
}

std::vector<double> lower_matvec(std::span<const double> lower, std::size_t n,
                                 std::span<const double> z) {
  require(z.size() == n && lower.size() == n * n, ErrorKind::InvalidInput,
          "lower_matvec: size mismatch");
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += lower[i * n + k] * z[k];
    y[i] = s;
  }
  return y;
}

Neighbors knn(const learn::Matrix& reference, const learn::Matrix& queries,
              std::size_t k, bool exclude_self) {
  Neighbors nb = knn_prepare(reference, queries, k, exclude_self);
  std::vector<std::pair<double, std::size_t>> scratch;
  for (std::size_t q = 0; q < queries.rows(); ++q)
    knn_one(reference, queries.row(q), q, exclude_self, k, scratch,
            nb.index.data() + q * k, nb.distance.data() + q * k);
  return nb;
}

std::vector<std::size_t> radius_counts(const learn::Matrix& points,
                                       double radius) {
  const double r2 = radius * radius;
  std::vector<std::size_t> counts(points.rows(), 0);
  for (std::size_t a = 0; a < points.rows(); ++a)
    for (std::size_t b = a + 1; b < points.rows(); ++b)
      if (sq_distance(points.row(a), points.row(b)) <= r2) {
        ++counts[a];
        ++counts[b];
      }
  return counts;
}

}  // namespace serial
}  // namespace mrif::kernels
