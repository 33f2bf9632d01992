#pragma once

// Data-parallel kernels shared by the radio, detection and filtering code.
//
// Each kernel in mrif::kernels has a plain single-threaded twin in
// mrif::kernels::serial. The OpenMP versions only parallelize over
// independent output elements and keep every per-element reduction in a
// fixed order, so both variants return bit-identical results for any thread
// count. Tests assert that equality; bench/ measures the speedup.

#include <cstddef>
#include <span>
#include <vector>

#include "mrif/learn.hpp"

namespace mrif::kernels {

/// In-place lower Cholesky factor of a row-major n x n SPD matrix. The strict
/// upper triangle is zeroed. Throws Error(InvalidInput) when a pivot is not
/// positive.
void cholesky_lower(std::span<double> a, std::size_t n);

/// y = L z for a row-major lower-triangular L.
std::vector<double> lower_matvec(std::span<const double> lower, std::size_t n,
                                 std::span<const double> z);

struct Neighbors {
  // k entries per query, ordered by (distance, reference index).
  std::vector<std::size_t> index;
  std::vector<double> distance;
  std::size_t k = 0;
};

/// Brute-force k nearest reference rows for every query row (Euclidean).
/// When exclude_self is set, query i never returns reference i; the query
/// and reference sets are then expected to be the same matrix.
Neighbors knn(const learn::Matrix& reference, const learn::Matrix& queries,
              std::size_t k, bool exclude_self);

/// For each point, the number of *other* points within radius (inclusive).
std::vector<std::size_t> radius_counts(const learn::Matrix& points,
                                       double radius);

namespace serial {

void cholesky_lower(std::span<double> a, std::size_t n);
std::vector<double> lower_matvec(std::span<const double> lower, std::size_t n,
                                 std::span<const double> z);
Neighbors knn(const learn::Matrix& reference, const learn::Matrix& queries,
              std::size_t k, bool exclude_self);
std::vector<std::size_t> radius_counts(const learn::Matrix& points,
                                       double radius);

}  // namespace serial

}  // namespace mrif::kernels
