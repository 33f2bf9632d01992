#include <algorithm>
#include <cmath>

#include "mrif/mrfm.hpp"

namespace mrif::mrfm {
namespace {

double local_density(const kernels::Neighbors& nb, std::size_t q,
                     const std::vector<double>& k_distance) {
  double sum = 0.0;
  for (std::size_t j = 0; j < nb.k; ++j) {
    const std::size_t o = nb.index[q * nb.k + j];
    sum += std::max(k_distance[o], nb.distance[q * nb.k + j]);
  }
  return 1.0 / std::max(sum / static_cast<double>(nb.k), kReachabilityFloor);
}

double outlier_factor(const kernels::Neighbors& nb, std::size_t q, double lrd_q,
                      const std::vector<double>& lrd) {
  double sum = 0.0;
  for (std::size_t j = 0; j < nb.k; ++j) sum += lrd[nb.index[q * nb.k + j]];
  return sum / static_cast<double>(nb.k) / lrd_q;
}

}  // namespace

LofScorer::LofScorer(learn::Matrix reference, std::size_t k)
    : reference_(std::move(reference)), k_(k) {
  require(k >= 1 && k < reference_.rows(), ErrorKind::Fit,
          "LOF needs 1 <= k < reference size (k=" + std::to_string(k) +
              ", reference=" + std::to_string(reference_.rows()) + ")");
  require(reference_.all_finite(), ErrorKind::Fit, "LOF reference is not finite");
  const auto nb = kernels::knn(reference_, reference_, k, true);
  const std::size_t n = reference_.rows();
  k_distance_.resize(n);
  for (std::size_t i = 0; i < n; ++i) k_distance_[i] = nb.distance[i * k + k - 1];
  lrd_.resize(n);
  for (std::size_t i = 0; i < n; ++i) lrd_[i] = local_density(nb, i, k_distance_);
  reference_scores_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    reference_scores_[i] = outlier_factor(nb, i, lrd_[i], lrd_);
}

std::vector<double> LofScorer::score(const learn::Matrix& queries) const {
  require(k_ > 0, ErrorKind::State, "LOF scorer is not fitted");
  std::vector<double> out(queries.rows());
  if (queries.empty()) return out;
  require(queries.all_finite(), ErrorKind::InvalidInput, "LOF query is not finite");
  const auto nb = kernels::knn(reference_, queries, k_, false);
  for (std::size_t q = 0; q < queries.rows(); ++q)
    out[q] = outlier_factor(nb, q, local_density(nb, q, k_distance_), lrd_);
  return out;
}

double lof_score(const learn::Matrix& reference, std::span<const double> query,
                 std::size_t k) {
  learn::Matrix q(1, query.size());
  std::copy(query.begin(), query.end(), q.row(0).begin());
  return LofScorer(reference, k).score(q)[0];
}

}  // namespace mrif::mrfm
