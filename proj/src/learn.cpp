#include "mrif/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrif/common.hpp"
#include "mrif/rng.hpp"

namespace mrif::learn {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r].size() == m.cols(), ErrorKind::InvalidInput,
            "ragged rows in Matrix::from_rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  require(values.size() == cols_, ErrorKind::InvalidInput,
          "append_row: width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

StandardizeParams standardize_fit(const Matrix& train) {
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();
  require(n > 0, ErrorKind::InvalidInput, "standardize_fit: no rows");
  StandardizeParams p{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += train(r, c);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dv = train(r, c) - mean;
      ss += dv * dv;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    p.mean[c] = mean;
    p.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  return p;
}

Matrix standardize_apply(const Matrix& data, const StandardizeParams& params) {
  require(data.cols() == params.mean.size(), ErrorKind::InvalidInput,
          "standardize_apply: column count mismatch");
  Matrix out(data.rows(), data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t c = 0; c < data.cols(); ++c)
      out(r, c) = (data(r, c) - params.mean[c]) / params.scale[c];
  return out;
}

Standardized standardize_fit_transform(const Matrix& train) {
  auto params = standardize_fit(train);
  auto data = standardize_apply(train, params);
  return {std::move(data), std::move(params)};
}

SymmetricEigen jacobi_eigen(const Matrix& symmetric, double tolerance,
                            int max_sweeps) {
  const std::size_t n = symmetric.rows();
  require(n == symmetric.cols(), ErrorKind::InvalidInput,
          "jacobi_eigen: matrix not square");
  Matrix a = symmetric;
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (double x : a.values()) scale = std::max(scale, std::abs(x));

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= tolerance * std::max(scale, 1e-300)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i) > a(j, j);
  });
  SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    // Sign convention: largest-magnitude entry of each vector is positive.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v(i, order[j])) > std::abs(v(arg, order[j]))) arg = i;
    const double sign = v(arg, order[j]) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = sign * v(i, order[j]);
  }
  return out;
}

Matrix sample_covariance(const Matrix& data, std::span<const double> mean) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  require(n >= 2, ErrorKind::InvalidInput, "sample_covariance: need >= 2 rows");
  Matrix cov(d, d);
  for (std::size_t r = 0; r < n; ++r) {
    auto x = data.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double di = x[i] - mean[i];
      for (std::size_t j = i; j < d; ++j) cov(i, j) += di * (x[j] - mean[j]);
    }
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      cov(i, j) /= denom;
      cov(j, i) = cov(i, j);
    }
  return cov;
}

PcaBasis pca_fit(const Matrix& data, std::size_t k) {
  const std::size_t d = data.cols();
  require(k <= d, ErrorKind::InvalidInput, "pca_fit: k exceeds column count");
  require(data.rows() >= 2, ErrorKind::InvalidInput, "pca_fit: need >= 2 rows");

  PcaBasis basis;
  basis.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t c = 0; c < d; ++c) basis.mean[c] += data(r, c);
  for (double& m : basis.mean) m /= static_cast<double>(data.rows());

  const auto eig = jacobi_eigen(sample_covariance(data, basis.mean));
  basis.eigenvalues = eig.values;
  basis.components = Matrix(d, k);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < k; ++j) basis.components(i, j) = eig.vectors(i, j);

  double total = 0.0;
  for (double ev : eig.values) total += std::max(ev, 0.0);
  basis.explained_variance_ratio.resize(k);
  for (std::size_t j = 0; j < k; ++j)
    basis.explained_variance_ratio[j] =
        total > 0.0 ? std::max(eig.values[j], 0.0) / total : 0.0;
  return basis;
}

Matrix pca_project(const PcaBasis& basis, const Matrix& data) {
  const std::size_t d = basis.mean.size();
  require(data.cols() == d, ErrorKind::InvalidInput,
          "pca_project: column count mismatch");
  Matrix out(data.rows(), basis.k());
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t j = 0; j < basis.k(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        s += (data(r, i) - basis.mean[i]) * basis.components(i, j);
      out(r, j) = s;
    }
  return out;
}

Matrix pca_reconstruct(const PcaBasis& basis, const Matrix& projected) {
  const std::size_t d = basis.mean.size();
  Matrix out(projected.rows(), d);
  for (std::size_t r = 0; r < projected.rows(); ++r)
    for (std::size_t i = 0; i < d; ++i) {
      double s = basis.mean[i];
      for (std::size_t j = 0; j < basis.k(); ++j)
        s += projected(r, j) * basis.components(i, j);
      out(r, i) = s;
    }
  return out;
}

Split stratified_split(std::span<const int> labels, double test_fraction,
                       std::uint64_t seed) {
  require(test_fraction >= 0.0 && test_fraction < 1.0, ErrorKind::InvalidInput,
          "stratified_split: test_fraction must be in [0, 1)");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Split split;
  for (auto& [label, idx] : by_class) {
    require(idx.size() >= 2, ErrorKind::Split,
            "stratified_split: class " + std::to_string(label) +
                " has fewer than 2 rows");
    Rng rng = Rng::derive(seed, "split", static_cast<std::uint64_t>(label));
    rng.shuffle(std::span<std::size_t>(idx));
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(idx.size())));
    split.test.insert(split.test.end(), idx.begin(), idx.begin() + n_test);
    split.train.insert(split.train.end(), idx.begin() + n_test, idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

ClassificationMetrics compute_metrics(std::span<const int> predicted,
                                      std::span<const int> truth, int positive) {
  require(predicted.size() == truth.size(), ErrorKind::InvalidInput,
          "compute_metrics: length mismatch");
  ClassificationMetrics m;
  std::map<int, std::pair<std::size_t, std::size_t>> per_class;  // wrong, total
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool pred_pos = predicted[i] == positive;
    const bool true_pos = truth[i] == positive;
    if (pred_pos && true_pos) ++m.true_positive;
    else if (pred_pos) ++m.false_positive;
    else if (true_pos) ++m.false_negative;
    else ++m.true_negative;
    auto& [wrong, total] = per_class[truth[i]];
    ++total;
    if (predicted[i] != truth[i]) ++wrong;
  }
  const auto tp = static_cast<double>(m.true_positive);
  const auto fp = static_cast<double>(m.false_positive);
  const auto fn = static_cast<double>(m.false_negative);
  m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  for (const auto& [label, counts] : per_class)
    m.error_rate[label] =
        static_cast<double>(counts.first) / static_cast<double>(counts.second);
  return m;
}

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorKind::InvalidInput, "quantile: empty input");
  require(q >= 0.0 && q <= 1.0, ErrorKind::InvalidInput,
          "quantile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace mrif::learn
