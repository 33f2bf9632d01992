#include <doctest.h>

#include <cmath>
#include <set>

#include "../support/oracles.hpp"
#include "mrif/kernels.hpp"
#include "mrif/learn.hpp"
#include "mrif/rng.hpp"

using namespace mrif;
using learn::Matrix;

TEST_CASE("rng streams are reproducible and independent") {
  Rng a = Rng::derive(7, "ues"), b = Rng::derive(7, "ues"), c = Rng::derive(7, "shadow");
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  Rng r(1);
  double sum = 0, sq = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / 20000) < 0.03);
  CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
  for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
}

TEST_CASE("standardize centres and scales, constant columns are only centred") {
  const Matrix m = Matrix::from_rows({{1, 5}, {3, 5}, {5, 5}});
  const auto s = learn::standardize_fit_transform(m);
  CHECK(s.params.mean[0] == doctest::Approx(3));
  CHECK(s.params.scale[1] == 1.0);
  CHECK(s.data(1, 0) == doctest::Approx(0));
  CHECK(s.data(0, 1) == 0.0);
  CHECK(s.data(0, 0) == doctest::Approx(-s.data(2, 0)));
}

TEST_CASE("pca eigenvalues agree with Eigen") {
  Matrix m = oracle::gaussian_rows(300, 6, 11);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    m(r, 1) += 2.0 * m(r, 0);
    m(r, 4) = 0.5 * m(r, 3) - m(r, 2);
  }
  const auto basis = learn::pca_fit(m, 3);
  const auto ref = oracle::covariance_eigenvalues(m);
  REQUIRE(basis.eigenvalues.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i)
    CHECK(std::abs(basis.eigenvalues[i] - ref[i]) < 1e-6);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      double dot = 0;
      for (std::size_t r = 0; r < 6; ++r) dot += basis.components(r, a) * basis.components(r, b);
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-9));
    }
  double ratio = 0;
  for (double v : basis.explained_variance_ratio) ratio += v;
  CHECK(ratio <= 1.0 + 1e-12);
}

TEST_CASE("pca with full rank reconstructs exactly") {
  const Matrix m = oracle::gaussian_rows(50, 4, 3);
  const auto basis = learn::pca_fit(m, 4);
  const auto back = learn::pca_reconstruct(basis, learn::pca_project(basis, m));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(back(r, c) == doctest::Approx(m(r, c)));
}

TEST_CASE("quantile interpolates between order statistics") {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i + 1;
  CHECK(learn::quantile(v, 0.95) == doctest::Approx(95.05));
  CHECK(learn::quantile(v, 0.5) == doctest::Approx(50.5));
  CHECK(learn::quantile(v, 0.0) == 1.0);
  CHECK(learn::quantile(v, 1.0) == 100.0);
}

TEST_CASE("stratified split keeps class shares and is disjoint") {
  std::vector<int> y;
  for (int i = 0; i < 700; ++i) y.push_back(0);
  for (int i = 0; i < 200; ++i) y.push_back(1);
  for (int i = 0; i < 100; ++i) y.push_back(2);
  const auto s = learn::stratified_split(y, 0.3, 5);
  CHECK(s.train.size() + s.test.size() == y.size());
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == y.size());
  std::size_t c[3] = {0, 0, 0};
  for (auto i : s.test) ++c[y[i]];
  CHECK(c[0] == 210);
  CHECK(c[1] == 60);
  CHECK(c[2] == 30);
  CHECK(std::is_sorted(s.test.begin(), s.test.end()));
  CHECK(learn::stratified_split(y, 0.3, 5).test == s.test);
}

TEST_CASE("classification metrics") {
  const std::vector<int> pred = {1, 1, 0, 0, 1, 0};
  const std::vector<int> truth = {1, 0, 1, 0, 1, 0};
  const auto m = learn::compute_metrics(pred, truth, 1);
  CHECK(m.true_positive == 2);
  CHECK(m.false_positive == 1);
  CHECK(m.false_negative == 1);
  CHECK(m.true_negative == 2);
  CHECK(m.precision == doctest::Approx(2.0 / 3));
  CHECK(m.recall == doctest::Approx(2.0 / 3));
  CHECK(m.f1 == doctest::Approx(2.0 / 3));
  CHECK(m.error_rate.at(0) == doctest::Approx(1.0 / 3));
}

TEST_CASE("cholesky factor reproduces the matrix, serial twin agrees") {
  const std::size_t n = 6;
  Matrix b = oracle::gaussian_rows(n, n, 8);
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = i == j ? 1.0 : 0.0;
      for (std::size_t k = 0; k < n; ++k) s += b(i, k) * b(j, k);
      a[i * n + j] = s;
    }
  auto l = a, ls = a;
  kernels::cholesky_lower(l, n);
  kernels::serial::cholesky_lower(ls, n);
  CHECK(l == ls);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += l[i * n + k] * l[j * n + k];
      CHECK(s == doctest::Approx(a[i * n + j]).epsilon(1e-12));
    }
  std::vector<double> bad = {1, 2, 2, 1};
  CHECK_THROWS_AS(kernels::cholesky_lower(bad, 2), Error);
  const std::vector<double> z = {1, -1, 0.5, 2, 0, 1};
  CHECK(kernels::lower_matvec(l, n, z) == kernels::serial::lower_matvec(l, n, z));
}

TEST_CASE("knn and radius counts match brute force and the serial twins") {
  const Matrix ref = oracle::gaussian_rows(120, 3, 21);
  const Matrix q = oracle::gaussian_rows(40, 3, 22);
  const auto nb = kernels::knn(ref, q, 5, false);
  CHECK(nb.index == kernels::serial::knn(ref, q, 5, false).index);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const auto expect = oracle::neighbours(ref, q, i, 5, -1);
    for (std::size_t j = 0; j < 5; ++j) CHECK(nb.index[i * 5 + j] == expect[j]);
  }
  const auto self = kernels::knn(ref, ref, 4, true);
  for (std::size_t i = 0; i < ref.rows(); ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(self.index[i * 4 + j] != i);

  const auto counts = kernels::radius_counts(ref, 1.0);
  CHECK(counts == kernels::serial::radius_counts(ref, 1.0));
  for (std::size_t i = 0; i < ref.rows(); ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < ref.rows(); ++j)
      if (j != i && oracle::dist(ref, i, ref, j) <= 1.0) ++c;
    CHECK(counts[i] == c);
  }
}
