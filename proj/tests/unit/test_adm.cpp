#include <doctest.h>

#include "../support/oracles.hpp"
#include "mrif/adm.hpp"

using namespace mrif;
using namespace mrif::adm;
using learn::Matrix;

TEST_CASE("autoencoder gradient matches central differences") {
  AeConfig cfg;
  cfg.hidden = {2};
  cfg.seed = 5;
  Autoencoder ae(4, cfg);
  const Matrix rows = oracle::gaussian_rows(10, 4, 2);
  CHECK(oracle::ae_gradient_error(ae, rows, 1e-5) < 1e-4);

  cfg.hidden = {8, 4, 8};
  Autoencoder deep(16, cfg);
  CHECK(oracle::ae_gradient_error(deep, oracle::gaussian_rows(10, 16, 3), 1e-5) < 1e-4);
}

TEST_CASE("parameters round trip and loss of a known model") {
  AeConfig cfg;
  cfg.hidden = {2};
  Autoencoder ae(3, cfg);
  auto p = ae.parameters();
  CHECK(p.size() == 3 * 2 + 2 + 2 * 3 + 3);
  std::fill(p.begin(), p.end(), 0.0);
  ae.set_parameters(p);
  // All-zero weights reconstruct zero: the loss is the mean square of the input.
  const Matrix rows = Matrix::from_rows({{1, 2, 3}, {0, 0, 3}});
  CHECK(ae.loss(rows) == doctest::Approx((14.0 / 3 + 9.0 / 3) / 2));
}

TEST_CASE("training reduces reconstruction loss by half") {
  Matrix rows = oracle::gaussian_rows(1000, 6, 9);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    rows(r, 3) = rows(r, 0) + 0.1 * rows(r, 3);
    rows(r, 4) = rows(r, 1) - rows(r, 0);
    rows(r, 5) = 0.5 * rows(r, 2);
  }
  AeConfig cfg;
  cfg.hidden = {4};
  cfg.epochs = 60;
  cfg.learning_rate = 1e-2;
  const auto ae = ae_train(rows, cfg);
  REQUIRE(ae.epoch_loss.size() == 61);
  CHECK(ae.loss(rows) <= 0.5 * ae.epoch_loss.front());
  CHECK(ae_train(rows, cfg).parameters() == ae.parameters());
}

TEST_CASE("zero epochs keep the initial weights") {
  AeConfig cfg;
  cfg.epochs = 0;
  const Matrix rows = oracle::gaussian_rows(120, 5, 1);
  CHECK(ae_train(rows, cfg).parameters() == Autoencoder(5, cfg).parameters());
}

TEST_CASE("duplicating rows with doubled batches gives identical weights") {
  const Matrix rows = oracle::gaussian_rows(128, 4, 17);
  Matrix doubled(256, 4);
  for (std::size_t r = 0; r < 128; ++r)
    for (std::size_t c = 0; c < 4; ++c) doubled(2 * r, c) = doubled(2 * r + 1, c) = rows(r, c);
  AeConfig cfg;
  cfg.hidden = {3};
  cfg.epochs = 5;
  cfg.shuffle = false;
  cfg.batch_size = 16;
  const auto a = ae_train(rows, cfg);
  cfg.batch_size = 32;
  const auto b = ae_train(doubled, cfg);
  const auto pa = a.parameters(), pb = b.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == doctest::Approx(pb[i]).epsilon(1e-12));
}

TEST_CASE("threshold calibration") {
  std::vector<double> e(100);
  for (int i = 0; i < 100; ++i) e[i] = i + 1;
  CHECK(ae_calibrate_threshold(e, 0.05) == doctest::Approx(95.05));
  CHECK(ae_calibrate_threshold(e, 0.5) == doctest::Approx(50.5));
  CHECK_THROWS_AS(ae_calibrate_threshold(e, 0.0), Error);
  CHECK_THROWS_AS(ae_calibrate_threshold({}, 0.1), Error);
}

TEST_CASE("classification flags strictly above the threshold") {
  AeConfig cfg;
  cfg.hidden = {2};
  Autoencoder ae(2, cfg);
  const Matrix rows = Matrix::from_rows({{0, 0}, {3, -3}, {10, 10}});
  const auto err = ae_reconstruction_error(ae, rows);
  ae.threshold = err[1];
  const auto cls = ae_classify(ae, rows);
  CHECK(cls[1] == 0);
  CHECK(cls[2] == (err[2] > err[1] ? 1 : 0));
  Autoencoder untrained(2, cfg);
  CHECK_THROWS_AS(ae_classify(untrained, rows), Error);
}

TEST_CASE("boosted trees separate a simple rule and never raise the loss") {
  Matrix x = oracle::gaussian_rows(600, 3, 4);
  std::vector<int> y(600);
  for (std::size_t r = 0; r < 600; ++r) y[r] = x(r, 0) + 0.5 * x(r, 1) > 0.3 ? 1 : 0;
  GbtConfig cfg;
  cfg.rounds = 30;
  const auto m = gbt_train(x, y, cfg);
  for (std::size_t i = 1; i < m.train_loss.size(); ++i)
    CHECK(m.train_loss[i] <= m.train_loss[i - 1] + 1e-12);
  const auto p = gbt_predict(m, x);
  std::size_t right = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i] >= 0.0);
    CHECK(p[i] <= 1.0);
    right += (p[i] > 0.5) == (y[i] == 1);
  }
  CHECK(right >= 570);
  CHECK(log_loss(p, y) == doctest::Approx(m.train_loss.back()).epsilon(1e-9));
  CHECK(gbt_predict(gbt_train(x, y, cfg), x) == p);
}

TEST_CASE("boosted trees reject a single class") {
  const Matrix x = oracle::gaussian_rows(20, 2, 1);
  const std::vector<int> y(20, 0);
  try {
    gbt_train(x, y, {});
    FAIL("expected a training error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Training);
  }
}
