#include <doctest.h>

#include <cmath>

#include "mrif/radio.hpp"
#include "mrif/rng.hpp"

using namespace mrif;
using namespace mrif::radio;

namespace {

NetworkLayout three_sites() {
  NetworkLayout l;
  l.sites = {{1, {100, 100}, 30.0, 50, true},
             {2, {600, 100}, 33.0, 50, true},
             {3, {300, 700}, 27.0, 25, true}};
  return l;
}

// Hand computation of received power per resource element.
double rsrp_by_hand(const CellSite& s, Point ue) {
  const double d = std::max(std::hypot(ue.x - s.position.x, ue.y - s.position.y), 10.0);
  return s.tx_power_dbm - 10.0 * std::log10(12.0 * s.bandwidth_rb) -
         (128.1 + 37.6 * std::log10(d / 1000.0));
}

}  // namespace

TEST_CASE("pathloss reference points") {
  PathlossParams p;
  CHECK(compute_pathloss(1000.0, p) == doctest::Approx(128.1).epsilon(1e-12));
  CHECK(compute_pathloss(100.0, p) == doctest::Approx(128.1 - 37.6).epsilon(1e-12));
  CHECK(compute_pathloss(0.0, p) == compute_pathloss(10.0, p));
  CHECK(compute_pathloss(3.0, p) == compute_pathloss(10.0, p));
}

TEST_CASE("rsrp rsrq and sinr match a hand computation") {
  const auto layout = three_sites();
  const Point ue{250, 220};
  const std::vector<double> shadow = {1.5, -2.0, 0.25};
  const auto s = compute_radio_sample(ue, layout, shadow);

  std::vector<double> rsrp(3), lin(3);
  for (int i = 0; i < 3; ++i) {
    rsrp[i] = rsrp_by_hand(layout.sites[i], ue) + shadow[i];
    lin[i] = std::pow(10.0, rsrp[i] / 10.0);
    CHECK(s.rsrp_dbm[i] == doctest::Approx(rsrp[i]).epsilon(1e-12));
  }
  const int best = static_cast<int>(std::max_element(rsrp.begin(), rsrp.end()) - rsrp.begin());
  CHECK(s.serving_index == static_cast<std::size_t>(best));
  CHECK(s.serving_id == best + 1);

  // Noise over one resource element, RSSI over N resource blocks.
  const double noise_re = std::pow(10.0, (layout.noise_dbm_per_rb - 10 * std::log10(12.0)) / 10);
  const double total = lin[0] + lin[1] + lin[2];
  for (int i = 0; i < 3; ++i) {
    const double n_rb = 50.0;
    const double rssi = 12.0 * n_rb * (total + noise_re);
    CHECK(s.rsrq_db[i] == doctest::Approx(10 * std::log10(n_rb * lin[i] / rssi)).epsilon(1e-12));
  }
  const double sinr = 10 * std::log10(lin[best] / (total - lin[best] + noise_re));
  CHECK(s.sinr_db == doctest::Approx(sinr).epsilon(1e-12));
  CHECK(s.neighbor_ids.size() == 2);
  CHECK(s.rsrp_dbm[layout.index_of(s.neighbor_ids[0])] >=
        s.rsrp_dbm[layout.index_of(s.neighbor_ids[1])]);
}

TEST_CASE("rsrq is at most -10log10(12) and finite") {
  auto layout = make_grid_layout(3, 3, {}, 30.0, 50);
  const auto shadow = ShadowMap::zero(layout);
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto s = sample_at({rng.uniform(0, 1000), rng.uniform(0, 1000)}, layout, shadow);
    for (double q : s.rsrq_db) {
      CHECK(std::isfinite(q));
      CHECK(q <= -10 * std::log10(12.0) + 1e-9);
    }
  }
}

TEST_CASE("symmetric two-site point has 0 dB sinr without noise") {
  NetworkLayout l;
  l.sites = {{1, {0, 500}, 30, 50, true}, {2, {1000, 500}, 30, 50, true}};
  l.noise_dbm_per_rb = -400.0;
  const auto s = compute_radio_sample({500, 500}, l, std::vector<double>{0, 0});
  CHECK(s.sinr_db == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.serving_id == 1);  // tie goes to the lower index
}

TEST_CASE("single site sinr is rsrp over noise") {
  NetworkLayout l;
  l.sites = {{7, {0, 0}, 30, 50, true}};
  const auto s = compute_radio_sample({300, 400}, l, std::vector<double>{0});
  const double noise_re = l.noise_dbm_per_rb - 10 * std::log10(12.0);
  CHECK(s.sinr_db == doctest::Approx(s.rsrp_dbm[0] - noise_re).epsilon(1e-12));
  CHECK(s.neighbor_ids.empty());
}

TEST_CASE("more interference lowers sinr") {
  auto l = three_sites();
  const Point ue{150, 120};
  const std::vector<double> zero = {0, 0, 0};
  const double before = compute_radio_sample(ue, l, zero).sinr_db;
  l.sites[2].tx_power_dbm += 6.0;
  CHECK(compute_radio_sample(ue, l, zero).sinr_db < before);
}

TEST_CASE("inactive sites carry no signal and no active site is an error") {
  auto l = three_sites();
  l.sites[0].active = false;
  const auto s = compute_radio_sample({100, 100}, l, std::vector<double>{0, 0, 0});
  CHECK(std::isinf(s.rsrp_dbm[0]));
  CHECK(s.rsrp_dbm[0] < 0);
  CHECK(s.serving_id != 1);
  for (auto& site : l.sites) site.active = false;
  try {
    compute_radio_sample({1, 1}, l, std::vector<double>{0, 0, 0});
    FAIL("expected NoCoverage");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoCoverage);
  }
}

TEST_CASE("grid layout ids are row-major from the lower left") {
  const auto l = make_grid_layout(3, 3, {}, 30.0, 50);
  REQUIRE(l.sites.size() == 9);
  CHECK(l.site(1).position.x < l.site(3).position.x);
  CHECK(l.site(1).position.y == l.site(3).position.y);
  CHECK(l.site(7).position.y > l.site(1).position.y);
  CHECK(l.site(5).position == Point{500, 500});
}

TEST_CASE("layout validation") {
  auto l = three_sites();
  l.sites[1].id = 1;
  CHECK_THROWS_AS(l.validate(), Error);
  l = three_sites();
  l.sites[0].position = {-5, 0};
  CHECK_THROWS_AS(l.validate(), Error);
}

TEST_CASE("shadowing field: zero sigma and coincident points") {
  ShadowingParams p;
  p.sigma_db = 0.0;
  std::vector<Point> pts = {{0, 0}, {10, 0}, {400, 300}};
  for (double v : sample_shadowing_field(pts, p, 3)) CHECK(v == 0.0);
  p.sigma_db = 8.0;
  pts = {{5, 5}, {5, 5}, {200, 10}};
  const auto f = sample_shadowing_field(pts, p, 3);
  CHECK(f[0] == f[1]);
}

TEST_CASE("shadowing field is deterministic and capacity-limited") {
  ShadowingParams p;
  std::vector<Point> pts = {{0, 0}, {30, 40}, {100, 0}};
  CHECK(sample_shadowing_field(pts, p, 9) == sample_shadowing_field(pts, p, 9));
  CHECK(sample_shadowing_field(pts, p, 9) != sample_shadowing_field(pts, p, 10));
  p.max_points = 2;
  try {
    sample_shadowing_field(pts, p, 1);
    FAIL("expected Capacity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
  }
}

TEST_CASE("shadowing covariance matches the exponential model") {
  // 5000 independent draws; every sample covariance within 3 standard errors.
  ShadowingParams p;
  const std::vector<Point> pts = {{0, 0}, {25, 0}, {50, 0}, {0, 100}, {300, 300}};
  const std::size_t draws = 5000, n = pts.size();
  std::vector<double> sum(n * n, 0.0), sq(n * n, 0.0);
  for (std::size_t s = 0; s < draws; ++s) {
    const auto f = sample_shadowing_field(pts, p, 1000 + s);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        sum[i * n + j] += f[i] * f[j];
        sq[i * n + j] += f[i] * f[i] * f[j] * f[j];
      }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double mean = sum[i * n + j] / draws;
      const double var = sq[i * n + j] / draws - mean * mean;
      const double se = std::sqrt(var / draws);
      const double expected = 64.0 * std::exp(-distance(pts[i], pts[j]) / 50.0);
      CHECK(std::abs(mean - expected) <= 3.0 * se);
    }
}

TEST_CASE("shadow map is shared by nearby positions") {
  const auto l = make_grid_layout(3, 3, {}, 30.0, 50);
  const ShadowMap m(l, 5);
  CHECK(m.site_count() == 9);
  CHECK(m.at(0, {100, 100}) == m.at(0, {101, 101}));
  CHECK(m.at({100, 100}).size() == 9);
  const ShadowMap z = ShadowMap::zero(l);
  CHECK(z.at(4, {333, 777}) == 0.0);
}

TEST_CASE("coverage map geometry and parallel equality") {
  const auto l = make_grid_layout(3, 3, {}, 30.0, 50);
  const ShadowMap m(l, 2);
  const auto g = coverage_map(l, 50.0, m);
  CHECK(g.nx == 20);
  CHECK(g.ny == 20);
  CHECK(g.centers.front() == Point{25, 25});
  CHECK(g.sinr_db.size() == 400);

  const auto pts = grid_points(l.area, 20.0);
  const auto par = evaluate_points(l, pts, m);
  const auto ser = serial::evaluate_points(l, pts, m);
  CHECK(par.sinr_db == ser.sinr_db);
  CHECK(par.serving_id == ser.serving_id);
  CHECK(par.serving_rsrp_dbm == ser.serving_rsrp_dbm);
}
