#include <doctest.h>

#include "../support/oracles.hpp"
#include "mrif/fdt.hpp"
#include "mrif/rng.hpp"

using namespace mrif;
using namespace mrif::fdt;

namespace {

std::vector<Point> random_sites(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({rng.uniform(0, 1000), rng.uniform(0, 1000)});
  return out;
}

}  // namespace

TEST_CASE("single home matches exhaustive search") {
  const radio::Area area;
  const auto pts = objective_points(area);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto cand = random_sites(1 + s % 8, s);
    const auto fleet = place_fdts(cand, 1, area);
    CHECK(coverage_radius(fleet.homes, pts) ==
          doctest::Approx(oracle::exhaustive_k_center(cand, 1, pts)).epsilon(1e-12));
  }
}

TEST_CASE("greedy placement within twice the optimum and non-increasing in k") {
  const radio::Area area;
  const auto pts = objective_points(area);
  for (std::uint64_t s = 1; s <= 30; ++s) {
    const auto cand = random_sites(8, 100 + s);
    double prev = INFINITY;
    for (std::size_t k = 1; k <= cand.size(); ++k) {
      const auto fleet = place_fdts(cand, k, area);
      CHECK(fleet.size() == k);
      const double got = coverage_radius(fleet.homes, pts);
      CHECK(got <= 2.0 * oracle::exhaustive_k_center(cand, k, pts) + 1e-9);
      CHECK(got <= prev + 1e-12);
      prev = got;
    }
    CHECK(prev == doctest::Approx(coverage_radius(cand, pts)));
  }
}

TEST_CASE("placement errors") {
  const auto cand = random_sites(3, 1);
  CHECK_THROWS_AS(place_fdts(cand, 4, {}), Error);
  CHECK_THROWS_AS(place_fdts(cand, 0, {}), Error);
}

TEST_CASE("dispatch picks the nearest home") {
  FdtFleet f{{{0, 0}, {100, 0}, {50, 80}}, 10.0};
  auto d = dispatch(f, {100, 0});
  CHECK(d.fdt_index == 1);
  CHECK(d.travel_time_s == 0.0);
  d = dispatch(f, {50, 0});
  CHECK(d.fdt_index == 0);
  CHECK(d.travel_time_s == doctest::Approx(5.0));
  f.speed_mps = 20.0;
  CHECK(dispatch(f, {50, 0}).travel_time_s == doctest::Approx(2.5));
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Point t{rng.uniform(0, 1000), rng.uniform(0, 1000)};
    const auto got = dispatch(f, t);
    for (auto h : f.homes) CHECK(got.travel_time_s <= distance(t, h) / f.speed_mps + 1e-12);
  }
}

TEST_CASE("verification against the true network") {
  auto l = scenario::default_layout();
  const auto shadow = radio::ShadowMap(l, 1);
  const Point p{500, 500};
  auto v = verify_at(p, {}, l, shadow);
  CHECK(v.verdict == Verdict::AttackConfirmed);
  CHECK(verify_at(p, {}, l, shadow, -INFINITY).verdict == Verdict::AttackConfirmed);
  for (auto& s : l.sites) s.active = false;
  v = verify_at(p, {}, l, shadow);
  CHECK(v.verdict == Verdict::OutageConfirmed);
  CHECK(std::isinf(v.measured_rsrp_dbm));
  CHECK_THROWS_AS(verify_at({-1, 5}, {}, l, shadow), Error);
}
