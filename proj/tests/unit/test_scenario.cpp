#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "mrif/adversary.hpp"
#include "mrif/scenario.hpp"

using namespace mrif;
using namespace mrif::scenario;

namespace {

ScenarioConfig small_config(std::uint64_t seed = 3) {
  ScenarioConfig c;
  c.layout = default_layout();
  c.n_ues = 200;
  c.n_reports = 900;
  c.outage_cells = {5};
  c.rng_seed = seed;
  return c;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::State;
}

}  // namespace

TEST_CASE("ue deployment stays in the area and is centred") {
  radio::Area area;
  const auto ues = deploy_ues(4000, area, 9);
  double mx = 0, my = 0;
  for (auto p : ues) {
    CHECK(area.contains(p));
    mx += p.x;
    my += p.y;
  }
  // Uniform on [0, 1000]: sd of the mean is 1000 / sqrt(12 * 4000) = 4.56.
  CHECK(std::abs(mx / 4000 - 500) < 4 * 4.56);
  CHECK(std::abs(my / 4000 - 500) < 4 * 4.56);
}

TEST_CASE("report stream invariants") {
  const auto cfg = small_config();
  const auto world = make_world(cfg);
  const auto ds = generate_reports(world);
  REQUIRE(ds.size() == 900);
  CHECK(ds.config_digest == cfg.digest());
  for (const auto& r : ds.reports) {
    CHECK(r.serving_cell != 5);
    CHECK(cfg.layout.area.contains(r.position));
    for (std::size_t k = 1; k < kNeighborSlots; ++k)
      CHECK(r.neighbor_rsrp_dbm[k] <= r.neighbor_rsrp_dbm[k - 1]);
    CHECK(r.neighbor_rsrp_dbm[0] <= r.serving_rsrp_dbm);
    // Eight active sites leave seven neighbours: six slots, no padding.
    CHECK(r.neighbor_rsrp_dbm[5] > kSentinelRsrpDbm);
    const bool out = world.healthy_serving[static_cast<std::size_t>(r.ue_id)] == 5;
    CHECK((r.label == Label::RealOutage) == out);
  }
  CHECK(ds.count(Label::RealOutage) > 0);
  CHECK(ds.count(Label::Malicious) == 0);
  CHECK(ds.features().cols() == kFeatureCount);
  CHECK(ds.reports[200].tick == 1);
  CHECK(ds.reports[200].ue_id == 0);
}

TEST_CASE("few active sites pad with sentinels") {
  auto cfg = small_config();
  cfg.outage_cells = {1, 2, 3, 4, 6, 7};
  const auto ds = generate_reports(cfg);
  for (const auto& r : ds.reports) {
    CHECK(r.neighbor_rsrp_dbm[1] > kSentinelRsrpDbm);
    for (std::size_t k = 2; k < kNeighborSlots; ++k) {
      CHECK(r.neighbor_rsrp_dbm[k] == kSentinelRsrpDbm);
      CHECK(r.neighbor_rsrq_db[k] == kSentinelRsrqDb);
    }
  }
}

TEST_CASE("generation is deterministic in the seed") {
  CHECK(generate_reports(small_config(3)) == generate_reports(small_config(3)));
  CHECK(generate_reports(small_config(3)).reports != generate_reports(small_config(4)).reports);
}

TEST_CASE("logged mode stamps the upload tick") {
  auto cfg = small_config();
  cfg.reporting_mode = ReportingMode::Logged;
  cfg.logged_period = 3;
  const auto ds = generate_reports(cfg);
  CHECK(ds.size() == 900);
  for (const auto& r : ds.reports) CHECK(r.tick % 3 == 2);
  CHECK(ds.reports[0].ue_id == ds.reports[2].ue_id);
}

TEST_CASE("configuration errors") {
  auto cfg = small_config();
  cfg.n_reports = cfg.n_ues * static_cast<std::size_t>(cfg.max_ticks) + 1;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Configuration);
  cfg = small_config();
  cfg.outage_cells = {42};
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Configuration);
  cfg = small_config();
  cfg.malicious_fraction = 1.5;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Configuration);
}

TEST_CASE("config digest reacts to every field") {
  const auto a = small_config();
  auto b = a;
  b.layout.shadowing.sigma_db = 7.5;
  CHECK(a.digest() != b.digest());
  b = a;
  b.n_reports += 1;
  CHECK(a.digest() != b.digest());
  CHECK(a.digest() == small_config().digest());
}

TEST_CASE("csv round trip is exact") {
  auto ds = generate_reports(small_config());
  ds = adversary::inject_malicious(ds, adversary::AttackSpec{}, adversary::OutageValueModel::fit(ds));
  const auto text = to_csv(ds);
  CHECK(text.rfind(kDatasetHeader, 0) == 0);
  const auto back = from_csv(text);
  CHECK(back.reports == ds.reports);
  CHECK(to_csv(back) == text);
}

TEST_CASE("truncated csv names the line") {
  const auto text = to_csv(generate_reports(small_config()));
  const auto cut = text.substr(0, text.size() / 2 - 10);
  const auto line = std::count(cut.begin(), cut.end(), '\n') + 1;
  try {
    from_csv(cut);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("line " + std::to_string(line)) != std::string::npos);
  }
  CHECK(kind_of([] { from_csv("a,b\n1,2\n"); }) == ErrorKind::Parse);
}

TEST_CASE("dataset files carry an integrity sidecar") {
  const auto dir = std::filesystem::temp_directory_path() / "mrif_scenario_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "d.csv").string();
  const auto ds = generate_reports(small_config());
  write_dataset(ds, path);
  const auto back = read_dataset(path, true);
  CHECK(back.reports == ds.reports);
  CHECK(back.config_digest == ds.config_digest);
  {
    std::ofstream out(path, std::ios::app);
    out << "\n";
  }
  CHECK(kind_of([&] { read_dataset(path, true); }) == ErrorKind::Integrity);
  std::filesystem::remove(path + ".digest");
  CHECK(kind_of([&] { read_dataset(path, true); }) == ErrorKind::Integrity);
  std::filesystem::remove_all(dir);
}
