#include "mrif/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mrif/adversary.hpp"
#include "mrif/rng.hpp"

namespace mrif::scenario {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Normal: return "normal";
    case Label::RealOutage: return "real_outage";
    case Label::Malicious: return "malicious";
  }
  return "?";
}

double quantize(double value) { return std::round(value * 1e6) / 1e6; }

void ScenarioConfig::validate() const {
  layout.validate();
  require(n_ues >= 1, ErrorKind::Configuration, "n_ues must be >= 1");
  require(malicious_fraction >= 0.0 && malicious_fraction <= 0.95,
          ErrorKind::Configuration, "malicious_fraction must lie in [0, 0.95]");
  require(logged_period >= 1, ErrorKind::Configuration,
          "logged_period must be >= 1");
  require(max_ticks >= 1, ErrorKind::Configuration, "max_ticks must be >= 1");
  for (int id : outage_cells) {
    const bool known = std::any_of(layout.sites.begin(), layout.sites.end(),
                                   [&](const auto& s) { return s.id == id; });
    require(known, ErrorKind::Configuration,
            "outage cell " + std::to_string(id) + " is not in the layout");
  }
  // Reports available inside the tick budget.
  std::int64_t usable_ticks = max_ticks;
  if (reporting_mode == ReportingMode::Logged)
    usable_ticks = (max_ticks / logged_period) * logged_period;
  const double capacity = static_cast<double>(usable_ticks) * static_cast<double>(n_ues);
  require(static_cast<double>(n_reports) <= capacity, ErrorKind::Configuration,
          "n_reports=" + std::to_string(n_reports) + " is not reachable with " +
              std::to_string(n_ues) + " UEs within " + std::to_string(max_ticks) +
              " ticks");
}

std::string ScenarioConfig::digest() const {
  std::string s;
  char buf[128];
  auto add = [&](const char* fmt, auto... v) {
    std::snprintf(buf, sizeof buf, fmt, v...);
    s += buf;
  };
  add("area %.17g %.17g;", layout.area.width_m, layout.area.height_m);
  add("noise %.17g;", layout.noise_dbm_per_rb);
  add("pl %.17g %.17g %.17g;", layout.pathloss.intercept_db, layout.pathloss.slope_db,
      layout.pathloss.min_distance_m);
  add("sh %.17g %.17g %.17g %zu;", layout.shadowing.sigma_db,
      layout.shadowing.decorrelation_m, layout.shadowing.lattice_m,
      layout.shadowing.max_points);
  for (const auto& site : layout.sites)
    add("site %d %.17g %.17g %.17g %d %d;", site.id, site.position.x, site.position.y,
        site.tx_power_dbm, site.bandwidth_rb, site.active ? 1 : 0);
  add("ues %zu reports %zu;", n_ues, n_reports);
  s += "outage";
  for (int id : outage_cells) add(" %d", id);
  add(";mal %.17g mode %d period %d seed %llu ticks %lld", malicious_fraction,
      static_cast<int>(reporting_mode), logged_period,
      static_cast<unsigned long long>(rng_seed), static_cast<long long>(max_ticks));
  return hex_digest(fnv1a64(s));
}

radio::NetworkLayout default_layout() {
  return radio::make_grid_layout(3, 3, radio::Area{}, 30.0, 50);
}

learn::Matrix Dataset::features() const {
  learn::Matrix m(reports.size(), kFeatureCount);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const MdtReport& r = reports[i];
    auto row = m.row(i);
    row[col::kX] = r.position.x;
    row[col::kY] = r.position.y;
    row[col::kServingRsrp] = r.serving_rsrp_dbm;
    row[col::kServingRsrq] = r.serving_rsrq_db;
    for (std::size_t k = 0; k < kNeighborSlots; ++k) {
      row[col::kNeighborRsrp + k] = r.neighbor_rsrp_dbm[k];
      row[col::kNeighborRsrq + k] = r.neighbor_rsrq_db[k];
    }
  }
  return m;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(reports.size());
  for (const auto& r : reports) out.push_back(static_cast<int>(r.label));
  return out;
}

std::size_t Dataset::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      reports.begin(), reports.end(), [&](const MdtReport& r) { return r.label == label; }));
}

std::vector<Point> deploy_ues(std::size_t n, const radio::Area& area,
                              std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidInput, "deploy_ues: n must be >= 1");
  Rng rng = Rng::derive(seed, "ues");
  std::vector<Point> out(n);
  for (auto& p : out) {
    p.x = rng.uniform(0.0, area.width_m);
    p.y = rng.uniform(0.0, area.height_m);
  }
  return out;
}

World make_world(const ScenarioConfig& config) {
  config.validate();
  World w;
  w.config = config;
  w.healthy = config.layout;
  w.degraded = adversary::apply_outage(config.layout, config.outage_cells);
  w.shadow = radio::ShadowMap(config.layout, config.rng_seed);
  w.ues = deploy_ues(config.n_ues, config.layout.area, config.rng_seed);
  w.healthy_serving.reserve(w.ues.size());
  for (Point p : w.ues)
    w.healthy_serving.push_back(radio::sample_at(p, w.healthy, w.shadow).serving_id);
  return w;
}

MdtReport make_report(int ue_id, std::int64_t tick, Point position,
                      const radio::RadioSample& sample,
                      const radio::NetworkLayout& layout) {
  MdtReport r;
  r.ue_id = ue_id;
  r.tick = tick;
  r.position = {quantize(position.x), quantize(position.y)};
  r.serving_cell = sample.serving_id;
  r.serving_rsrp_dbm = quantize(sample.rsrp_dbm[sample.serving_index]);
  r.serving_rsrq_db = quantize(sample.rsrq_db[sample.serving_index]);
  r.neighbor_rsrp_dbm.fill(kSentinelRsrpDbm);
  r.neighbor_rsrq_db.fill(kSentinelRsrqDb);
  const std::size_t n = std::min(kNeighborSlots, sample.neighbor_ids.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = layout.index_of(sample.neighbor_ids[k]);
    r.neighbor_rsrp_dbm[k] = quantize(sample.rsrp_dbm[idx]);
    r.neighbor_rsrq_db[k] = quantize(sample.rsrq_db[idx]);
  }
  return r;
}

Dataset generate_reports(const World& world) {
  const ScenarioConfig& cfg = world.config;
  Dataset ds;
  ds.config_digest = cfg.digest();
  ds.reports.reserve(cfg.n_reports);
  if (cfg.n_reports == 0) return ds;

  // UEs are static and the channel has no fast fading, so each UE's
  // measurement is fixed for the whole run.
  std::vector<MdtReport> measured;
  measured.reserve(world.ues.size());
  for (std::size_t u = 0; u < world.ues.size(); ++u) {
    const auto sample = radio::sample_at(world.ues[u], world.degraded, world.shadow);
    MdtReport r = make_report(static_cast<int>(u), 0, world.ues[u], sample, world.degraded);
    const bool in_outage =
        std::find(cfg.outage_cells.begin(), cfg.outage_cells.end(),
                  world.healthy_serving[u]) != cfg.outage_cells.end();
    r.label = in_outage ? Label::RealOutage : Label::Normal;
    measured.push_back(r);
  }

  const std::size_t n_ues = measured.size();
  if (cfg.reporting_mode == ReportingMode::Immediate) {
    for (std::int64_t t = 0; ds.reports.size() < cfg.n_reports; ++t)
      for (std::size_t u = 0; u < n_ues && ds.reports.size() < cfg.n_reports; ++u) {
        MdtReport r = measured[u];
        r.tick = t;
        ds.reports.push_back(r);
      }
    return ds;
  }

  // Logged: each UE keeps logged_period measurements and uploads them at the
  // tick that closes the period, stamped with that tick.
  const std::int64_t period = cfg.logged_period;
  for (std::int64_t flush = period - 1; ds.reports.size() < cfg.n_reports; flush += period)
    for (std::size_t u = 0; u < n_ues && ds.reports.size() < cfg.n_reports; ++u)
      for (std::int64_t m = 0; m < period && ds.reports.size() < cfg.n_reports; ++m) {
        MdtReport r = measured[u];
        r.tick = flush;
        ds.reports.push_back(r);
      }
  return ds;
}

Dataset generate_reports(const ScenarioConfig& config) {
  return generate_reports(make_world(config));
}

}  // namespace mrif::scenario
