#include "mrif/son.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "mrif/learn.hpp"

namespace mrif::son {

int planned_best_server(const radio::NetworkLayout& layout, Point p) {
  require(!layout.sites.empty(), ErrorKind::InvalidInput, "layout has no sites");
  int best = layout.sites[0].id;
  double best_level = -std::numeric_limits<double>::infinity();
  for (const auto& s : layout.sites) {
    const double level = s.tx_power_dbm -
                         radio::compute_pathloss(distance(p, s.position), layout.pathloss);
    if (level > best_level) {
      best_level = level;
      best = s.id;
    }
  }
  return best;
}

std::vector<int> trigger_outage_detection(
    std::span<const scenario::MdtReport> window,
    const radio::NetworkLayout& planning, const TriggerParams& params) {
  std::map<int, std::size_t> low;
  for (const auto& r : window)
    if (r.serving_rsrp_dbm < params.rsrp_floor_dbm)
      ++low[planned_best_server(planning, r.position)];
  std::vector<int> out;
  for (const auto& [cell, n] : low)
    if (n >= params.min_reports) out.push_back(cell);
  return out;
}

std::vector<int> compensating_set(const radio::NetworkLayout& layout,
                                  int outage_cell, std::size_t k,
                                  std::span<const int> exclude) {
  require(k >= 1, ErrorKind::InvalidInput, "compensating set size must be >= 1");
  const Point center = layout.site(outage_cell).position;
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < layout.sites.size(); ++i) {
    const auto& s = layout.sites[i];
    if (s.id == outage_cell || !s.active) continue;
    if (std::find(exclude.begin(), exclude.end(), s.id) != exclude.end()) continue;
    cand.emplace_back(distance(center, s.position), i);
  }
  std::sort(cand.begin(), cand.end());
  std::vector<int> out;
  for (std::size_t j = 0; j < cand.size(); ++j) {
    if (j >= k && cand[j].first > cand[k - 1].first + 1e-9) break;
    out.push_back(layout.sites[cand[j].second].id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

radio::NetworkLayout apply_coc(const radio::NetworkLayout& layout,
                               const CocAction& action) {
  require(action.power_boost_db >= 0.0 && action.power_boost_db <= 10.0,
          ErrorKind::InvalidAction, "power boost must lie in [0, 10] dB");
  require(std::find(action.compensating_cells.begin(), action.compensating_cells.end(),
                    action.outage_cell) == action.compensating_cells.end(),
          ErrorKind::InvalidAction, "outage cell cannot compensate itself");
  radio::NetworkLayout out = layout;
  for (int id : action.compensating_cells) {
    auto& site = out.sites[layout.index_of(id)];
    require(site.active, ErrorKind::InvalidAction,
            "cannot compensate with inactive cell " + std::to_string(id));
    site.tx_power_dbm += action.power_boost_db;
  }
  return out;
}

KpiSummary evaluate_kpis(const radio::NetworkLayout& layout,
                         std::span<const Point> points,
                         const radio::ShadowMap& shadow,
                         double coverage_threshold_db) {
  require(!points.empty(), ErrorKind::Evaluation, "no evaluation points");
  require(layout.active_count() > 0, ErrorKind::Evaluation,
          "no evaluation point has coverage");
  const auto eval = radio::evaluate_points(layout, points, shadow);
  KpiSummary k;
  double sum = 0.0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum += eval.sinr_db[i];
    if (eval.sinr_db[i] >= coverage_threshold_db) ++covered;
    ++k.per_cell_counts[eval.serving_id[i]];
  }
  k.mean_sinr_db = sum / static_cast<double>(points.size());
  k.p05_sinr_db = learn::quantile(eval.sinr_db, 0.05);
  k.coverage_ratio = static_cast<double>(covered) / static_cast<double>(points.size());
  return k;
}

KpiSummary evaluate_kpis(const radio::NetworkLayout& layout,
                         std::span<const Point> points, std::uint64_t seed,
                         double coverage_threshold_db) {
  return evaluate_kpis(layout, points, radio::ShadowMap(layout, seed),
                       coverage_threshold_db);
}

std::vector<Point> region_points(const radio::NetworkLayout& planning,
                                 std::span<const Point> points,
                                 std::span<const int> cells) {
  std::vector<Point> out;
  for (Point p : points) {
    const int best = planned_best_server(planning, p);
    if (std::find(cells.begin(), cells.end(), best) != cells.end()) out.push_back(p);
  }
  return out;
}

SonEngine::SonEngine(radio::NetworkLayout network, SonParams params)
    : planning_(network), network_(std::move(network)), params_(params) {
  for (auto& s : planning_.sites) s.active = true;
}

void SonEngine::apply(const CocAction& action) {
  for (const auto& a : actions_)
    require(a.outage_cell != action.outage_cell, ErrorKind::InvalidAction,
            "cell " + std::to_string(action.outage_cell) + " is already compensated");
  network_ = apply_coc(network_, action);
  actions_.push_back(action);
}

std::vector<CocAction> SonEngine::process(std::span<const scenario::MdtReport> window,
                                          const ReportFilter& filter) {
  std::vector<scenario::MdtReport> passed;
  passed.reserve(window.size());
  for (std::size_t i = 0; i < window.size(); ++i)
    if (!filter || filter(i, window[i])) passed.push_back(window[i]);

  const auto suspected_now = trigger_outage_detection(passed, planning_, params_.trigger);
  auto all_suspected = suspected();
  all_suspected.insert(all_suspected.end(), suspected_now.begin(), suspected_now.end());

  std::vector<CocAction> taken;
  for (int cell : suspected_now) {
    const bool done = std::any_of(actions_.begin(), actions_.end(),
                                  [&](const CocAction& a) { return a.outage_cell == cell; });
    if (done) continue;
    CocAction a;
    a.outage_cell = cell;
    a.power_boost_db = params_.power_boost_db;
    a.compensating_cells =
        compensating_set(network_, cell, params_.compensating_k, all_suspected);
    apply(a);
    taken.push_back(a);
  }
  return taken;
}

std::vector<int> SonEngine::suspected() const {
  std::vector<int> out;
  for (const auto& a : actions_) out.push_back(a.outage_cell);
  return out;
}

void write_kpi_row(std::ostream& out, const std::string& scenario,
                   const std::string& variant, const KpiSummary& kpi) {
  char buf[128];
  std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f\n", kpi.mean_sinr_db,
                kpi.p05_sinr_db, kpi.coverage_ratio);
  out << scenario << ',' << variant << buf;
}

}  // namespace mrif::son
