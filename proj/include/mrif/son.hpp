#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mrif/radio.hpp"
#include "mrif/scenario.hpp"

namespace mrif::son {

struct CocAction {
  int outage_cell = 0;
  std::vector<int> compensating_cells;
  double power_boost_db = 3.0;

  friend bool operator==(const CocAction&, const CocAction&) = default;
};

struct TriggerParams {
  double rsrp_floor_dbm = -120.0;
  std::size_t min_reports = 5;
};

/// Site with the strongest planned signal (tx - pathloss, no shadowing) over
/// every configured site, active or not. Ties go to the lower layout index.
int planned_best_server(const radio::NetworkLayout& layout, Point p);

/// Cells named by at least min_reports reports below the floor, where each
/// report is attributed to the planned best server of its position.
/// Returned in ascending id order.
std::vector<int> trigger_outage_detection(
    std::span<const scenario::MdtReport> window,
    const radio::NetworkLayout& planning, const TriggerParams& params);

/// The k nearest sites to the outage cell, widened to include every site tied
/// with the k-th distance. Inactive and excluded sites are skipped.
std::vector<int> compensating_set(const radio::NetworkLayout& layout,
                                  int outage_cell, std::size_t k = 3,
                                  std::span<const int> exclude = {});

radio::NetworkLayout apply_coc(const radio::NetworkLayout& layout,
                               const CocAction& action);

struct KpiSummary {
  double mean_sinr_db = 0.0;
  double p05_sinr_db = 0.0;
  double coverage_ratio = 0.0;
  std::map<int, std::size_t> per_cell_counts;  // evaluation points per server

  friend bool operator==(const KpiSummary&, const KpiSummary&) = default;
};

inline constexpr double kCoverageSinrDb = -6.0;

KpiSummary evaluate_kpis(const radio::NetworkLayout& layout,
                         std::span<const Point> points,
                         const radio::ShadowMap& shadow,
                         double coverage_threshold_db = kCoverageSinrDb);
KpiSummary evaluate_kpis(const radio::NetworkLayout& layout,
                         std::span<const Point> points, std::uint64_t seed,
                         double coverage_threshold_db = kCoverageSinrDb);

/// Points whose planned best server is one of the given cells.
std::vector<Point> region_points(const radio::NetworkLayout& planning,
                                 std::span<const Point> points,
                                 std::span<const int> cells);

struct SonParams {
  TriggerParams trigger;
  double power_boost_db = 3.0;
  std::size_t compensating_k = 3;
};

/// Decides which reports reach the engine. An empty filter passes all.
using ReportFilter = std::function<bool(std::size_t index, const scenario::MdtReport&)>;

/// Trusting outage detection plus compensation. The engine owns the network
/// state it has modified and records every action it took.
class SonEngine {
 public:
  SonEngine(radio::NetworkLayout network, SonParams params = {});

  /// Run the trigger on the reports that pass the filter and compensate every
  /// newly suspected cell. Returns the actions taken in this call.
  std::vector<CocAction> process(std::span<const scenario::MdtReport> window,
                                 const ReportFilter& filter = {});

  /// Throws InvalidAction if the outage cell was already compensated.
  void apply(const CocAction& action);

  const std::vector<CocAction>& actions() const { return actions_; }
  const radio::NetworkLayout& network() const { return network_; }
  const radio::NetworkLayout& planning() const { return planning_; }
  std::vector<int> suspected() const;

 private:
  radio::NetworkLayout planning_;
  radio::NetworkLayout network_;
  SonParams params_;
  std::vector<CocAction> actions_;
};

inline constexpr const char* kKpiHeader =
    "scenario,variant,mean_sinr_db,p05_sinr_db,coverage_ratio";

void write_kpi_row(std::ostream& out, const std::string& scenario,
                   const std::string& variant, const KpiSummary& kpi);

}  // namespace mrif::son
