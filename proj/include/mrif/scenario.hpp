#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mrif/learn.hpp"
#include "mrif/radio.hpp"

namespace mrif::scenario {

enum class Label : int { Normal = 0, RealOutage = 1, Malicious = 2 };

std::string_view to_string(Label label);

inline constexpr std::size_t kNeighborSlots = 6;
inline constexpr std::size_t kFeatureCount = 4 + 2 * kNeighborSlots;
inline constexpr double kSentinelRsrpDbm = -160.0;
inline constexpr double kSentinelRsrqDb = -30.0;

/// Feature-matrix column indices.
namespace col {
inline constexpr std::size_t kX = 0;
inline constexpr std::size_t kY = 1;
inline constexpr std::size_t kServingRsrp = 2;
inline constexpr std::size_t kServingRsrq = 3;
inline constexpr std::size_t kNeighborRsrp = 4;   // 6 slots
inline constexpr std::size_t kNeighborRsrq = 10;  // 6 slots
}  // namespace col

struct MdtReport {
  int ue_id = 0;
  std::int64_t tick = 0;
  Point position;
  int serving_cell = 0;
  double serving_rsrp_dbm = kSentinelRsrpDbm;
  double serving_rsrq_db = kSentinelRsrqDb;
  std::array<double, kNeighborSlots> neighbor_rsrp_dbm{};
  std::array<double, kNeighborSlots> neighbor_rsrq_db{};
  Label label = Label::Normal;

  friend bool operator==(const MdtReport&, const MdtReport&) = default;
};

enum class ReportingMode { Immediate, Logged };

struct ScenarioConfig {
  radio::NetworkLayout layout;
  std::size_t n_ues = 1000;
  std::size_t n_reports = 7500;
  std::vector<int> outage_cells;
  double malicious_fraction = 0.01;
  ReportingMode reporting_mode = ReportingMode::Immediate;
  int logged_period = 1;
  std::uint64_t rng_seed = 1;
  /// Upper bound on simulated ticks; n_reports beyond what fits is rejected.
  std::int64_t max_ticks = 1000;

  void validate() const;
  /// Stable hash over every field, hex encoded.
  std::string digest() const;
};

/// The nine-cell, 1 km^2 network used throughout the experiments.
radio::NetworkLayout default_layout();

struct Dataset {
  std::vector<MdtReport> reports;
  std::string config_digest;

  std::size_t size() const noexcept { return reports.size(); }
  /// 16 columns: x, y, serving rsrp, serving rsrq, n1..n6 rsrp, n1..n6 rsrq.
  /// Labels are deliberately not part of this view.
  learn::Matrix features() const;
  std::vector<int> labels() const;
  std::size_t count(Label label) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Everything a scenario fixes: the healthy and degraded networks, the
/// shadowing environment and the UE positions.
struct World {
  ScenarioConfig config;
  radio::NetworkLayout healthy;
  radio::NetworkLayout degraded;
  radio::ShadowMap shadow;
  std::vector<Point> ues;
  std::vector<int> healthy_serving;  // per UE, all cells active
};

World make_world(const ScenarioConfig& config);

std::vector<Point> deploy_ues(std::size_t n, const radio::Area& area,
                              std::uint64_t seed);

/// Build a report from a radio sample; values are quantized to 1e-6 so that
/// the CSV form is exact.
MdtReport make_report(int ue_id, std::int64_t tick, Point position,
                      const radio::RadioSample& sample,
                      const radio::NetworkLayout& layout);

Dataset generate_reports(const World& world);
Dataset generate_reports(const ScenarioConfig& config);

/// Round to the 6-decimal grid used by the CSV format.
double quantize(double value);

// CSV ------------------------------------------------------------------------

inline constexpr const char* kDatasetHeader =
    "ue_id,tick,x_m,y_m,serving_cell,serving_rsrp_dbm,serving_rsrq_db,"
    "n1_rsrp,n2_rsrp,n3_rsrp,n4_rsrp,n5_rsrp,n6_rsrp,"
    "n1_rsrq,n2_rsrq,n3_rsrq,n4_rsrq,n5_rsrq,n6_rsrq,label";

std::string to_csv(const Dataset& dataset);
Dataset from_csv(const std::string& text);

/// Writes the CSV plus a sidecar "<path>.digest" holding the config digest
/// and a content hash.
void write_dataset(const Dataset& dataset, const std::string& path);

/// Strict mode requires the sidecar and a matching content hash.
Dataset read_dataset(const std::string& path, bool strict = false);

}  // namespace mrif::scenario
