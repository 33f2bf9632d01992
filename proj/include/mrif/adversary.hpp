#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mrif/radio.hpp"
#include "mrif/scenario.hpp"

namespace mrif::adversary {

/// Copy of the layout with the listed sites switched off.
radio::NetworkLayout apply_outage(const radio::NetworkLayout& layout,
                                  std::span<const int> cells);

enum class Strategy { ForgeLowRsrp, MimicOutage };

std::string_view to_string(Strategy s);

struct TargetRegion {
  Point center;
  double radius_m = 100.0;
};

struct AttackSpec {
  Strategy strategy = Strategy::MimicOutage;
  double malicious_fraction = 0.01;
  std::optional<TargetRegion> target_region;
  std::uint64_t seed = 1;
  /// Forged serving RSRP band for ForgeLowRsrp.
  double forge_low_dbm = -140.0;
  double forge_high_dbm = -120.0;
  /// Only UEs whose genuine serving RSRP exceeds this are compromised, so a
  /// forged outage is always refuted by re-measurement.
  double coverage_floor_dbm = -120.0;
  double noise_dbm_per_rb = radio::kDefaultNoiseDbmPerRb;

  void validate() const;
};

/// Per-field empirical distribution of genuine outage reports over the 14
/// measurement fields (serving rsrp, serving rsrq, 6 neighbour rsrp, 6
/// neighbour rsrq).
class OutageValueModel {
 public:
  static constexpr std::size_t kFields = 2 + 2 * scenario::kNeighborSlots;
  static constexpr std::size_t kMinReports = 10;

  OutageValueModel() = default;
  static OutageValueModel fit(const scenario::Dataset& dataset);

  bool empty() const { return samples_[0].empty(); }
  std::size_t size() const { return samples_[0].size(); }
  const std::vector<double>& field(std::size_t f) const { return samples_[f]; }

 private:
  std::array<std::vector<double>, kFields> samples_;
};

/// Number of reports that a fraction of n corresponds to (ceiling, with a
/// guard against floating-point noise such as 0.01 * 7500).
std::size_t malicious_count(double fraction, std::size_t n);

/// Overwrite the measurements of reports at the given indices. Positions and
/// identities stay; labels become Malicious.
void forge_reports(scenario::Dataset& dataset, std::span<const std::size_t> indices,
                   const AttackSpec& spec, const OutageValueModel& model,
                   std::uint64_t stream);

/// Eligible attack candidates: normal reports with genuine coverage, inside
/// the target region when one is set. Ascending indices.
std::vector<std::size_t> attack_candidates(const scenario::Dataset& dataset,
                                           const AttackSpec& spec);

scenario::Dataset inject_malicious(const scenario::Dataset& dataset,
                                   const AttackSpec& spec,
                                   const OutageValueModel& model);

/// Same as inject_malicious with an explicit report count.
scenario::Dataset inject_count(const scenario::Dataset& dataset,
                               const AttackSpec& spec,
                               const OutageValueModel& model, std::size_t count);

std::vector<scenario::Dataset> sweep_malicious_rate(
    const scenario::Dataset& dataset, std::span<const double> rates,
    const AttackSpec& spec, const OutageValueModel& model);

}  // namespace mrif::adversary
