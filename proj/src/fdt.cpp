#include "mrif/fdt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace mrif::fdt {

double coverage_radius(std::span<const Point> homes, std::span<const Point> points) {
  require(!homes.empty(), ErrorKind::InvalidInput, "no homes");
  double worst = 0.0;
  for (Point p : points) {
    double best = std::numeric_limits<double>::infinity();
    for (Point h : homes) best = std::min(best, distance(p, h));
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<Point> objective_points(const radio::Area& area, double resolution_m) {
  auto pts = radio::grid_points(area, resolution_m);
  pts.push_back({0.0, 0.0});
  pts.push_back({area.width_m, 0.0});
  pts.push_back({0.0, area.height_m});
  pts.push_back({area.width_m, area.height_m});
  return pts;
}

FdtFleet place_fdts(std::span<const Point> candidates, std::size_t k,
                    const radio::Area& area, double speed_mps) {
  require(k >= 1 && k <= candidates.size(), ErrorKind::InvalidInput,
          "fleet size must lie in [1, number of candidate sites]");
  require(speed_mps > 0.0, ErrorKind::InvalidInput, "speed must be positive");
  for (Point c : candidates)
    require(area.contains(c), ErrorKind::InvalidInput, "candidate site outside the area");

  const Point corners[] = {{0.0, 0.0}, {area.width_m, 0.0},
                           {0.0, area.height_m}, {area.width_m, area.height_m}};
  std::size_t first = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double worst = 0.0;
    for (Point c : corners) worst = std::max(worst, distance(candidates[i], c));
    if (worst < best) {
      best = worst;
      first = i;
    }
  }

  FdtFleet fleet;
  fleet.speed_mps = speed_mps;
  fleet.homes.push_back(candidates[first]);
  std::vector<double> gap(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    gap[i] = distance(candidates[i], candidates[first]);
  std::vector<bool> chosen(candidates.size(), false);
  chosen[first] = true;
  while (fleet.homes.size() < k) {
    std::size_t pick = 0;
    double far = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (!chosen[i] && gap[i] > far) {
        far = gap[i];
        pick = i;
      }
    chosen[pick] = true;
    fleet.homes.push_back(candidates[pick]);
    for (std::size_t i = 0; i < candidates.size(); ++i)
      gap[i] = std::min(gap[i], distance(candidates[i], candidates[pick]));
  }
  return fleet;
}

Dispatch dispatch(const FdtFleet& fleet, Point target) {
  require(!fleet.homes.empty(), ErrorKind::InvalidInput, "empty fleet");
  Dispatch d;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fleet.homes.size(); ++i) {
    const double dist = distance(fleet.homes[i], target);
    if (dist < best) {
      best = dist;
      d.fdt_index = i;
    }
  }
  d.travel_time_s = best / fleet.speed_mps;
  return d;
}

std::string_view to_string(Verdict v) {
  return v == Verdict::OutageConfirmed ? "outage_confirmed" : "attack_confirmed";
}

VerificationResult verify_at(Point location, std::span<const scenario::MdtReport> suspects,
                             const radio::NetworkLayout& true_layout,
                             const radio::ShadowMap& shadow, double floor_dbm) {
  require(true_layout.area.contains(location), ErrorKind::InvalidInput,
          "verification point outside the area");
  VerificationResult v;
  v.location = location;
  if (!suspects.empty()) {
    double sum = 0.0;
    for (const auto& r : suspects) sum += r.serving_rsrp_dbm;
    v.reported_rsrp_dbm = sum / static_cast<double>(suspects.size());
  }
  if (true_layout.active_count() == 0) {
    v.measured_rsrp_dbm = radio::kNoSignalDbm;
  } else {
    const auto s = radio::sample_at(location, true_layout, shadow);
    v.measured_rsrp_dbm = s.rsrp_dbm[s.serving_index];
  }
  v.verdict = v.measured_rsrp_dbm < floor_dbm ? Verdict::OutageConfirmed
                                              : Verdict::AttackConfirmed;
  return v;
}

void write_verification_row(std::ostream& out, const VerificationResult& v) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.3f,%.3f,%zu,%.3f,%.6f,", v.location.x, v.location.y,
                v.fdt_index, v.travel_time_s, v.measured_rsrp_dbm);
  out << buf << to_string(v.verdict) << '\n';
}

}  // namespace mrif::fdt
