#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mrif/radio.hpp"
#include "mrif/scenario.hpp"

namespace mrif::fdt {

struct FdtFleet {
  std::vector<Point> homes;
  double speed_mps = 10.0;

  std::size_t size() const { return homes.size(); }
};

/// Worst-case distance from any point to its nearest home.
double coverage_radius(std::span<const Point> homes, std::span<const Point> points);

/// Evaluation points for the placement objective: a grid over the area plus
/// its corners.
std::vector<Point> objective_points(const radio::Area& area, double resolution_m = 25.0);

/// Greedy farthest-point k-center over the candidate sites. The first home
/// minimizes the largest distance to the area corners; each further home is
/// the candidate farthest from those already chosen (ties: lower index).
FdtFleet place_fdts(std::span<const Point> candidates, std::size_t k,
                    const radio::Area& area, double speed_mps = 10.0);

struct Dispatch {
  std::size_t fdt_index = 0;
  double travel_time_s = 0.0;
};

/// Nearest home; equidistant homes go to the lower index.
Dispatch dispatch(const FdtFleet& fleet, Point target);

enum class Verdict { OutageConfirmed, AttackConfirmed };

std::string_view to_string(Verdict v);

struct VerificationResult {
  Point location;
  double reported_rsrp_dbm = 0.0;
  double measured_rsrp_dbm = 0.0;
  Verdict verdict = Verdict::AttackConfirmed;
  std::size_t fdt_index = 0;
  double travel_time_s = 0.0;
};

inline constexpr double kConfirmationFloorDbm = -120.0;

/// Re-measure at the location on the true network. With every site off the
/// measured level is -inf and the outage is confirmed.
VerificationResult verify_at(Point location,
                             std::span<const scenario::MdtReport> suspects,
                             const radio::NetworkLayout& true_layout,
                             const radio::ShadowMap& shadow,
                             double floor_dbm = kConfirmationFloorDbm);

inline constexpr const char* kVerificationHeader =
    "x_m,y_m,fdt_index,travel_time_s,measured_rsrp_dbm,verdict";

void write_verification_row(std::ostream& out, const VerificationResult& v);

}  // namespace mrif::fdt
