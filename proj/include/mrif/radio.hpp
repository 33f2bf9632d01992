#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mrif/common.hpp"

namespace mrif::radio {

/// Received power assigned to an inactive site.
inline constexpr double kNoSignalDbm = -std::numeric_limits<double>::infinity();

struct CellSite {
  int id = 0;
  Point position;
  double tx_power_dbm = 30.0;
  int bandwidth_rb = 50;
  bool active = true;
};

struct Area {
  double width_m = 1000.0;
  double height_m = 1000.0;

  bool contains(Point p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width_m && p.y <= height_m;
  }
  Point center() const { return {width_m / 2.0, height_m / 2.0}; }
};

/// Log-distance model PL = A + B log10(max(d, d_min) / 1 km).
struct PathlossParams {
  double intercept_db = 128.1;
  double slope_db = 37.6;
  double min_distance_m = 10.0;
};

struct ShadowingParams {
  double sigma_db = 8.0;
  double decorrelation_m = 50.0;
  /// Spacing of the lattice on which a scenario's shadowing map is drawn.
  double lattice_m = 20.0;
  /// Largest joint draw (number of positions) before a capacity error.
  std::size_t max_points = 20000;
};

/// -174 dBm/Hz over one 180 kHz resource block plus a 9 dB noise figure.
inline constexpr double kDefaultNoiseDbmPerRb = -112.4473;

struct NetworkLayout {
  std::vector<CellSite> sites;
  Area area;
  double noise_dbm_per_rb = kDefaultNoiseDbmPerRb;
  PathlossParams pathloss;
  ShadowingParams shadowing;

  /// Throws Error(InvalidInput) when an invariant does not hold.
  void validate() const;
  std::size_t index_of(int id) const;
  const CellSite& site(int id) const { return sites[index_of(id)]; }
  std::size_t active_count() const;
};

/// Regular rows x cols grid of identical sites at cell centres, ids 1..n in
/// row-major order starting at the lower-left corner.
NetworkLayout make_grid_layout(int rows, int cols, Area area,
                               double tx_power_dbm, int bandwidth_rb);

struct RadioSample {
  std::vector<double> rsrp_dbm;  // per site, layout order; -inf if inactive
  std::vector<double> rsrq_db;   // per site, layout order; -inf if inactive
  double sinr_db = 0.0;
  int serving_id = 0;
  std::size_t serving_index = 0;
  std::vector<int> neighbor_ids;  // active non-serving sites, rsrp descending
};

double compute_pathloss(double distance_m, const PathlossParams& params);

/// One joint draw of a zero-mean Gaussian field with covariance
/// sigma^2 exp(-|p_i - p_j| / d_corr), via Cholesky factorization.
std::vector<double> sample_shadowing_field(std::span<const Point> positions,
                                           const ShadowingParams& params,
                                           std::uint64_t seed);

/// Per-site shadowing for a scenario. Each site owns an independent field
/// drawn jointly on a square lattice covering the area; a position takes the
/// value of its nearest lattice node, so every UE and every map pixel in a
/// scenario sees one consistent environment.
class ShadowMap {
 public:
  ShadowMap() = default;
  ShadowMap(const NetworkLayout& layout, std::uint64_t seed);

  /// All-zero map (no shadowing) sized for the layout.
  static ShadowMap zero(const NetworkLayout& layout);

  std::size_t site_count() const { return site_count_; }
  double at(std::size_t site_index, Point p) const;
  std::vector<double> at(Point p) const;

 private:
  std::size_t node_of(Point p) const;

  std::size_t site_count_ = 0;
  std::size_t nx_ = 1;
  std::size_t ny_ = 1;
  double spacing_ = 1.0;
  std::vector<double> values_;  // site-major: values_[s * nodes + node]
};

/// Radio sample at a position. shadow_db holds one value per layout site.
RadioSample compute_radio_sample(Point ue, const NetworkLayout& layout,
                                 std::span<const double> shadow_db);

RadioSample sample_at(Point ue, const NetworkLayout& layout,
                      const ShadowMap& shadow);

/// Pixel-centred grid; nx = max(1, round(width / resolution)).
struct CoverageGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<Point> centers;   // row-major, y outer
  std::vector<double> sinr_db;  // row-major
  std::vector<int> serving_id;  // row-major
};

std::vector<Point> grid_points(const Area& area, double resolution_m,
                               std::size_t* nx = nullptr,
                               std::size_t* ny = nullptr);

CoverageGrid coverage_map(const NetworkLayout& layout, double resolution_m,
                          const ShadowMap& shadow);
CoverageGrid coverage_map(const NetworkLayout& layout, double resolution_m,
                          std::uint64_t seed);

/// Batch evaluation of SINR and serving cell at many positions.
struct PointEvaluation {
  std::vector<double> sinr_db;
  std::vector<double> serving_rsrp_dbm;
  std::vector<int> serving_id;
};
PointEvaluation evaluate_points(const NetworkLayout& layout,
                                std::span<const Point> points,
                                const ShadowMap& shadow);

namespace serial {
PointEvaluation evaluate_points(const NetworkLayout& layout,
                                std::span<const Point> points,
                                const ShadowMap& shadow);
}

/// CSV with header x_m,y_m,sinr_db.
void write_coverage_csv(const CoverageGrid& grid, std::ostream& out);
void write_coverage_csv(const CoverageGrid& grid, const std::string& path);

}  // namespace mrif::radio
