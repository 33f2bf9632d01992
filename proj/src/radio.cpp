#include "mrif/radio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <tuple>

#include "mrif/kernels.hpp"
#include "mrif/rng.hpp"

namespace mrif::radio {
namespace {

// Factor of the unit-variance correlation matrix plus diagonal jitter.
std::vector<double> correlation_factor(std::span<const Point> positions,
                                       double decorrelation_m) {
  const std::size_t n = positions.size();
  std::vector<double> c(n * n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = 0; j < n; ++j)
      c[i * n + j] = std::exp(-distance(positions[i], positions[j]) / decorrelation_m);
    c[i * n + i] += 1e-9;
  }
  kernels::cholesky_lower(c, n);
  return c;
}

std::vector<double> draw(std::span<const double> factor, std::size_t n,
                         double sigma, Rng& rng) {
  std::vector<double> z(n);
  for (double& v : z) v = rng.normal();
  auto y = kernels::lower_matvec(factor, n, z);
  for (double& v : y) v *= sigma;
  return y;
}

void check_params(const ShadowingParams& p) {
  require(p.sigma_db >= 0.0 && std::isfinite(p.sigma_db), ErrorKind::InvalidInput,
          "shadowing sigma must be finite and >= 0");
  require(p.decorrelation_m > 0.0, ErrorKind::InvalidInput,
          "shadowing decorrelation distance must be > 0");
}

struct LatticeKey {
  std::size_t nx, ny;
  double spacing, decorrelation;
  auto operator<=>(const LatticeKey&) const = default;
};

// Lattice factors depend only on geometry, so every scenario over the same
// area reuses one factorization.
std::shared_ptr<const std::vector<double>> lattice_factor(const LatticeKey& key) {
  static std::mutex mutex;
  static std::map<LatticeKey, std::shared_ptr<const std::vector<double>>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::vector<Point> nodes;
  nodes.reserve(key.nx * key.ny);
  for (std::size_t j = 0; j < key.ny; ++j)
    for (std::size_t i = 0; i < key.nx; ++i)
      nodes.push_back({static_cast<double>(i) * key.spacing,
                       static_cast<double>(j) * key.spacing});
  auto factor = std::make_shared<const std::vector<double>>(
      correlation_factor(nodes, key.decorrelation));
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(factor)).first->second;
}

template <bool Parallel>
PointEvaluation evaluate_points_impl(const NetworkLayout& layout,
                                     std::span<const Point> points,
                                     const ShadowMap& shadow) {
  PointEvaluation out;
  out.sinr_db.resize(points.size());
  out.serving_rsrp_dbm.resize(points.size());
  out.serving_id.resize(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const RadioSample s = sample_at(points[k], layout, shadow);
    out.sinr_db[k] = s.sinr_db;
    out.serving_rsrp_dbm[k] = s.rsrp_dbm[s.serving_index];
    out.serving_id[k] = s.serving_id;
  }
  return out;
}

}  // namespace

void NetworkLayout::validate() const {
  require(sites.size() >= 2, ErrorKind::InvalidInput,
          "layout needs at least 2 sites");
  require(area.width_m > 0.0 && area.height_m > 0.0, ErrorKind::InvalidInput,
          "layout area must be positive");
  check_params(shadowing);
  require(pathloss.min_distance_m > 0.0, ErrorKind::InvalidInput,
          "pathloss min_distance must be > 0");
  require(std::isfinite(noise_dbm_per_rb), ErrorKind::InvalidInput,
          "noise level must be finite");
  std::vector<int> ids;
  for (const auto& s : sites) {
    require(std::isfinite(s.tx_power_dbm), ErrorKind::InvalidInput,
            "site " + std::to_string(s.id) + ": tx power must be finite");
    require(s.bandwidth_rb >= 1, ErrorKind::InvalidInput,
            "site " + std::to_string(s.id) + ": bandwidth_rb must be >= 1");
    require(area.contains(s.position), ErrorKind::InvalidInput,
            "site " + std::to_string(s.id) + " lies outside the area");
    ids.push_back(s.id);
  }
  std::sort(ids.begin(), ids.end());
  require(std::adjacent_find(ids.begin(), ids.end()) == ids.end(),
          ErrorKind::InvalidInput, "duplicate site id");
}

std::size_t NetworkLayout::index_of(int id) const {
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (sites[i].id == id) return i;
  fail(ErrorKind::InvalidInput, "unknown cell id " + std::to_string(id));
}

std::size_t NetworkLayout::active_count() const {
  return static_cast<std::size_t>(std::count_if(
      sites.begin(), sites.end(), [](const CellSite& s) { return s.active; }));
}

NetworkLayout make_grid_layout(int rows, int cols, Area area,
                               double tx_power_dbm, int bandwidth_rb) {
  require(rows >= 1 && cols >= 1 && rows * cols >= 2, ErrorKind::InvalidInput,
          "grid layout needs at least 2 sites");
  NetworkLayout layout;
  layout.area = area;
  int id = 1;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      layout.sites.push_back(CellSite{
          id++,
          {area.width_m * (c + 0.5) / cols, area.height_m * (r + 0.5) / rows},
          tx_power_dbm,
          bandwidth_rb,
          true});
  return layout;
}

double compute_pathloss(double distance_m, const PathlossParams& params) {
  require(std::isfinite(distance_m) && distance_m >= 0.0,
          ErrorKind::InvalidInput, "pathloss: distance must be finite and >= 0");
  const double d = std::max(distance_m, params.min_distance_m);
  return params.intercept_db + params.slope_db * std::log10(d / 1000.0);
}

std::vector<double> sample_shadowing_field(std::span<const Point> positions,
                                           const ShadowingParams& params,
                                           std::uint64_t seed) {
  require(!positions.empty(), ErrorKind::InvalidInput,
          "shadowing: no positions");
  check_params(params);
  require(positions.size() <= params.max_points, ErrorKind::Capacity,
          "shadowing: " + std::to_string(positions.size()) +
              " positions exceed the joint-draw cap of " +
              std::to_string(params.max_points) + "; tile the request");
  if (params.sigma_db == 0.0) return std::vector<double>(positions.size(), 0.0);
  // Coincident positions share one draw; the jittered factor alone would
  // separate them slightly.
  std::vector<Point> unique;
  std::vector<std::size_t> slot(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto it = std::find(unique.begin(), unique.end(), positions[i]);
    slot[i] = static_cast<std::size_t>(it - unique.begin());
    if (it == unique.end()) unique.push_back(positions[i]);
  }
  const auto factor = correlation_factor(unique, params.decorrelation_m);
  Rng rng(seed);
  const auto field = draw(factor, unique.size(), params.sigma_db, rng);
  std::vector<double> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) out[i] = field[slot[i]];
  return out;
}

ShadowMap::ShadowMap(const NetworkLayout& layout, std::uint64_t seed)
    : site_count_(layout.sites.size()) {
  const auto& p = layout.shadowing;
  check_params(p);
  require(p.lattice_m > 0.0, ErrorKind::InvalidInput,
          "shadowing lattice spacing must be > 0");
  spacing_ = p.lattice_m;
  nx_ = static_cast<std::size_t>(std::ceil(layout.area.width_m / spacing_)) + 1;
  ny_ = static_cast<std::size_t>(std::ceil(layout.area.height_m / spacing_)) + 1;
  const std::size_t nodes = nx_ * ny_;
  require(nodes <= p.max_points, ErrorKind::Capacity,
          "shadowing lattice of " + std::to_string(nodes) +
              " nodes exceeds the joint-draw cap of " +
              std::to_string(p.max_points));
  values_.assign(site_count_ * nodes, 0.0);
  if (p.sigma_db == 0.0) return;
  const auto factor = lattice_factor({nx_, ny_, spacing_, p.decorrelation_m});
  for (std::size_t s = 0; s < site_count_; ++s) {
    Rng rng = Rng::derive(seed, "shadow", s);
    const auto field = draw(*factor, nodes, p.sigma_db, rng);
    std::copy(field.begin(), field.end(), values_.begin() + static_cast<std::ptrdiff_t>(s * nodes));
  }
}

ShadowMap ShadowMap::zero(const NetworkLayout& layout) {
  ShadowMap m;
  m.site_count_ = layout.sites.size();
  m.values_.assign(m.site_count_, 0.0);
  return m;
}

std::size_t ShadowMap::node_of(Point p) const {
  auto snap = [&](double v, std::size_t n) {
    const double idx = std::round(v / spacing_);
    if (!(idx > 0.0)) return std::size_t{0};
    return std::min(static_cast<std::size_t>(idx), n - 1);
  };
  return snap(p.y, ny_) * nx_ + snap(p.x, nx_);
}

double ShadowMap::at(std::size_t site_index, Point p) const {
  return values_[site_index * nx_ * ny_ + node_of(p)];
}

std::vector<double> ShadowMap::at(Point p) const {
  std::vector<double> out(site_count_);
  const std::size_t node = node_of(p);
  for (std::size_t s = 0; s < site_count_; ++s)
    out[s] = values_[s * nx_ * ny_ + node];
  return out;
}

RadioSample compute_radio_sample(Point ue, const NetworkLayout& layout,
                                 std::span<const double> shadow_db) {
  const std::size_t n = layout.sites.size();
  require(shadow_db.size() == n, ErrorKind::InvalidInput,
          "radio sample: one shadowing value per site required");
  require(std::isfinite(ue.x) && std::isfinite(ue.y), ErrorKind::InvalidInput,
          "radio sample: non-finite position");

  RadioSample s;
  s.rsrp_dbm.assign(n, kNoSignalDbm);
  s.rsrq_db.assign(n, kNoSignalDbm);
  std::vector<double> linear(n, 0.0);  // mW per resource element
  bool any_active = false;
  for (std::size_t i = 0; i < n; ++i) {
    const CellSite& site = layout.sites[i];
    if (!site.active) continue;
    const double per_re = site.tx_power_dbm - linear_to_db(12.0 * site.bandwidth_rb);
    s.rsrp_dbm[i] = per_re -
                    compute_pathloss(distance(ue, site.position), layout.pathloss) +
                    shadow_db[i];
    linear[i] = db_to_linear(s.rsrp_dbm[i]);
    if (!any_active || s.rsrp_dbm[i] > s.rsrp_dbm[s.serving_index]) s.serving_index = i;
    any_active = true;
  }
  require(any_active, ErrorKind::NoCoverage, "no active site covers the UE");

  const double noise_re = db_to_linear(layout.noise_dbm_per_rb - linear_to_db(12.0));
  double total = 0.0;
  double interference = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += linear[i];
    if (i != s.serving_index) interference += linear[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (layout.sites[i].active)
      s.rsrq_db[i] = linear_to_db(linear[i] / (12.0 * (total + noise_re)));

  s.serving_id = layout.sites[s.serving_index].id;
  s.sinr_db = linear_to_db(linear[s.serving_index] / (interference + noise_re));

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i)
    if (layout.sites[i].active && i != s.serving_index) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.rsrp_dbm[a] > s.rsrp_dbm[b];
  });
  for (std::size_t i : order) s.neighbor_ids.push_back(layout.sites[i].id);
  return s;
}

RadioSample sample_at(Point ue, const NetworkLayout& layout,
                      const ShadowMap& shadow) {
  require(shadow.site_count() == layout.sites.size(), ErrorKind::InvalidInput,
          "shadow map does not match the layout");
  return compute_radio_sample(ue, layout, shadow.at(ue));
}

std::vector<Point> grid_points(const Area& area, double resolution_m,
                               std::size_t* nx_out, std::size_t* ny_out) {
  require(resolution_m > 0.0 && std::isfinite(resolution_m),
          ErrorKind::InvalidInput, "grid resolution must be > 0");
  const auto nx = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(area.width_m / resolution_m)));
  const auto ny = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(area.height_m / resolution_m)));
  std::vector<Point> pts;
  pts.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      pts.push_back({(static_cast<double>(i) + 0.5) * area.width_m / static_cast<double>(nx),
                     (static_cast<double>(j) + 0.5) * area.height_m / static_cast<double>(ny)});
  if (nx_out) *nx_out = nx;
  if (ny_out) *ny_out = ny;
  return pts;
}

PointEvaluation evaluate_points(const NetworkLayout& layout,
                                std::span<const Point> points,
                                const ShadowMap& shadow) {
  require(layout.active_count() > 0, ErrorKind::NoCoverage,
          "no active site in layout");
  return evaluate_points_impl<true>(layout, points, shadow);
}

namespace serial {
PointEvaluation evaluate_points(const NetworkLayout& layout,
                                std::span<const Point> points,
                                const ShadowMap& shadow) {
  require(layout.active_count() > 0, ErrorKind::NoCoverage,
          "no active site in layout");
  return evaluate_points_impl<false>(layout, points, shadow);
}
}  // namespace serial

CoverageGrid coverage_map(const NetworkLayout& layout, double resolution_m,
                          const ShadowMap& shadow) {
  CoverageGrid grid;
  grid.centers = grid_points(layout.area, resolution_m, &grid.nx, &grid.ny);
  auto eval = evaluate_points(layout, grid.centers, shadow);
  grid.sinr_db = std::move(eval.sinr_db);
  grid.serving_id = std::move(eval.serving_id);
  return grid;
}

CoverageGrid coverage_map(const NetworkLayout& layout, double resolution_m,
                          std::uint64_t seed) {
  return coverage_map(layout, resolution_m, ShadowMap(layout, seed));
}

void write_coverage_csv(const CoverageGrid& grid, std::ostream& out) {
  out << "x_m,y_m,sinr_db\n";
  char buf[96];
  for (std::size_t i = 0; i < grid.centers.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.6f\n", grid.centers[i].x,
                  grid.centers[i].y, grid.sinr_db[i]);
    out << buf;
  }
}

void write_coverage_csv(const CoverageGrid& grid, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::InvalidInput, "cannot open " + path);
  write_coverage_csv(grid, out);
}

}  // namespace mrif::radio
