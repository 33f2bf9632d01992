#include "mrif/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mrif::config {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::Configuration, path + ": " + what);
}

// View of one JSON object that remembers which keys were read, so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_, "expected an object");
  }
  ~Section() = default;
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  const json& required(const std::string& key) {
    if (!has(key)) config_error(at(key), "required field is missing");
    return j_.at(key);
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    out = convert<T>(j_.at(key), at(key));
  }

  template <class T>
  void get_required(const std::string& key, T& out) {
    out = convert<T>(required(key), at(key));
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) config_error(at(it.key()), "unknown key");
  }

  template <class T>
  static T convert(const json& v, const std::string& path) {
    try {
      if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
          config_error(path, "expected a non-negative integer");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) config_error(path, "expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) config_error(path, "expected a number");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      config_error(path, std::string("wrong type (") + e.what() + ")");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

adversary::Strategy strategy_from(const std::string& s, const std::string& path) {
  if (s == "forge_low_rsrp") return adversary::Strategy::ForgeLowRsrp;
  if (s == "mimic_outage_distribution") return adversary::Strategy::MimicOutage;
  config_error(path, "unknown strategy '" + s +
                         "' (expected forge_low_rsrp or mimic_outage_distribution)");
}

void read_layout(Section& s, radio::NetworkLayout& layout) {
  std::vector<double> area = {layout.area.width_m, layout.area.height_m};
  s.get("area_m", area);
  if (area.size() != 2) config_error(s.at("area_m"), "expected [width, height]");
  const radio::Area a{area[0], area[1]};

  const bool has_grid = s.has("grid");
  const bool has_sites = s.has("sites");
  if (has_grid && has_sites) config_error(s.at("sites"), "give either grid or sites, not both");
  if (has_grid) {
    Section g = s.child("grid");
    int rows = 3, cols = 3, rb = 50;
    double tx = 30.0;
    g.get("rows", rows);
    g.get("cols", cols);
    g.get("tx_power_dbm", tx);
    g.get("bandwidth_rb", rb);
    g.finish();
    const auto keep = layout;
    layout = radio::make_grid_layout(rows, cols, a, tx, rb);
    layout.noise_dbm_per_rb = keep.noise_dbm_per_rb;
    layout.pathloss = keep.pathloss;
    layout.shadowing = keep.shadowing;
  } else if (has_sites) {
    const json& list = s.raw("sites");
    if (!list.is_array()) config_error(s.at("sites"), "expected a list");
    layout.sites.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      Section e(list[i], s.at("sites") + "[" + std::to_string(i) + "]");
      radio::CellSite site;
      std::vector<double> pos;
      e.get_required("id", site.id);
      e.get_required("position_m", pos);
      if (pos.size() != 2) config_error(e.at("position_m"), "expected [x, y]");
      site.position = {pos[0], pos[1]};
      e.get("tx_power_dbm", site.tx_power_dbm);
      e.get("bandwidth_rb", site.bandwidth_rb);
      e.get("active", site.active);
      e.finish();
      layout.sites.push_back(site);
    }
    layout.area = a;
  } else {
    layout.area = a;
  }

  s.get("noise_dbm_per_rb", layout.noise_dbm_per_rb);
  if (s.has("pathloss")) {
    Section p = s.child("pathloss");
    p.get("intercept_db", layout.pathloss.intercept_db);
    p.get("slope_db", layout.pathloss.slope_db);
    p.get("min_distance_m", layout.pathloss.min_distance_m);
    p.finish();
  }
  if (s.has("shadowing")) {
    Section p = s.child("shadowing");
    p.get("sigma_db", layout.shadowing.sigma_db);
    p.get("decorrelation_m", layout.shadowing.decorrelation_m);
    p.get("lattice_m", layout.shadowing.lattice_m);
    p.get("max_points", layout.shadowing.max_points);
    p.finish();
  }
  s.finish();
}

void read_attack(Section& s, adversary::AttackSpec& a, bool with_fraction) {
  if (s.has("strategy"))
    a.strategy = strategy_from(Section::convert<std::string>(s.raw("strategy"), s.at("strategy")),
                               s.at("strategy"));
  if (with_fraction) s.get("malicious_fraction", a.malicious_fraction);
  if (s.has("target_region")) {
    Section t = s.child("target_region");
    std::vector<double> c;
    adversary::TargetRegion region;
    t.get_required("center_m", c);
    if (c.size() != 2) config_error(t.at("center_m"), "expected [x, y]");
    region.center = {c[0], c[1]};
    t.get("radius_m", region.radius_m);
    t.finish();
    a.target_region = region;
  }
  std::vector<double> band = {a.forge_low_dbm, a.forge_high_dbm};
  s.get("forge_band_dbm", band);
  if (band.size() != 2) config_error(s.at("forge_band_dbm"), "expected [low, high]");
  a.forge_low_dbm = band[0];
  a.forge_high_dbm = band[1];
  s.get("coverage_floor_dbm", a.coverage_floor_dbm);
  s.finish();
}

json attack_json(const adversary::AttackSpec& a, bool with_fraction) {
  json j;
  j["strategy"] = std::string(adversary::to_string(a.strategy));
  if (with_fraction) j["malicious_fraction"] = a.malicious_fraction;
  j["target_region"] = a.target_region
                           ? json{{"center_m", {a.target_region->center.x,
                                                a.target_region->center.y}},
                                  {"radius_m", a.target_region->radius_m}}
                           : json(nullptr);
  j["forge_band_dbm"] = {a.forge_low_dbm, a.forge_high_dbm};
  j["coverage_floor_dbm"] = a.coverage_floor_dbm;
  return j;
}

// Translate a nlohmann parse error offset into a line number.
std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

RateRange parse_rate_range(const std::string& text) {
  RateRange r;
  double* slots[3] = {&r.start, &r.stop, &r.step};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(':', pos) : text.size();
    require(end != std::string::npos, ErrorKind::Configuration,
            "fake-rate range must look like A:B:STEP, got '" + text + "'");
    const std::string part = text.substr(pos, end - pos);
    const auto res = std::from_chars(part.data(), part.data() + part.size(), *slots[i]);
    require(res.ec == std::errc() && res.ptr == part.data() + part.size() && !part.empty(),
            ErrorKind::Configuration, "fake-rate range: '" + part + "' is not a number");
    pos = end + 1;
  }
  require(r.step > 0.0 && r.stop >= r.start, ErrorKind::Configuration,
          "fake-rate range needs STEP > 0 and B >= A");
  return r;
}

void ExperimentConfig::apply_seed(std::uint64_t s) {
  seed = s;
  scenario.rng_seed = s;
  attack.seed = s;
  sonlab_attack.seed = s;
  train.seed = s;
  train.ae.seed = s;
}

experiments::GridConfig ExperimentConfig::grid_config() const {
  experiments::GridConfig g;
  g.base = scenario;
  g.attack = attack;
  g.train = train;
  g.sizes = grid_sizes;
  g.severities = grid_severities;
  g.severity_order = severity_order;
  return g;
}

experiments::MrfmEvalConfig ExperimentConfig::mrfm_config() const {
  experiments::MrfmEvalConfig m;
  m.scenario = scenario;
  m.scenario.outage_cells = sweep_outage_cells;
  m.attack = attack;
  m.lof = train.lof;
  m.regional = train.regional;
  m.composition = train.composition;
  m.test_fraction = train.test_fraction;
  m.seed = seed;
  return m;
}

experiments::SonLabConfig ExperimentConfig::sonlab_config() const {
  experiments::SonLabConfig c;
  c.name = name;
  c.scenario = scenario;
  c.attack = sonlab_attack;
  c.training_attack = attack;
  c.train = train;
  c.son = son;
  c.grid_resolution_m = grid_resolution_m;
  c.mrif = mrif;
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Configuration, origin + ": line " + std::to_string(line_of(text, e.byte)) +
                                       ": " + e.what());
  }
  ExperimentConfig c;
  c.scenario.layout = scenario::default_layout();
  c.sonlab_attack.strategy = adversary::Strategy::ForgeLowRsrp;

  Section top(doc, "");
  top.get_required("name", c.name);
  std::uint64_t seed = 1;
  top.get_required("seed", seed);
  top.get("output_dir", c.output_dir);

  {
    (void)top.required("scenario");
    Section s = top.child("scenario");
    if (s.has("layout")) {
      Section l = s.child("layout");
      read_layout(l, c.scenario.layout);
    }
    s.get("n_ues", c.scenario.n_ues);
    s.get_required("n_reports", c.scenario.n_reports);
    s.get_required("outage_cells", c.scenario.outage_cells);
    s.get("malicious_fraction", c.scenario.malicious_fraction);
    if (s.has("reporting_mode")) {
      const auto m = Section::convert<std::string>(s.raw("reporting_mode"), s.at("reporting_mode"));
      if (m == "immediate") c.scenario.reporting_mode = scenario::ReportingMode::Immediate;
      else if (m == "logged") c.scenario.reporting_mode = scenario::ReportingMode::Logged;
      else config_error(s.at("reporting_mode"), "expected immediate or logged");
    }
    s.get("logged_period", c.scenario.logged_period);
    s.get("max_ticks", c.scenario.max_ticks);
    s.finish();
  }

  if (top.has("attack")) {
    Section a = top.child("attack");
    read_attack(a, c.attack, false);
  }
  c.attack.malicious_fraction = c.scenario.malicious_fraction;
  c.attack.noise_dbm_per_rb = c.scenario.layout.noise_dbm_per_rb;

  if (top.has("train")) {
    Section t = top.child("train");
    t.get("test_fraction", c.train.test_fraction);
    if (t.has("outage_ratio"))
      c.train.outage_ratio = Section::convert<double>(t.raw("outage_ratio"), t.at("outage_ratio"));
    if (t.has("autoencoder")) {
      Section a = t.child("autoencoder");
      a.get("hidden", c.train.ae.hidden);
      a.get("epochs", c.train.ae.epochs);
      a.get("learning_rate", c.train.ae.learning_rate);
      a.get("batch_size", c.train.ae.batch_size);
      a.get("shuffle", c.train.ae.shuffle);
      a.finish();
    }
    if (t.has("gbt")) {
      Section g = t.child("gbt");
      g.get("rounds", c.train.gbt.rounds);
      g.get("max_depth", c.train.gbt.max_depth);
      g.get("learning_rate", c.train.gbt.learning_rate);
      g.get("bins", c.train.gbt.bins);
      g.get("l2", c.train.gbt.l2);
      g.get("min_child_hessian", c.train.gbt.min_child_hessian);
      g.get("standardize", c.train.gbt.standardize);
      g.finish();
    }
    if (t.has("lof")) {
      Section l = t.child("lof");
      l.get("n_neighbors", c.train.lof.n_neighbors);
      l.get("contamination", c.train.lof.contamination);
      l.get("pca_k", c.train.lof.pca_k);
      l.finish();
    }
    if (t.has("regional")) {
      Section r = t.child("regional");
      r.get("eta", c.train.regional.eta);
      r.get("radius_m", c.train.regional.region_radius_m);
      r.finish();
    }
    if (t.has("composition")) {
      const auto s = Section::convert<std::string>(t.raw("composition"), t.at("composition"));
      try {
        c.train.composition = mrfm::composition_from_string(s);
      } catch (const Error& e) {
        config_error(t.at("composition"), e.what());
      }
    }
    t.finish();
  }

  if (top.has("son")) {
    Section s = top.child("son");
    s.get("rsrp_floor_dbm", c.son.trigger.rsrp_floor_dbm);
    s.get("min_reports", c.son.trigger.min_reports);
    s.get("power_boost_db", c.son.power_boost_db);
    s.get("compensating_k", c.son.compensating_k);
    s.finish();
  }

  if (top.has("mrif")) {
    Section m = top.child("mrif");
    m.get("use_fdt", c.mrif.use_fdt);
    m.get("fdt_threshold_fraction", c.mrif.fdt_threshold_fraction);
    m.get("fdt_count", c.mrif.fdt_count);
    m.get("fdt_speed_mps", c.mrif.fdt_speed_mps);
    m.get("confirmation_floor_dbm", c.mrif.confirmation_floor_dbm);
    m.finish();
  }

  if (top.has("grid")) {
    Section g = top.child("grid");
    g.get("sizes", c.grid_sizes);
    g.get("severities", c.grid_severities);
    g.get("severity_order", c.severity_order);
    g.finish();
  }

  if (top.has("sweep")) {
    Section s = top.child("sweep");
    if (s.has("fake_rates")) {
      const auto r = Section::convert<std::string>(s.raw("fake_rates"), s.at("fake_rates"));
      try {
        c.sweep = parse_rate_range(r);
      } catch (const Error& e) {
        config_error(s.at("fake_rates"), e.what());
      }
    }
    s.get("outage_cells", c.sweep_outage_cells);
    s.finish();
  }

  if (top.has("sonlab")) {
    Section s = top.child("sonlab");
    if (s.has("attack")) {
      Section a = s.child("attack");
      read_attack(a, c.sonlab_attack, true);
    }
    s.get("grid_resolution_m", c.grid_resolution_m);
    s.finish();
  }
  c.sonlab_attack.noise_dbm_per_rb = c.scenario.layout.noise_dbm_per_rb;
  top.finish();

  c.apply_seed(seed);

  // Semantic checks, reported as configuration errors.
  auto check = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      fail(ErrorKind::Configuration, e.what());
    }
  };
  check([&] { c.scenario.validate(); });
  check([&] { c.attack.validate(); });
  check([&] { c.sonlab_attack.validate(); });
  require(c.train.test_fraction > 0.0 && c.train.test_fraction < 1.0,
          ErrorKind::Configuration, "train.test_fraction must lie in (0, 1)");
  require(c.grid_resolution_m > 0.0, ErrorKind::Configuration,
          "sonlab.grid_resolution_m must be > 0");
  for (std::size_t sev : c.grid_severities)
    require(sev >= 1 && sev <= c.severity_order.size(), ErrorKind::Configuration,
            "grid.severities must lie in [1, len(grid.severity_order)]");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Configuration, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string to_json(const ExperimentConfig& c) {
  const auto& l = c.scenario.layout;
  json sites = json::array();
  for (const auto& s : l.sites)
    sites.push_back({{"id", s.id},
                     {"position_m", {s.position.x, s.position.y}},
                     {"tx_power_dbm", s.tx_power_dbm},
                     {"bandwidth_rb", s.bandwidth_rb},
                     {"active", s.active}});
  json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["scenario"] = {
      {"layout",
       {{"area_m", {l.area.width_m, l.area.height_m}},
        {"sites", sites},
        {"noise_dbm_per_rb", l.noise_dbm_per_rb},
        {"pathloss",
         {{"intercept_db", l.pathloss.intercept_db},
          {"slope_db", l.pathloss.slope_db},
          {"min_distance_m", l.pathloss.min_distance_m}}},
        {"shadowing",
         {{"sigma_db", l.shadowing.sigma_db},
          {"decorrelation_m", l.shadowing.decorrelation_m},
          {"lattice_m", l.shadowing.lattice_m},
          {"max_points", l.shadowing.max_points}}}}},
      {"n_ues", c.scenario.n_ues},
      {"n_reports", c.scenario.n_reports},
      {"outage_cells", c.scenario.outage_cells},
      {"malicious_fraction", c.scenario.malicious_fraction},
      {"reporting_mode",
       c.scenario.reporting_mode == scenario::ReportingMode::Logged ? "logged" : "immediate"},
      {"logged_period", c.scenario.logged_period},
      {"max_ticks", c.scenario.max_ticks}};
  j["attack"] = attack_json(c.attack, false);
  const auto& t = c.train;
  j["train"] = {{"test_fraction", t.test_fraction},
                {"outage_ratio", t.outage_ratio ? json(*t.outage_ratio) : json(nullptr)},
                {"autoencoder",
                 {{"hidden", t.ae.hidden},
                  {"epochs", t.ae.epochs},
                  {"learning_rate", t.ae.learning_rate},
                  {"batch_size", t.ae.batch_size},
                  {"shuffle", t.ae.shuffle}}},
                {"gbt",
                 {{"rounds", t.gbt.rounds},
                  {"max_depth", t.gbt.max_depth},
                  {"learning_rate", t.gbt.learning_rate},
                  {"bins", t.gbt.bins},
                  {"l2", t.gbt.l2},
                  {"min_child_hessian", t.gbt.min_child_hessian},
                  {"standardize", t.gbt.standardize}}},
                {"lof",
                 {{"n_neighbors", t.lof.n_neighbors},
                  {"contamination", t.lof.contamination},
                  {"pca_k", t.lof.pca_k}}},
                {"regional", {{"eta", t.regional.eta}, {"radius_m", t.regional.region_radius_m}}},
                {"composition", std::string(mrfm::to_string(t.composition))}};
  j["son"] = {{"rsrp_floor_dbm", c.son.trigger.rsrp_floor_dbm},
              {"min_reports", c.son.trigger.min_reports},
              {"power_boost_db", c.son.power_boost_db},
              {"compensating_k", c.son.compensating_k}};
  j["mrif"] = {{"use_fdt", c.mrif.use_fdt},
               {"fdt_threshold_fraction", c.mrif.fdt_threshold_fraction},
               {"fdt_count", c.mrif.fdt_count},
               {"fdt_speed_mps", c.mrif.fdt_speed_mps},
               {"confirmation_floor_dbm", c.mrif.confirmation_floor_dbm}};
  j["grid"] = {{"sizes", c.grid_sizes},
               {"severities", c.grid_severities},
               {"severity_order", c.severity_order}};
  char rates[96];
  std::snprintf(rates, sizeof rates, "%.10g:%.10g:%.10g", c.sweep.start, c.sweep.stop,
                c.sweep.step);
  j["sweep"] = {{"fake_rates", rates}, {"outage_cells", c.sweep_outage_cells}};
  j["sonlab"] = {{"attack", attack_json(c.sonlab_attack, true)},
                 {"grid_resolution_m", c.grid_resolution_m}};
  return j.dump(2) + "\n";
}

}  // namespace mrif::config
