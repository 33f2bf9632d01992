#include "mrif/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mrif/rng.hpp"

namespace mrif::experiments {

using scenario::Dataset;
using scenario::Label;
using scenario::MdtReport;

std::vector<int> severity_cells(std::size_t severity, std::span<const int> order) {
  require(severity <= order.size(), ErrorKind::Configuration,
          "severity " + std::to_string(severity) + " exceeds the outage order list");
  return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(severity)};
}

namespace {

double f1_of(const std::vector<int>& pred, const std::vector<int>& truth) {
  return learn::compute_metrics(pred, truth, 1).f1;
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> idx) {
  Dataset out;
  out.config_digest = ds.config_digest;
  out.reports.reserve(idx.size());
  for (std::size_t i : idx) out.reports.push_back(ds.reports[i]);
  return out;
}

}  // namespace

CellScores adm_evaluate_cell(const scenario::ScenarioConfig& sc,
                             const adversary::AttackSpec& attack,
                             const pipeline::TrainConfig& train) {
  const auto world = scenario::make_world(sc);
  Dataset ds = scenario::generate_reports(world);
  adversary::AttackSpec spec = attack;
  spec.malicious_fraction = sc.malicious_fraction;
  ds = adversary::inject_malicious(ds, spec, adversary::OutageValueModel::fit(ds));

  const auto trained = pipeline::train_models(ds, train);
  const auto& split = trained.report.split;
  const learn::Matrix test = ds.features().select_rows(split.test);
  std::vector<int> truth;
  for (std::size_t i : split.test) truth.push_back(ds.reports[i].label == Label::Normal ? 0 : 1);

  CellScores s;
  s.ae_f1 = f1_of(trained.bundle.detector.classify(test), truth);
  if (trained.bundle.gbt) {
    const auto p = adm::gbt_predict(*trained.bundle.gbt, test);
    std::vector<int> pred(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) pred[i] = p[i] > 0.5 ? 1 : 0;
    s.gbt_f1 = f1_of(pred, truth);
  }
  return s;
}

std::vector<adm::GridRow> adm_evaluate_grid(const GridConfig& config) {
  struct Cell {
    std::size_t size, severity;
  };
  std::vector<Cell> cells;
  for (std::size_t size : config.sizes)
    for (std::size_t sev : config.severities) cells.push_back({size, sev});
  for (const auto& c : cells) severity_cells(c.severity, config.severity_order);

  std::vector<CellScores> scores(cells.size());
  std::vector<std::string> errors(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(cells.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      scenario::ScenarioConfig sc = config.base;
      sc.n_reports = cells[k].size;
      sc.outage_cells = severity_cells(cells[k].severity, config.severity_order);
      scores[k] = adm_evaluate_cell(sc, config.attack, config.train);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (std::size_t k = 0; k < cells.size(); ++k)
    require(errors[k].empty(), ErrorKind::Evaluation,
            "grid cell size=" + std::to_string(cells[k].size) +
                " severity=" + std::to_string(cells[k].severity) + ": " + errors[k]);

  std::vector<adm::GridRow> rows;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    rows.push_back({cells[k].size, cells[k].severity, "ae", scores[k].ae_f1});
    rows.push_back({cells[k].size, cells[k].severity, "gbt", scores[k].gbt_f1});
  }
  return rows;
}

void write_grid_csv(std::ostream& out, const std::vector<adm::GridRow>& rows) {
  out << adm::kGridHeader << '\n';
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.f1);
    out << r.size << ',' << r.severity << ',' << r.method << ',' << buf << '\n';
  }
}

mrfm::ClassErrors mrfm_evaluate(const MrfmEvalConfig& config, double fake_rate) {
  const auto world = scenario::make_world(config.scenario);
  const Dataset ds = scenario::generate_reports(world);
  const auto split = learn::stratified_split(ds.labels(), config.test_fraction, config.seed);

  std::vector<std::size_t> real_train;
  for (std::size_t i : split.train)
    if (ds.reports[i].label == Label::RealOutage) real_train.push_back(i);
  const Dataset train_real = subset(ds, real_train);
  const auto model = mrfm::mrfm_fit(train_real.reports, config.lof);

  Dataset test = subset(ds, split.test);
  const std::size_t n_real = test.count(Label::RealOutage);
  test = adversary::inject_count(test, config.attack,
                                 adversary::OutageValueModel::fit(train_real),
                                 adversary::malicious_count(fake_rate, n_real));

  std::vector<MdtReport> claims;
  for (const auto& r : test.reports)
    if (r.label != Label::Normal) claims.push_back(r);
  const auto lof = mrfm::mrfm_classify(model, claims);
  const auto regional = mrfm::regional_count_rule(claims, config.regional);
  return mrfm::class_errors(claims, mrfm::combine(lof, regional, config.composition));
}

std::vector<double> rate_range(double a, double b, double step) {
  require(step > 0.0 && b >= a, ErrorKind::Configuration,
          "rate range needs step > 0 and end >= start");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double r = std::round((a + static_cast<double>(i) * step) * 1e9) / 1e9;
    if (r > b + step / 2) break;
    out.push_back(r);
  }
  return out;
}

std::vector<SweepRow> mrfm_sweep(const MrfmEvalConfig& config, std::span<const double> rates) {
  for (double r : rates)
    require(r >= 0.05 - 1e-9 && r <= 0.90 + 1e-9, ErrorKind::Configuration,
            "fake rates must lie in [0.05, 0.90]");
  std::vector<SweepRow> rows(rates.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rates.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    MrfmEvalConfig c = config;
    c.attack.seed = Rng::derive(config.attack.seed, "sweep", k).next_u64();
    const auto e = mrfm_evaluate(c, rates[k]);
    rows[k] = {rates[k], e.real_error_rate, e.fake_error_rate};
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << mrfm::kSweepHeader << '\n';
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f,%.6f,%.6f\n", r.fake_rate, r.real_error_rate,
                  r.fake_error_rate);
    out << buf;
  }
}

SonLabResult run_sonlab(const SonLabConfig& config) {
  SonLabResult res;
  scenario::ScenarioConfig healthy_cfg = config.scenario;
  healthy_cfg.outage_cells.clear();

  const auto real_world = scenario::make_world(config.scenario);
  const Dataset real_ds = scenario::generate_reports(real_world);
  const auto attack_world = scenario::make_world(healthy_cfg);
  const Dataset clean_ds = scenario::generate_reports(attack_world);
  const auto outage_values = adversary::OutageValueModel::fit(real_ds);

  const auto points =
      radio::grid_points(config.scenario.layout.area, config.grid_resolution_m);
  auto variant = [&](std::string name, const radio::NetworkLayout& net,
                     const radio::ShadowMap& shadow) {
    SonVariant v;
    v.name = std::move(name);
    v.network = net;
    v.grid = radio::coverage_map(net, config.grid_resolution_m, shadow);
    v.kpi = son::evaluate_kpis(net, points, shadow);
    res.variants.push_back(std::move(v));
  };

  // Genuine outage, with and without compensation.
  son::SonEngine real_engine(real_world.degraded, config.son);
  real_engine.process(real_ds.reports);
  res.real_actions = real_engine.suspected();
  variant("baseline", attack_world.healthy, attack_world.shadow);
  variant("real_outage", real_world.degraded, real_world.shadow);
  variant("real_outage_coc", real_engine.network(), real_world.shadow);
  const auto region = son::region_points(real_world.healthy, points,
                                         config.scenario.outage_cells);
  if (!region.empty()) {
    res.outage_region_no_coc = son::evaluate_kpis(real_world.degraded, region, real_world.shadow);
    res.outage_region_coc = son::evaluate_kpis(real_engine.network(), region, real_world.shadow);
  }

  // Guard models trained on the genuine outage data.
  const Dataset training = adversary::inject_malicious(real_ds, config.training_attack, outage_values);
  const auto bundle = pipeline::train_models(training, config.train).bundle;

  // Forged outage on the healthy network.
  const Dataset attacked = adversary::inject_malicious(clean_ds, config.attack, outage_values);
  son::SonEngine fake_engine(attack_world.degraded, config.son);
  fake_engine.process(attacked.reports);
  res.fake_actions = fake_engine.suspected();
  const auto view = adversary::apply_outage(attack_world.healthy, res.fake_actions);
  if (view.active_count() > 0) variant("fake_attack_view", view, attack_world.shadow);
  else variant("fake_attack_view", attack_world.healthy, attack_world.shadow);
  variant("fake_coc", fake_engine.network(), attack_world.shadow);

  const auto guarded = pipeline::run_guarded_son(attack_world, attacked, &bundle, config.guard,
                                                 config.son, points, config.mrif);
  for (const auto& a : guarded.actions) res.guarded_actions.push_back(a.outage_cell);
  if (guarded.mrif) res.guarded_metrics = guarded.mrif->metrics;
  else res.guarded_metrics.malicious_total = attacked.count(Label::Malicious);
  res.guarded_metrics.missed_malicious =
      res.guarded_metrics.malicious_total - res.guarded_metrics.detected_malicious;
  variant("guarded", guarded.network, attack_world.shadow);

  const auto real_guarded = pipeline::run_guarded_son(real_world, real_ds, &bundle, config.guard,
                                                      config.son, points, config.mrif);
  res.real_guarded_fired = real_guarded.coc_fired();
  if (real_guarded.mrif) res.real_guarded_metrics = real_guarded.mrif->metrics;
  res.real_guarded_after = real_guarded.after;
  return res;
}

void write_sonlab_kpis(std::ostream& out, const SonLabConfig& config, const SonLabResult& r) {
  out << son::kKpiHeader << '\n';
  for (const auto& v : r.variants) son::write_kpi_row(out, config.name, v.name, v.kpi);
  son::write_kpi_row(out, config.name, "real_outage@outage_region", r.outage_region_no_coc);
  son::write_kpi_row(out, config.name, "real_outage_coc@outage_region", r.outage_region_coc);
}

void write_sonlab_summary(std::ostream& out, const SonLabConfig& config,
                          const SonLabResult& r) {
  auto find = [&](const std::string& name) -> const son::KpiSummary& {
    for (const auto& v : r.variants)
      if (v.name == name) return v.kpi;
    fail(ErrorKind::State, "missing variant " + name);
  };
  out << pipeline::kSummaryHeader << '\n';
  char buf[256];
  auto row = [&](const std::string& scen, const char* guard, std::size_t det,
                 std::size_t missed, std::size_t false_mal, bool fired,
                 const son::KpiSummary& k) {
    std::snprintf(buf, sizeof buf, ",%s,%zu,%zu,%zu,%d,%.6f,%.6f\n", guard, det, missed,
                  false_mal, fired ? 1 : 0, k.mean_sinr_db, k.p05_sinr_db);
    out << scen << buf;
  };
  const std::size_t forged = r.guarded_metrics.malicious_total;
  row(config.name + "-attack", "none", 0, forged, 0, !r.fake_actions.empty(), find("fake_coc"));
  const char* guard = config.guard == pipeline::Guard::Mrif ? "mrif" : "none";
  row(config.name + "-attack", guard, r.guarded_metrics.detected_malicious,
      r.guarded_metrics.missed_malicious, r.guarded_metrics.false_malicious,
      !r.guarded_actions.empty(), find("guarded"));
  row(config.name + "-real", "none", 0, 0, 0, !r.real_actions.empty(), find("real_outage_coc"));
  row(config.name + "-real", guard, r.real_guarded_metrics.detected_malicious,
      r.real_guarded_metrics.missed_malicious, r.real_guarded_metrics.false_malicious,
      r.real_guarded_fired, r.real_guarded_after);
}

}  // namespace mrif::experiments
