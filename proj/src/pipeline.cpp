#include "mrif/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

namespace mrif::pipeline {

using scenario::Label;
using scenario::MdtReport;

std::string schema_digest() {
  std::string s = scenario::kDatasetHeader;
  s += "|features:x,y,serving_rsrp,serving_rsrq,n1..n6_rsrp,n1..n6_rsrq";
  return hex_digest(fnv1a64(s));
}

std::string TrainConfig::digest() const {
  char buf[512];
  std::string s;
  s += "ae";
  for (auto h : ae.hidden) s += " " + std::to_string(h);
  std::snprintf(buf, sizeof buf,
                ";%zu %.17g %zu %llu %d;gbt %zu %zu %.17g %zu %.17g %.17g %d;"
                "lof %zu %.17g %zu;rule %zu %.17g;comp %d;split %.17g %llu;ratio %.17g",
                ae.epochs, ae.learning_rate, ae.batch_size,
                static_cast<unsigned long long>(ae.seed), ae.shuffle ? 1 : 0, gbt.rounds,
                gbt.max_depth, gbt.learning_rate, gbt.bins, gbt.l2, gbt.min_child_hessian,
                gbt.standardize ? 1 : 0, lof.n_neighbors, lof.contamination, lof.pca_k,
                regional.eta, regional.region_radius_m, static_cast<int>(composition),
                test_fraction, static_cast<unsigned long long>(seed),
                outage_ratio.value_or(-1.0));
  s += buf;
  return hex_digest(fnv1a64(s));
}

TrainOutcome train_models(const scenario::Dataset& dataset, const TrainConfig& config) {
  require(!dataset.reports.empty(), ErrorKind::Training, "cannot train on an empty dataset");
  TrainOutcome out;
  TrainingReport& rep = out.report;
  const auto labels = dataset.labels();
  rep.split = learn::stratified_split(labels, config.test_fraction, config.seed);
  const learn::Matrix x = dataset.features();
  const learn::Matrix train = x.select_rows(rep.split.train);

  std::vector<std::size_t> normal_idx;
  std::vector<int> binary;
  std::vector<MdtReport> real_train;
  for (std::size_t i : rep.split.train) {
    binary.push_back(labels[i] == 0 ? 0 : 1);
    if (labels[i] == 0) normal_idx.push_back(i);
    if (labels[i] == static_cast<int>(Label::RealOutage))
      real_train.push_back(dataset.reports[i]);
  }
  const std::size_t anomalous =
      static_cast<std::size_t>(std::count(binary.begin(), binary.end(), 1));
  double ratio = config.outage_ratio.value_or(static_cast<double>(anomalous) /
                                              static_cast<double>(binary.size()));
  // With no anomalies in the labels, flag only the single largest error.
  ratio = std::clamp(ratio, 1.0 / static_cast<double>(binary.size()), 0.5);
  rep.outage_ratio = ratio;

  ModelBundle& b = out.bundle;
  b.schema_digest = schema_digest();
  b.config_digest = config.digest();
  b.dataset_digest = dataset.config_digest;
  b.regional = config.regional;
  b.composition = config.composition;
  b.detector = adm::fit_detector(x.select_rows(normal_idx), train, ratio, config.ae);
  rep.ae_initial_loss = b.detector.autoencoder.epoch_loss.front();
  rep.ae_final_loss = b.detector.autoencoder.epoch_loss.back();
  rep.threshold = *b.detector.autoencoder.threshold;

  try {
    b.gbt = adm::gbt_train(train, binary, config.gbt);
    rep.gbt_final_loss = b.gbt->train_loss.back();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Training) throw;
    rep.gbt_error = e.what();
  }
  try {
    b.mrfm = mrfm::mrfm_fit(real_train, config.lof);
    rep.mrfm_reference = real_train.size();
    rep.mrfm_threshold = b.mrfm->threshold;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Fit) throw;
    rep.mrfm_error = e.what();
  }
  return out;
}

double MetricsSummary::malicious_recall() const {
  return malicious_total ? static_cast<double>(detected_malicious) /
                               static_cast<double>(malicious_total)
                         : 1.0;
}

double MetricsSummary::real_misflag_rate() const {
  return real_total ? static_cast<double>(real_misflagged) / static_cast<double>(real_total)
                    : 0.0;
}

MrifResult run_mrif(const scenario::Dataset& dataset, const ModelBundle& models,
                    const MrifOptions& options) {
  require(models.schema_digest == schema_digest(), ErrorKind::Compatibility,
          "model bundle schema " + models.schema_digest +
              " does not match the report schema " + schema_digest());
  require(models.detector.autoencoder.threshold.has_value(), ErrorKind::State,
          "bundle detector is not calibrated");
  require(!options.use_fdt || options.world != nullptr, ErrorKind::Configuration,
          "FDT verification needs the scenario ground truth");
  const std::size_t n = dataset.reports.size();
  MrifResult res;
  res.verdicts.resize(n);
  if (n == 0) return res;

  const auto errors = models.detector.errors(dataset.features());
  const double thr = *models.detector.autoencoder.threshold;
  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = res.verdicts[i];
    v.index = i;
    v.ue_id = dataset.reports[i].ue_id;
    v.tick = dataset.reports[i].tick;
    v.reconstruction_error = errors[i];
    if (errors[i] > thr) {
      v.stage1 = Stage1::Anomalous;
      flagged.push_back(i);
    }
  }

  std::vector<MdtReport> flagged_reports;
  for (std::size_t i : flagged) flagged_reports.push_back(dataset.reports[i]);
  const auto regional = mrfm::regional_count_rule(flagged_reports, models.regional);
  std::vector<Label> stage2 = regional;
  if (models.mrfm) {
    const auto scores = mrfm::mrfm_scores(*models.mrfm, flagged_reports);
    std::vector<Label> lof(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) {
      lof[j] = scores[j] > models.mrfm->threshold ? Label::Malicious : Label::RealOutage;
      res.verdicts[flagged[j]].lof_score = scores[j];
    }
    stage2 = mrfm::combine(lof, regional, models.composition);
  }
  for (std::size_t j = 0; j < flagged.size(); ++j) {
    res.verdicts[flagged[j]].stage2 = stage2[j];
    res.verdicts[flagged[j]].final = stage2[j];
  }

  if (options.use_fdt && !flagged.empty()) {
    const scenario::World& w = *options.world;
    std::vector<Point> candidates;
    for (const auto& s : w.healthy.sites) candidates.push_back(s.position);
    const auto fleet =
        fdt::place_fdts(candidates, std::min(options.fdt_count, candidates.size()),
                        w.healthy.area, options.fdt_speed_mps);
    // Reports are grouped by the cell planned to cover their position, so a
    // group's centroid lies inside that cell's area.
    // Only outage claims that survived the filter are verified.
    std::map<int, std::vector<std::size_t>> per_cell_claims;  // indices into flagged
    std::size_t claims = 0;
    for (std::size_t j = 0; j < flagged.size(); ++j) {
      if (stage2[j] != Label::RealOutage) continue;
      per_cell_claims[son::planned_best_server(w.healthy, flagged_reports[j].position)]
          .push_back(j);
      ++claims;
    }

    for (const auto& [cell, members] : per_cell_claims) {
      // Share of all surviving outage claims coming from this cell.
      const double fraction =
          static_cast<double>(members.size()) / static_cast<double>(claims);
      if (fraction >= options.fdt_threshold_fraction) continue;
      Point centroid{0.0, 0.0};
      std::vector<MdtReport> suspects;
      bool any_malicious = false, any_real = false;
      for (std::size_t j : members) {
        const MdtReport& r = flagged_reports[j];
        centroid.x += r.position.x;
        centroid.y += r.position.y;
        suspects.push_back(r);
        any_malicious |= r.label == Label::Malicious;
        any_real |= r.label == Label::RealOutage;
      }
      centroid.x /= static_cast<double>(members.size());
      centroid.y /= static_cast<double>(members.size());
      auto v = fdt::verify_at(centroid, suspects, w.degraded, w.shadow,
                              options.confirmation_floor_dbm);
      const auto d = fdt::dispatch(fleet, centroid);
      v.fdt_index = d.fdt_index;
      v.travel_time_s = d.travel_time_s;
      const Label override_label = v.verdict == fdt::Verdict::AttackConfirmed
                                       ? Label::Malicious
                                       : Label::RealOutage;
      bool all_correct = true;
      for (std::size_t j : members) {
        auto& rec = res.verdicts[flagged[j]];
        rec.stage3 = v;
        rec.final = override_label;
        if (flagged_reports[j].label == Label::Malicious)
          all_correct &= override_label == Label::Malicious;
      }
      if (any_malicious && !any_real) {
        ++res.metrics.visits_malicious_only;
        if (all_correct) ++res.metrics.visits_malicious_only_correct;
      }
      res.metrics.visits.push_back(v);
    }
  }

  // Metrics against ground truth.
  MetricsSummary& m = res.metrics;
  std::vector<int> pred(n), truth(n);
  std::map<int, std::pair<bool, bool>> per_ue;  // (is malicious, flagged malicious)
  for (std::size_t i = 0; i < n; ++i) {
    const Label truth_label = dataset.reports[i].label;
    const Label fin = res.verdicts[i].final;
    pred[i] = res.verdicts[i].stage1 == Stage1::Anomalous ? 1 : 0;
    truth[i] = truth_label == Label::Normal ? 0 : 1;
    if (truth_label == Label::Malicious) {
      ++m.malicious_total;
      (fin == Label::Malicious ? m.detected_malicious : m.missed_malicious)++;
    } else if (fin == Label::Malicious) {
      ++m.false_malicious;
    }
    if (truth_label == Label::RealOutage) {
      ++m.real_total;
      if (fin == Label::Malicious) ++m.real_misflagged;
      if (fin == Label::RealOutage) ++m.real_confirmed;
    }
    auto& ue = per_ue[dataset.reports[i].ue_id];
    ue.first |= truth_label == Label::Malicious;
    ue.second |= fin == Label::Malicious;
  }
  m.stage1 = learn::compute_metrics(pred, truth, 1);
  for (const auto& [id, flags] : per_ue) {
    if (flags.first) ++m.malicious_ues;
    if (flags.first && flags.second) ++m.detected_malicious_ues;
    if (!flags.first && flags.second) ++m.false_malicious_ues;
  }
  return res;
}

void write_verdicts(std::ostream& out, const std::vector<VerdictRecord>& verdicts) {
  out << kVerdictHeader << '\n';
  for (const auto& v : verdicts) {
    out << v.ue_id << ',' << v.tick << ','
        << (v.stage1 == Stage1::Anomalous ? "anomalous" : "normal") << ','
        << (v.stage2 ? scenario::to_string(*v.stage2) : "") << ','
        << scenario::to_string(v.final) << '\n';
  }
}

std::string_view to_string(Guard g) { return g == Guard::None ? "none" : "mrif"; }

Guard guard_from_string(std::string_view s) {
  if (s == "none") return Guard::None;
  if (s == "mrif") return Guard::Mrif;
  fail(ErrorKind::Configuration, "guard must be 'none' or 'mrif'");
}

GuardedSonResult run_guarded_son(const scenario::World& world,
                                 const scenario::Dataset& reports,
                                 const ModelBundle* models, Guard guard,
                                 const son::SonParams& son_params,
                                 std::span<const Point> eval_points,
                                 const MrifOptions& options) {
  GuardedSonResult res;
  son::SonEngine engine(world.degraded, son_params);
  son::ReportFilter filter;
  std::vector<bool> keep;
  if (guard == Guard::Mrif) {
    require(models != nullptr, ErrorKind::Configuration, "guard=mrif needs trained models");
    MrifOptions opts = options;
    if (opts.use_fdt && !opts.world) opts.world = &world;
    res.mrif = run_mrif(reports, *models, opts);
    keep.resize(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i)
      keep[i] = res.mrif->verdicts[i].final != Label::Malicious;
    filter = [&keep](std::size_t i, const MdtReport&) { return keep[i]; };
  }
  res.actions = engine.process(reports.reports, filter);
  res.network = engine.network();
  res.before = son::evaluate_kpis(world.degraded, eval_points, world.shadow);
  res.after = son::evaluate_kpis(res.network, eval_points, world.shadow);
  return res;
}

}  // namespace mrif::pipeline
