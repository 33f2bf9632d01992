#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mrif/adm.hpp"
#include "mrif/fdt.hpp"
#include "mrif/mrfm.hpp"
#include "mrif/scenario.hpp"
#include "mrif/son.hpp"

namespace mrif::pipeline {

/// Digest of the report schema (CSV header and feature order). Bundles carry
/// it so that models are never applied to data laid out differently.
std::string schema_digest();

struct TrainConfig {
  adm::AeConfig ae;
  adm::GbtConfig gbt;
  mrfm::LofParams lof;
  mrfm::RegionalRule regional;
  mrfm::Composition composition = mrfm::Composition::LofOrRegional;
  double test_fraction = 0.3;
  std::uint64_t seed = 1;
  /// Fraction of anomalous rows assumed at calibration. Unset: taken from
  /// the labelled training split.
  std::optional<double> outage_ratio;

  std::string digest() const;
};

struct ModelBundle {
  static constexpr int kVersion = 1;
  int version = kVersion;
  std::string schema_digest;
  std::string config_digest;   // training config
  std::string dataset_digest;  // scenario config of the training data
  adm::AnomalyDetector detector;
  std::optional<adm::GbtModel> gbt;
  std::optional<mrfm::MrfmModel> mrfm;
  mrfm::RegionalRule regional;
  mrfm::Composition composition = mrfm::Composition::LofOrRegional;

  /// Hash over the serialized content.
  std::string digest() const;
};

struct TrainingReport {
  learn::Split split;
  double outage_ratio = 0.0;
  double ae_initial_loss = 0.0;
  double ae_final_loss = 0.0;
  double threshold = 0.0;
  std::optional<double> gbt_final_loss;
  std::string gbt_error;  // non-empty when the GBT could not be trained
  std::size_t mrfm_reference = 0;
  double mrfm_threshold = 0.0;
  std::string mrfm_error;
};

struct TrainOutcome {
  ModelBundle bundle;
  TrainingReport report;
};

/// Stratified split; AE on normal training rows, threshold on all training
/// rows; GBT on training rows (anomalous = not normal); MRFM on the genuine
/// outage training reports. GBT and MRFM failures are recorded, not thrown.
TrainOutcome train_models(const scenario::Dataset& dataset, const TrainConfig& config);

std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const std::string& text);
void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

// ---------------------------------------------------------------------------

enum class Stage1 { Normal, Anomalous };

struct VerdictRecord {
  std::size_t index = 0;  // position in the dataset
  int ue_id = 0;
  std::int64_t tick = 0;
  Stage1 stage1 = Stage1::Normal;
  double reconstruction_error = 0.0;
  std::optional<scenario::Label> stage2;
  std::optional<double> lof_score;
  std::optional<fdt::VerificationResult> stage3;
  scenario::Label final = scenario::Label::Normal;
};

struct MrifOptions {
  bool use_fdt = false;
  double fdt_threshold_fraction = 0.05;
  std::size_t fdt_count = 3;
  double fdt_speed_mps = 10.0;
  double confirmation_floor_dbm = fdt::kConfirmationFloorDbm;
  /// Ground truth the drones measure; required with use_fdt.
  const scenario::World* world = nullptr;
};

struct MetricsSummary {
  learn::ClassificationMetrics stage1;  // positive = any outage claim
  std::size_t malicious_total = 0;
  std::size_t detected_malicious = 0;
  std::size_t missed_malicious = 0;
  std::size_t false_malicious = 0;      // non-malicious reports marked malicious
  std::size_t real_total = 0;
  std::size_t real_misflagged = 0;      // real outage reports marked malicious
  std::size_t real_confirmed = 0;       // real outage reports marked real_outage
  // Per UE: a UE is malicious if any of its reports is.
  std::size_t malicious_ues = 0;
  std::size_t detected_malicious_ues = 0;
  std::size_t false_malicious_ues = 0;
  std::vector<fdt::VerificationResult> visits;
  std::size_t visits_malicious_only = 0;
  std::size_t visits_malicious_only_correct = 0;

  double malicious_recall() const;
  double real_misflag_rate() const;
};

struct MrifResult {
  std::vector<VerdictRecord> verdicts;
  MetricsSummary metrics;
};

MrifResult run_mrif(const scenario::Dataset& dataset, const ModelBundle& models,
                    const MrifOptions& options = {});

inline constexpr const char* kVerdictHeader = "ue_id,tick,stage1,stage2,final";
void write_verdicts(std::ostream& out, const std::vector<VerdictRecord>& verdicts);

// ---------------------------------------------------------------------------

enum class Guard { None, Mrif };
std::string_view to_string(Guard g);
Guard guard_from_string(std::string_view s);

struct GuardedSonResult {
  son::KpiSummary before;
  son::KpiSummary after;
  std::vector<son::CocAction> actions;
  radio::NetworkLayout network;  // after the engine acted
  bool coc_fired() const { return !actions.empty(); }
  std::optional<MrifResult> mrif;
};

/// Feed the reports to a SON engine running on the world's actual network,
/// either raw or filtered to the reports MRIF keeps, and evaluate KPIs at the
/// given points before and after the engine acted.
GuardedSonResult run_guarded_son(const scenario::World& world,
                                 const scenario::Dataset& reports,
                                 const ModelBundle* models, Guard guard,
                                 const son::SonParams& son_params,
                                 std::span<const Point> eval_points,
                                 const MrifOptions& options = {});

inline constexpr const char* kSummaryHeader =
    "scenario,guard,detected_malicious,missed_malicious,false_malicious,coc_fired,"
    "mean_sinr_db,p05_sinr_db";

}  // namespace mrif::pipeline
