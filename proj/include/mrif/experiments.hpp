#pragma once

// Experiment drivers behind the CLI: the ADM F1 grid, the MRFM evaluation
// and fake-rate sweep, and the SON lab with its six coverage maps.

#include <iosfwd>
#include <string>
#include <vector>

#include "mrif/adversary.hpp"
#include "mrif/pipeline.hpp"

namespace mrif::experiments {

/// Outage sets grow by taking the first `severity` cells of the order.
std::vector<int> severity_cells(std::size_t severity, std::span<const int> order);

// ADM grid ------------------------------------------------------------------

struct GridConfig {
  scenario::ScenarioConfig base;
  adversary::AttackSpec attack;
  pipeline::TrainConfig train;
  std::vector<std::size_t> sizes = {2500, 5000, 7500};
  std::vector<std::size_t> severities = {1, 2, 3};
  std::vector<int> severity_order = {5, 3, 7};
};

struct CellScores {
  double ae_f1 = 0.0;
  double gbt_f1 = 0.0;
};

/// One grid cell: generate, inject, split, train both detectors and score
/// the held-out rows on the outage class (any report claiming an outage).
CellScores adm_evaluate_cell(const scenario::ScenarioConfig& scenario,
                             const adversary::AttackSpec& attack,
                             const pipeline::TrainConfig& train);

/// Rows ordered by size, then severity, then method (ae, gbt).
std::vector<adm::GridRow> adm_evaluate_grid(const GridConfig& config);

void write_grid_csv(std::ostream& out, const std::vector<adm::GridRow>& rows);

// MRFM ----------------------------------------------------------------------

struct MrfmEvalConfig {
  scenario::ScenarioConfig scenario;
  adversary::AttackSpec attack;
  mrfm::LofParams lof;
  mrfm::RegionalRule regional;
  mrfm::Composition composition = mrfm::Composition::LofOrRegional;
  double test_fraction = 0.3;
  std::uint64_t seed = 1;
};

/// Fit on the training share of genuine outage reports, then forge
/// ceil(fake_rate * held-out outage count) reports among held-out normal
/// reports and classify every held-out outage claim.
mrfm::ClassErrors mrfm_evaluate(const MrfmEvalConfig& config, double fake_rate);

struct SweepRow {
  double fake_rate = 0.0;
  double real_error_rate = 0.0;
  double fake_error_rate = 0.0;
};

std::vector<SweepRow> mrfm_sweep(const MrfmEvalConfig& config, std::span<const double> rates);

/// Rates a, a+step, ..., up to b (inclusive within half a step).
std::vector<double> rate_range(double a, double b, double step);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// SON lab -------------------------------------------------------------------

struct SonLabConfig {
  std::string name = "sonlab";
  /// Scenario with the genuine outage; the attack runs on the same geometry
  /// with every cell healthy.
  scenario::ScenarioConfig scenario;
  /// Attack on the healthy network (normally region-targeted forge_low).
  adversary::AttackSpec attack;
  /// Attack mixed into the training data of the guard's models.
  adversary::AttackSpec training_attack;
  pipeline::TrainConfig train;
  son::SonParams son;
  double grid_resolution_m = 10.0;
  pipeline::MrifOptions mrif;
  /// Guard in front of the engine for the "guarded" variant.
  pipeline::Guard guard = pipeline::Guard::Mrif;
};

struct SonVariant {
  std::string name;
  radio::NetworkLayout network;
  radio::CoverageGrid grid;
  son::KpiSummary kpi;
};

struct SonLabResult {
  std::vector<SonVariant> variants;  // baseline, real_outage, real_outage_coc,
                                     // fake_attack_view, fake_coc, guarded
  son::KpiSummary outage_region_no_coc;
  son::KpiSummary outage_region_coc;
  std::vector<int> real_actions;   // cells compensated in the real outage
  std::vector<int> fake_actions;   // cells compensated under attack, unguarded
  std::vector<int> guarded_actions;
  pipeline::MetricsSummary guarded_metrics;
  pipeline::MetricsSummary real_guarded_metrics;
  bool real_guarded_fired = false;
  son::KpiSummary real_guarded_after;
};

SonLabResult run_sonlab(const SonLabConfig& config);

void write_sonlab_kpis(std::ostream& out, const SonLabConfig& config, const SonLabResult& r);
void write_sonlab_summary(std::ostream& out, const SonLabConfig& config,
                          const SonLabResult& r);

}  // namespace mrif::experiments
