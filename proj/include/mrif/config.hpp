#pragma once

// JSON experiment configuration shared by every CLI command.
//
// Unknown keys anywhere in the document are rejected, and every failure
// names the offending field ("scenario.layout.area_m") so that typos never
// silently fall back to a default.

#include <cstdint>
#include <string>

#include "mrif/adversary.hpp"
#include "mrif/experiments.hpp"
#include "mrif/pipeline.hpp"
#include "mrif/son.hpp"

namespace mrif::config {

struct RateRange {
  double start = 0.05;
  double stop = 0.90;
  double step = 0.05;
};

/// "A:B:STEP" as used by --sweep-fake-rate.
RateRange parse_rate_range(const std::string& text);

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  /// Empty means <output root>/<name>.
  std::string output_dir;

  scenario::ScenarioConfig scenario;
  /// malicious_fraction comes from the scenario.
  adversary::AttackSpec attack;
  pipeline::TrainConfig train;
  son::SonParams son;
  pipeline::MrifOptions mrif;  // world is bound at run time

  std::vector<std::size_t> grid_sizes = {2500, 5000, 7500};
  std::vector<std::size_t> grid_severities = {1, 2, 3};
  std::vector<int> severity_order = {5, 3, 7};

  RateRange sweep;
  /// Outage scenario of the fake-rate sweep; the sweep replaces the scenario's
  /// own outage cells with these.
  std::vector<int> sweep_outage_cells = {5, 3};

  /// Attack staged on the healthy network in the SON lab. The main attack
  /// section is what the guard's training data contains.
  adversary::AttackSpec sonlab_attack;
  double grid_resolution_m = 10.0;

  /// Push the top-level seed into every component.
  void apply_seed(std::uint64_t seed);

  experiments::GridConfig grid_config() const;
  experiments::MrfmEvalConfig mrfm_config() const;
  experiments::SonLabConfig sonlab_config() const;
};

/// `origin` is used in diagnostics (normally the file path).
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config");
ExperimentConfig load_config(const std::string& path);

/// Fully resolved document, every default filled in. Parsing it back yields
/// the same configuration.
std::string to_json(const ExperimentConfig& config);

}  // namespace mrif::config
