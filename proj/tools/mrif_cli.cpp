// mrif: command-line front end for scenario generation, model training,
// evaluation sweeps and the SON coverage lab.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
// 3 compatibility error (bundle/schema/digest mismatch).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "mrif/config.hpp"
#include "mrif/experiments.hpp"
#include "mrif/pipeline.hpp"

namespace fs = std::filesystem;
using namespace mrif;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCompatibility = 3;

constexpr const char* kOutRootEnv = "MRIF_OUT_ROOT";

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

config::ExperimentConfig load(const Common& c) {
  auto cfg = config::load_config(c.config_path);
  if (c.seed) cfg.apply_seed(*c.seed);
  return cfg;
}

fs::path output_dir(const Common& c, const config::ExperimentConfig& cfg) {
  fs::path dir;
  if (!c.out.empty()) {
    dir = c.out;
  } else if (!cfg.output_dir.empty()) {
    dir = cfg.output_dir;
  } else {
    const char* root = std::getenv(kOutRootEnv);
    dir = fs::path(root && *root ? root : "out") / cfg.name;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::InvalidInput, "cannot create output directory " + dir.string());
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  require(out.good(), ErrorKind::InvalidInput, "cannot write " + p.string());
  return out;
}

void write_resolved(const fs::path& dir, const config::ExperimentConfig& cfg) {
  open_out(dir / "resolved_config.json") << config::to_json(cfg);
}

int cmd_generate(const Common& c) {
  const auto cfg = load(c);
  const auto dir = output_dir(c, cfg);
  write_resolved(dir, cfg);
  const auto world = scenario::make_world(cfg.scenario);
  auto ds = scenario::generate_reports(world);
  if (cfg.scenario.malicious_fraction > 0.0)
    ds = adversary::inject_malicious(ds, cfg.attack, adversary::OutageValueModel::fit(ds));
  scenario::write_dataset(ds, (dir / "dataset.csv").string());
  std::printf("wrote %zu reports (%zu normal, %zu real outage, %zu malicious) to %s\n",
              ds.size(), ds.count(scenario::Label::Normal),
              ds.count(scenario::Label::RealOutage), ds.count(scenario::Label::Malicious),
              (dir / "dataset.csv").string().c_str());
  return kExitOk;
}

int cmd_train(const Common& c, const std::string& dataset_path) {
  const auto cfg = load(c);
  const auto dir = output_dir(c, cfg);
  write_resolved(dir, cfg);
  const auto ds = scenario::read_dataset(dataset_path);
  const auto outcome = pipeline::train_models(ds, cfg.train);
  pipeline::save_bundle(outcome.bundle, (dir / "model_bundle.json").string());

  const auto& r = outcome.report;
  nlohmann::json rep = {
      {"train_rows", r.split.train.size()},
      {"test_rows", r.split.test.size()},
      {"outage_ratio", r.outage_ratio},
      {"autoencoder", {{"initial_loss", r.ae_initial_loss}, {"final_loss", r.ae_final_loss},
                       {"threshold", r.threshold}}},
      {"gbt", r.gbt_error.empty()
                  ? nlohmann::json{{"final_loss", r.gbt_final_loss.value_or(0.0)}}
                  : nlohmann::json{{"error", r.gbt_error}}},
      {"mrfm", r.mrfm_error.empty()
                   ? nlohmann::json{{"reference_reports", r.mrfm_reference},
                                    {"threshold", r.mrfm_threshold}}
                   : nlohmann::json{{"error", r.mrfm_error}}},
      {"bundle_digest", outcome.bundle.digest()}};
  open_out(dir / "training_report.json") << rep.dump(2) << '\n';
  std::printf("bundle %s written to %s\n", outcome.bundle.digest().c_str(),
              (dir / "model_bundle.json").string().c_str());
  if (!r.gbt_error.empty() || !r.mrfm_error.empty()) {
    // The autoencoder bundle is usable; the partial result is signalled.
    if (!r.gbt_error.empty()) std::fprintf(stderr, "gbt not trained: %s\n", r.gbt_error.c_str());
    if (!r.mrfm_error.empty())
      std::fprintf(stderr, "mrfm not trained: %s\n", r.mrfm_error.c_str());
    return kExitRuntime;
  }
  return kExitOk;
}

void write_metrics(std::ostream& out, const pipeline::MetricsSummary& m) {
  char buf[128];
  auto row = [&](const char* k, double v) {
    std::snprintf(buf, sizeof buf, "%s,%.6f\n", k, v);
    out << buf;
  };
  auto count = [&](const char* k, std::size_t v) { out << k << ',' << v << '\n'; };
  out << "metric,value\n";
  row("stage1_precision", m.stage1.precision);
  row("stage1_recall", m.stage1.recall);
  row("stage1_f1", m.stage1.f1);
  count("malicious_total", m.malicious_total);
  count("detected_malicious", m.detected_malicious);
  count("missed_malicious", m.missed_malicious);
  count("false_malicious", m.false_malicious);
  row("malicious_recall", m.malicious_recall());
  count("real_total", m.real_total);
  count("real_misflagged", m.real_misflagged);
  count("real_confirmed", m.real_confirmed);
  row("real_misflag_rate", m.real_misflag_rate());
  count("malicious_ues", m.malicious_ues);
  count("detected_malicious_ues", m.detected_malicious_ues);
  count("false_malicious_ues", m.false_malicious_ues);
  count("fdt_visits", m.visits.size());
  count("fdt_visits_malicious_only", m.visits_malicious_only);
  count("fdt_visits_malicious_only_correct", m.visits_malicious_only_correct);
}

struct EvalFlags {
  std::string dataset;
  std::string bundle;
  bool grid = false;
  std::string sweep;
  bool use_fdt = false;
};

int cmd_evaluate(const Common& c, const EvalFlags& f) {
  auto cfg = load(c);
  if (!f.sweep.empty()) cfg.sweep = config::parse_rate_range(f.sweep);
  if (f.use_fdt) cfg.mrif.use_fdt = true;
  const auto dir = output_dir(c, cfg);
  write_resolved(dir, cfg);

  bool ran = false;
  if (f.grid) {
    const auto rows = experiments::adm_evaluate_grid(cfg.grid_config());
    auto out = open_out(dir / "adm_grid.csv");
    experiments::write_grid_csv(out, rows);
    std::printf("wrote %zu grid rows to %s\n", rows.size(), (dir / "adm_grid.csv").string().c_str());
    ran = true;
  }
  if (!f.sweep.empty()) {
    const auto rates = experiments::rate_range(cfg.sweep.start, cfg.sweep.stop, cfg.sweep.step);
    const auto rows = experiments::mrfm_sweep(cfg.mrfm_config(), rates);
    auto out = open_out(dir / "mrfm_sweep.csv");
    experiments::write_sweep_csv(out, rows);
    std::printf("wrote %zu sweep rows to %s\n", rows.size(),
                (dir / "mrfm_sweep.csv").string().c_str());
    ran = true;
  }
  if (!f.dataset.empty() || !f.bundle.empty()) {
    require(!f.dataset.empty() && !f.bundle.empty(), ErrorKind::Configuration,
            "evaluate needs both --dataset and --bundle");
    const auto ds = scenario::read_dataset(f.dataset);
    const auto bundle = pipeline::load_bundle(f.bundle);
    std::optional<scenario::World> world;
    pipeline::MrifOptions opts = cfg.mrif;
    if (opts.use_fdt) {
      require(ds.config_digest.empty() || ds.config_digest == cfg.scenario.digest(),
              ErrorKind::Compatibility,
              "dataset was generated from a different scenario than the config describes; "
              "FDT verification needs the matching ground truth");
      world = scenario::make_world(cfg.scenario);
      opts.world = &*world;
    }
    const auto res = pipeline::run_mrif(ds, bundle, opts);
    {
      auto out = open_out(dir / "verdicts.csv");
      pipeline::write_verdicts(out, res.verdicts);
    }
    {
      auto out = open_out(dir / "metrics.csv");
      write_metrics(out, res.metrics);
    }
    if (opts.use_fdt) {
      auto out = open_out(dir / "verification.csv");
      out << fdt::kVerificationHeader << '\n';
      for (const auto& v : res.metrics.visits) fdt::write_verification_row(out, v);
    }
    std::printf("malicious recall %.4f, real misflag rate %.4f, %zu FDT visits\n",
                res.metrics.malicious_recall(), res.metrics.real_misflag_rate(),
                res.metrics.visits.size());
    ran = true;
  }
  require(ran, ErrorKind::Configuration,
          "nothing to evaluate: give --grid, --sweep-fake-rate, or --dataset with --bundle");
  return kExitOk;
}

int cmd_sonlab(const Common& c, const std::string& guard, bool use_fdt) {
  auto cfg = load(c);
  if (use_fdt) cfg.mrif.use_fdt = true;
  auto lab = cfg.sonlab_config();
  lab.guard = pipeline::guard_from_string(guard);
  const auto dir = output_dir(c, cfg);
  write_resolved(dir, cfg);
  const auto res = experiments::run_sonlab(lab);
  fs::create_directories(dir / "coverage");
  for (const auto& v : res.variants)
    radio::write_coverage_csv(v.grid, (dir / "coverage" / (v.name + ".csv")).string());
  {
    auto out = open_out(dir / "kpis.csv");
    experiments::write_sonlab_kpis(out, lab, res);
  }
  {
    auto out = open_out(dir / "summary.csv");
    experiments::write_sonlab_summary(out, lab, res);
  }
  std::printf("wrote %zu coverage grids, kpis.csv and summary.csv to %s\n", res.variants.size(),
              dir.string().c_str());
  return kExitOk;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Configuration: return kExitConfig;
    case ErrorKind::Compatibility:
    case ErrorKind::Integrity: return kExitCompatibility;
    default: return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial MDT lab: scenarios, detectors and SON experiments"};
  app.require_subcommand(1);
  app.footer(std::string("Outputs go to --out, else the config's output_dir, else $") +
             kOutRootEnv + "/<name> (default root: ./out).\n"
             "Exit codes: 0 ok, 1 runtime failure, 2 configuration error, 3 compatibility error.");

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Experiment config (JSON)")->required();
    sub->add_option("--seed", common.seed, "Override the config seed");
    sub->add_option("--out", common.out, "Output directory");
  };

  auto* gen = app.add_subcommand("generate", "Simulate MDT reports and write dataset.csv");
  add_common(gen);

  std::string train_dataset;
  auto* train = app.add_subcommand("train", "Train detectors and write model_bundle.json");
  add_common(train);
  train->add_option("--dataset", train_dataset, "Dataset CSV from generate")->required();

  EvalFlags ef;
  auto* eval = app.add_subcommand("evaluate", "Run MRIF on a dataset, the F1 grid, or the fake-rate sweep");
  add_common(eval);
  eval->add_option("--dataset", ef.dataset, "Dataset CSV");
  eval->add_option("--bundle", ef.bundle, "Model bundle JSON");
  eval->add_flag("--grid", ef.grid, "Run the size x severity F1 grid (adm_grid.csv)");
  eval->add_option("--sweep-fake-rate", ef.sweep,
                   "Fake-outage rate sweep A:B:STEP, e.g. 0.05:0.90:0.05 (mrfm_sweep.csv)");
  eval->add_flag("--use-fdt", ef.use_fdt, "Verify sparse outage claims with drones");

  std::string guard = "mrif";
  bool sonlab_fdt = false;
  auto* son = app.add_subcommand("sonlab", "Coverage maps and KPIs for real vs forged outages");
  add_common(son);
  son->add_option("--guard", guard, "Filter in front of the SON engine")
      ->check(CLI::IsMember({"none", "mrif"}));
  son->add_flag("--use-fdt", sonlab_fdt, "Enable drone verification inside the guard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(common);
    if (*train) return cmd_train(common, train_dataset);
    if (*eval) return cmd_evaluate(common, ef);
    if (*son) return cmd_sonlab(common, guard, sonlab_fdt);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.kind())).c_str(), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
