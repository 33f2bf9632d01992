// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance used below is a named constant.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "../support/oracles.hpp"
#include "mrif/config.hpp"
#include "mrif/experiments.hpp"
#include "mrif/fdt.hpp"
#include "mrif/mrfm.hpp"
#include "mrif/radio.hpp"

using namespace mrif;
namespace fs = std::filesystem;

namespace {

// ADM band and trends.
constexpr double kMinF1 = 0.90;
constexpr double kInversionSlack = 0.01;
constexpr std::size_t kMaxInversions = 1;
constexpr double kSizeSlack = 0.01;
// MRFM anchor and sweep.
constexpr double kMinClassAccuracy = 0.80;
constexpr double kAnchorFakeRate = 0.15;
constexpr double kMaxRealErrorSpread = 0.10;
constexpr double kMaxFakeError = 0.25;
constexpr double kFakeErrorRateLimit = 0.5;
// Property suites.
constexpr double kGradientRelTol = 1e-4;
constexpr double kFiniteDiffStep = 1e-5;
constexpr double kLofTol = 1e-9;
constexpr double kPcaTol = 1e-6;
constexpr std::size_t kShadowDraws = 5000;
constexpr double kShadowSe = 3.0;
constexpr double kKCenterFactor = 2.0;
// End to end.
constexpr double kMinMaliciousRecall = 0.90;
constexpr double kMaxRealMisflag = 0.10;
constexpr int kSeeds = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

config::ExperimentConfig preset(const std::string& name) {
  return config::load_config((fs::path(MRIF_PRESET_DIR) / (name + ".json")).string());
}

// ---------------------------------------------------------------------------

std::vector<adm::GridRow> g_grid;

const std::vector<adm::GridRow>& grid() {
  if (g_grid.empty()) g_grid = experiments::adm_evaluate_grid(preset("fig5c-grid").grid_config());
  return g_grid;
}

Outcome adm_band() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& rows = grid();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t below = 0;
  std::map<std::string, double> worst;
  for (const auto& r : rows) {
    below += r.f1 < kMinF1;
    auto it = worst.find(r.method);
    if (it == worst.end() || r.f1 < it->second) worst[r.method] = r.f1;
  }
  std::string d = fmt("%zu of %zu cells below %.2f;", below, rows.size(), kMinF1);
  for (const auto& [m, v] : worst) d += fmt(" min %s %.3f", m.c_str(), v);
  d += fmt("; %.0f s", secs);
  return {below == 0 && rows.size() == 18, d};
}

Outcome adm_trends() {
  const auto& rows = grid();
  // f1[method][size][severity]
  std::map<std::string, std::map<std::size_t, std::map<std::size_t, double>>> f1;
  for (const auto& r : rows) f1[r.method][r.size][r.severity] = r.f1;
  bool ok = true;
  std::string d;
  for (const auto& [method, by_size] : f1) {
    std::size_t inversions = 0;
    double largest = 0.0;
    for (const auto& [size, by_sev] : by_size) {
      double prev = NAN;
      for (const auto& [sev, v] : by_sev) {
        if (!std::isnan(prev) && v > prev) {
          ++inversions;
          largest = std::max(largest, v - prev);
        }
        prev = v;
      }
    }
    const bool sev_ok = inversions <= kMaxInversions && largest <= kInversionSlack;
    std::size_t size_fail = 0;
    const auto& small = by_size.begin()->second;
    const auto& large = by_size.rbegin()->second;
    for (const auto& [sev, v] : small)
      size_fail += large.at(sev) < v - kSizeSlack;
    ok = ok && sev_ok && size_fail == 0;
    d += fmt("%s: %zu severity inversions (max %.3f), %zu size drops; ", method.c_str(),
             inversions, largest, size_fail);
  }
  return {ok, d};
}

Outcome mrfm_anchor() {
  auto cfg = preset("fig5e-sweep");
  double real = 0, fake = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    cfg.apply_seed(s);
    const auto e = experiments::mrfm_evaluate(cfg.mrfm_config(), kAnchorFakeRate);
    real += 1.0 - e.real_error_rate;
    fake += 1.0 - e.fake_error_rate;
  }
  real /= kSeeds;
  fake /= kSeeds;
  return {real >= kMinClassAccuracy && fake >= kMinClassAccuracy,
          fmt("real accuracy %.3f, fake accuracy %.3f (fake rate %.2f, %d seeds)", real, fake,
              kAnchorFakeRate, kSeeds)};
}

Outcome mrfm_sweep() {
  const auto cfg = preset("fig5e-sweep");
  const auto rates = experiments::rate_range(cfg.sweep.start, cfg.sweep.stop, cfg.sweep.step);
  const auto rows = experiments::mrfm_sweep(cfg.mrfm_config(), rates);
  double lo = 1, hi = 0, worst_fake = 0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.real_error_rate);
    hi = std::max(hi, r.real_error_rate);
    if (r.fake_rate <= kFakeErrorRateLimit + 1e-9)
      worst_fake = std::max(worst_fake, r.fake_error_rate);
  }
  return {rows.size() == 18 && hi - lo <= kMaxRealErrorSpread && worst_fake <= kMaxFakeError,
          fmt("%zu rates, real error %.3f..%.3f, worst fake error at rate <= %.1f: %.3f",
              rows.size(), lo, hi, kFakeErrorRateLimit, worst_fake)};
}

Outcome coc_reproduction() {
  const auto cfg = preset("fig2-coc");
  const auto r = experiments::run_sonlab(cfg.sonlab_config());
  auto kpi = [&](const std::string& name) {
    for (const auto& v : r.variants)
      if (v.name == name) return v.kpi;
    throw Error(ErrorKind::State, "missing variant " + name);
  };
  const bool a = r.outage_region_coc.p05_sinr_db > r.outage_region_no_coc.p05_sinr_db;
  const bool b = kpi("fake_coc").mean_sinr_db < kpi("baseline").mean_sinr_db;
  const bool c = kpi("guarded") == kpi("baseline") && r.guarded_actions.empty();
  return {a && b && c,
          fmt("(a) outage p05 %.2f -> %.2f %s; (b) mean %.2f -> %.2f %s; (c) guarded %s",
              r.outage_region_no_coc.p05_sinr_db, r.outage_region_coc.p05_sinr_db,
              a ? "ok" : "no", kpi("baseline").mean_sinr_db, kpi("fake_coc").mean_sinr_db,
              b ? "ok" : "no", c ? "identical" : "differs")};
}

Outcome property_suites() {
  std::string d;
  bool ok = true;

  double grad = 0;
  {
    adm::AeConfig cfg;
    cfg.hidden = {2};
    adm::Autoencoder small(4, cfg);
    grad = oracle::ae_gradient_error(small, oracle::gaussian_rows(10, 4, 1), kFiniteDiffStep);
    cfg.hidden = {8, 4, 8};
    adm::Autoencoder full(16, cfg);
    grad = std::max(grad, oracle::ae_gradient_error(full, oracle::gaussian_rows(10, 16, 2),
                                                    kFiniteDiffStep));
  }
  ok = ok && grad < kGradientRelTol;
  d += fmt("grad rel %.1e; ", grad);

  double lof = 0;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const auto ref = oracle::gaussian_rows(200, 4, s);
    const auto q = oracle::gaussian_rows(30, 4, s + 10);
    const auto got = mrfm::LofScorer(ref, 15).score(q);
    const auto want = oracle::lof(ref, q, 15);
    for (std::size_t i = 0; i < got.size(); ++i) lof = std::max(lof, std::abs(got[i] - want[i]));
  }
  ok = ok && lof < kLofTol;
  d += fmt("lof %.1e; ", lof);

  double pca = 0;
  {
    auto m = oracle::gaussian_rows(400, 14, 5);
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, 3) += 3 * m(r, 0);
    const auto basis = learn::pca_fit(m, 2);
    const auto want = oracle::covariance_eigenvalues(m);
    for (std::size_t i = 0; i < want.size(); ++i)
      pca = std::max(pca, std::abs(basis.eigenvalues[i] - want[i]));
  }
  ok = ok && pca < kPcaTol;
  d += fmt("pca %.1e; ", pca);

  std::size_t cov_fail = 0;
  double worst_z = 0;
  {
    radio::ShadowingParams p;
    const std::vector<Point> pts = {{0, 0}, {20, 0}, {60, 0}, {0, 150}, {500, 500}};
    const std::size_t n = pts.size();
    std::vector<double> sum(n * n), sq(n * n);
    for (std::size_t s = 0; s < kShadowDraws; ++s) {
      const auto f = radio::sample_shadowing_field(pts, p, 77000 + s);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          sum[i * n + j] += f[i] * f[j];
          sq[i * n + j] += f[i] * f[i] * f[j] * f[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const double mean = sum[i * n + j] / kShadowDraws;
        const double se = std::sqrt((sq[i * n + j] / kShadowDraws - mean * mean) / kShadowDraws);
        const double want = p.sigma_db * p.sigma_db *
                            std::exp(-distance(pts[i], pts[j]) / p.decorrelation_m);
        const double z = std::abs(mean - want) / se;
        worst_z = std::max(worst_z, z);
        cov_fail += z > kShadowSe;
      }
  }
  ok = ok && cov_fail == 0;
  d += fmt("shadow cov max %.2f SE; ", worst_z);

  double ratio = 0;
  {
    const radio::Area area;
    const auto pts = fdt::objective_points(area);
    for (std::uint64_t s = 1; s <= 20; ++s) {
      Rng rng(s);
      std::vector<Point> cand(8);
      for (auto& c : cand) c = {rng.uniform(0, 1000), rng.uniform(0, 1000)};
      for (std::size_t k = 1; k <= cand.size(); ++k) {
        const double got = fdt::coverage_radius(fdt::place_fdts(cand, k, area).homes, pts);
        ratio = std::max(ratio, got / oracle::exhaustive_k_center(cand, k, pts));
      }
    }
  }
  ok = ok && ratio <= kKCenterFactor;
  d += fmt("k-center ratio %.3f", ratio);
  return {ok, d};
}

Outcome end_to_end() {
  auto cfg = preset("paper-baseline");
  double recall = 0, misflag = 0, fdt_recall = 0;
  std::size_t visits = 0, mal_only = 0, mal_only_ok = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    cfg.apply_seed(s);
    const auto world = scenario::make_world(cfg.scenario);
    const auto clean = scenario::generate_reports(world);
    adversary::AttackSpec attack = cfg.attack;
    attack.malicious_fraction = cfg.scenario.malicious_fraction;
    const auto data =
        adversary::inject_malicious(clean, attack, adversary::OutageValueModel::fit(clean));
    const auto models = pipeline::train_models(data, cfg.train).bundle;
    auto opts = cfg.mrif;
    opts.world = &world;
    const auto plain = pipeline::run_mrif(data, models, opts);
    recall += plain.metrics.malicious_recall();
    misflag += plain.metrics.real_misflag_rate();
    opts.use_fdt = true;
    const auto with = pipeline::run_mrif(data, models, opts);
    fdt_recall += with.metrics.malicious_recall();
    visits += with.metrics.visits.size();
    mal_only += with.metrics.visits_malicious_only;
    mal_only_ok += with.metrics.visits_malicious_only_correct;
  }
  recall /= kSeeds;
  misflag /= kSeeds;
  fdt_recall /= kSeeds;
  const bool target = recall >= kMinMaliciousRecall && misflag <= kMaxRealMisflag;
  const bool fdt_ok = mal_only > 0 && mal_only_ok == mal_only;
  return {target && fdt_ok,
          fmt("recall %.3f, real misflag %.3f; with drones recall %.3f, %zu visits, "
              "%zu/%zu malicious-only cells corrected",
              recall, misflag, fdt_recall, visits, mal_only_ok, mal_only)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv")
      out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

bool run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MRIF_CLI + "\" " + args + " > /dev/null";
  return std::system(cmd.c_str()) == 0;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "mrif_acceptance_determinism";
  fs::remove_all(root);
  auto cfg = [](const char* name) {
    return std::string("--config \"") + MRIF_PRESET_DIR + "/" + name + ".json\"";
  };
  // Each preset is driven through the CLI exactly as documented.
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"paper-baseline",
       {"generate " + cfg("paper-baseline") + " --out {}",
        "train " + cfg("paper-baseline") + " --dataset {}/dataset.csv --out {}",
        "evaluate " + cfg("paper-baseline") +
            " --dataset {}/dataset.csv --bundle {}/model_bundle.json --use-fdt --out {}"}},
      {"fig2-coc", {"sonlab " + cfg("fig2-coc") + " --guard mrif --out {}"}},
      {"fig5c-grid", {"evaluate " + cfg("fig5c-grid") + " --grid --out {}"}},
      {"fig5e-sweep",
       {"evaluate " + cfg("fig5e-sweep") + " --sweep-fake-rate 0.05:0.90:0.05 --out {}"}},
  };
  std::size_t files = 0;
  std::string bad;
  for (const auto& [name, cmds] : runs) {
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / name / std::to_string(rep);
      fs::create_directories(dir);
      for (std::string c : cmds) {
        for (auto pos = c.find("{}"); pos != std::string::npos; pos = c.find("{}"))
          c.replace(pos, 2, "\"" + dir.string() + "\"");
        if (!run_cli(c)) return {false, "command failed: " + c};
      }
      const auto got = csv_files(dir);
      if (rep == 0) {
        first = got;
        files += got.size();
        if (got.empty()) bad += name + " wrote no CSV; ";
      } else if (got != first) {
        bad += name + " differs; ";
      }
    }
  }
  fs::remove_all(root);
  return {bad.empty(), bad.empty() ? fmt("%zu CSV files byte-identical across reruns", files) : bad};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 ADM F1 band", adm_band},
      {"2 ADM F1 trends", adm_trends},
      {"3 MRFM class accuracy", mrfm_anchor},
      {"4 MRFM fake-rate sweep", mrfm_sweep},
      {"5 COC coverage directions", coc_reproduction},
      {"6 numeric property suites", property_suites},
      {"7 end-to-end MRIF", end_to_end},
      {"8 preset determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %-28s %s  %s\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
