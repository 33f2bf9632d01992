#include "mrif/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrif/rng.hpp"

namespace mrif::adversary {

using scenario::Dataset;
using scenario::kNeighborSlots;
using scenario::Label;
using scenario::MdtReport;

radio::NetworkLayout apply_outage(const radio::NetworkLayout& layout,
                                  std::span<const int> cells) {
  radio::NetworkLayout out = layout;
  for (int id : cells) out.sites[layout.index_of(id)].active = false;
  return out;
}

std::string_view to_string(Strategy s) {
  return s == Strategy::ForgeLowRsrp ? "forge_low_rsrp" : "mimic_outage_distribution";
}

void AttackSpec::validate() const {
  require(malicious_fraction >= 0.0 && malicious_fraction <= 0.95,
          ErrorKind::Configuration, "malicious_fraction must lie in [0, 0.95]");
  require(forge_low_dbm <= forge_high_dbm, ErrorKind::Configuration,
          "forge band is empty");
  if (target_region)
    require(target_region->radius_m > 0.0, ErrorKind::Configuration,
            "target region radius must be > 0");
}

OutageValueModel OutageValueModel::fit(const Dataset& dataset) {
  OutageValueModel m;
  for (const MdtReport& r : dataset.reports) {
    if (r.label != Label::RealOutage) continue;
    m.samples_[0].push_back(r.serving_rsrp_dbm);
    m.samples_[1].push_back(r.serving_rsrq_db);
    for (std::size_t k = 0; k < kNeighborSlots; ++k) {
      m.samples_[2 + k].push_back(r.neighbor_rsrp_dbm[k]);
      m.samples_[2 + kNeighborSlots + k].push_back(r.neighbor_rsrq_db[k]);
    }
  }
  return m;
}

std::size_t malicious_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

namespace {

void forge_low(MdtReport& r, const AttackSpec& spec, Rng& rng) {
  std::size_t filled = 0;
  while (filled < kNeighborSlots && r.neighbor_rsrp_dbm[filled] > scenario::kSentinelRsrpDbm)
    ++filled;
  const double serving = rng.uniform(spec.forge_low_dbm, spec.forge_high_dbm);
  std::array<double, kNeighborSlots> nb{};
  for (std::size_t k = 0; k < filled; ++k) nb[k] = serving + rng.uniform(-20.0, 3.0);
  std::sort(nb.begin(), nb.begin() + static_cast<std::ptrdiff_t>(filled), std::greater<>());

  // RSRQ consistent with the forged powers.
  const double noise_re = db_to_linear(spec.noise_dbm_per_rb - linear_to_db(12.0));
  double total = db_to_linear(serving) + noise_re;
  for (std::size_t k = 0; k < filled; ++k) total += db_to_linear(nb[k]);
  auto rsrq = [&](double p) { return linear_to_db(db_to_linear(p) / (12.0 * total)); };

  r.serving_rsrp_dbm = scenario::quantize(serving);
  r.serving_rsrq_db = scenario::quantize(rsrq(serving));
  for (std::size_t k = 0; k < kNeighborSlots; ++k) {
    if (k < filled) {
      r.neighbor_rsrp_dbm[k] = scenario::quantize(nb[k]);
      r.neighbor_rsrq_db[k] = scenario::quantize(rsrq(nb[k]));
    } else {
      r.neighbor_rsrp_dbm[k] = scenario::kSentinelRsrpDbm;
      r.neighbor_rsrq_db[k] = scenario::kSentinelRsrqDb;
    }
  }
}

void mimic(MdtReport& r, const OutageValueModel& model, Rng& rng) {
  const std::size_t n = model.size();
  // Serving pair from one genuine report keeps the serving marginals exact.
  const std::size_t s = static_cast<std::size_t>(rng.below(n));
  r.serving_rsrp_dbm = model.field(0)[s];
  r.serving_rsrq_db = model.field(1)[s];
  // Each neighbour slot keeps its rsrp/rsrq pair together; slots never
  // exceed the serving level, as in any genuine report.
  std::array<std::pair<double, double>, kNeighborSlots> slots;
  for (std::size_t k = 0; k < kNeighborSlots; ++k) {
    const auto& rsrp = model.field(2 + k);
    const auto& rsrq = model.field(2 + kNeighborSlots + k);
    std::size_t pick = static_cast<std::size_t>(rng.below(n));
    for (int attempt = 0; attempt < 64 && rsrp[pick] > r.serving_rsrp_dbm; ++attempt)
      pick = static_cast<std::size_t>(rng.below(n));
    if (rsrp[pick] > r.serving_rsrp_dbm)
      slots[k] = {r.serving_rsrp_dbm, r.serving_rsrq_db};
    else
      slots[k] = {rsrp[pick], rsrq[pick]};
  }
  std::stable_sort(slots.begin(), slots.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; k < kNeighborSlots; ++k) {
    r.neighbor_rsrp_dbm[k] = slots[k].first;
    r.neighbor_rsrq_db[k] = slots[k].second;
  }
}

}  // namespace

void forge_reports(Dataset& dataset, std::span<const std::size_t> indices,
                   const AttackSpec& spec, const OutageValueModel& model,
                   std::uint64_t stream) {
  if (spec.strategy == Strategy::MimicOutage)
    require(model.size() >= OutageValueModel::kMinReports, ErrorKind::Injection,
            "mimic strategy needs at least 10 real-outage reports, have " +
                std::to_string(model.size()));
  Rng rng = Rng::derive(spec.seed, "forge", stream);
  for (std::size_t i : indices) {
    MdtReport& r = dataset.reports[i];
    if (spec.strategy == Strategy::ForgeLowRsrp)
      forge_low(r, spec, rng);
    else
      mimic(r, model, rng);
    r.label = Label::Malicious;
  }
}

std::vector<std::size_t> attack_candidates(const Dataset& dataset,
                                           const AttackSpec& spec) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dataset.reports.size(); ++i) {
    const MdtReport& r = dataset.reports[i];
    if (r.label != Label::Normal || !(r.serving_rsrp_dbm > spec.coverage_floor_dbm))
      continue;
    if (spec.target_region &&
        distance(r.position, spec.target_region->center) > spec.target_region->radius_m)
      continue;
    out.push_back(i);
  }
  return out;
}

Dataset inject_count(const Dataset& dataset, const AttackSpec& spec,
                     const OutageValueModel& model, std::size_t count) {
  spec.validate();
  Dataset out = dataset;
  if (count == 0) return out;
  auto candidates = attack_candidates(dataset, spec);
  require(candidates.size() >= count, ErrorKind::Injection,
          "need " + std::to_string(count) + " eligible normal reports, have " +
              std::to_string(candidates.size()));
  Rng rng = Rng::derive(spec.seed, "attack", count);
  rng.shuffle(std::span<std::size_t>(candidates));
  candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());
  forge_reports(out, candidates, spec, model, count);
  return out;
}

Dataset inject_malicious(const Dataset& dataset, const AttackSpec& spec,
                         const OutageValueModel& model) {
  return inject_count(dataset, spec, model,
                      malicious_count(spec.malicious_fraction, dataset.size()));
}

std::vector<Dataset> sweep_malicious_rate(const Dataset& dataset,
                                          std::span<const double> rates,
                                          const AttackSpec& spec,
                                          const OutageValueModel& model) {
  std::vector<Dataset> out;
  for (double rate : rates)
    require(rate >= 0.05 - 1e-12 && rate <= 0.90 + 1e-12, ErrorKind::Configuration,
            "sweep rates must lie in [0.05, 0.90]");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    AttackSpec s = spec;
    s.malicious_fraction = rates[i];
    s.seed = Rng::derive(spec.seed, "sweep", i).next_u64();
    out.push_back(inject_malicious(dataset, s, model));
  }
  return out;
}

}  // namespace mrif::adversary
