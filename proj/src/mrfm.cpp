#include "mrif/mrfm.hpp"

#include <cmath>

namespace mrif::mrfm {

using scenario::Label;
using scenario::MdtReport;

std::string_view to_string(Composition c) {
  switch (c) {
    case Composition::Lof: return "lof";
    case Composition::LofOrRegional: return "lof_or_regional";
    case Composition::LofAndRegional: return "lof_and_regional";
  }
  return "?";
}

Composition composition_from_string(std::string_view s) {
  if (s == "lof") return Composition::Lof;
  if (s == "lof_or_regional") return Composition::LofOrRegional;
  if (s == "lof_and_regional") return Composition::LofAndRegional;
  fail(ErrorKind::Configuration, "unknown stage-2 composition '" + std::string(s) + "'");
}

namespace {

learn::Matrix measurements(std::span<const MdtReport> reports) {
  scenario::Dataset tmp;
  tmp.reports.assign(reports.begin(), reports.end());
  const learn::Matrix all = tmp.features();
  learn::Matrix out(all.rows(), scenario::kFeatureCount - 2);
  for (std::size_t r = 0; r < all.rows(); ++r)
    for (std::size_t c = 2; c < all.cols(); ++c) out(r, c - 2) = all(r, c);
  return out;
}

}  // namespace

learn::Matrix MrfmModel::embed(std::span<const MdtReport> reports) const {
  const std::size_t k = pca.k();
  learn::Matrix out(reports.size(), 2 + k);
  if (reports.empty()) return out;
  learn::Matrix proj;
  if (k > 0)
    proj = learn::pca_project(pca, learn::standardize_apply(measurements(reports),
                                                            measurement_scaling));
  for (std::size_t r = 0; r < reports.size(); ++r) {
    out(r, 0) = (reports[r].position.x - position_mean[0]) * position_scale;
    out(r, 1) = (reports[r].position.y - position_mean[1]) * position_scale;
    for (std::size_t c = 0; c < k; ++c) out(r, 2 + c) = proj(r, c);
  }
  return out;
}

MrfmModel mrfm_fit(std::span<const MdtReport> training, const LofParams& params) {
  require(params.contamination > 0.0 && params.contamination < 0.5, ErrorKind::Fit,
          "contamination must lie in (0, 0.5)");
  require(params.pca_k <= scenario::kFeatureCount - 2, ErrorKind::Fit,
          "pca_k exceeds the 14 measurement columns");
  require(training.size() >= params.n_neighbors + 1, ErrorKind::Fit,
          "MRFM needs at least n_neighbors + 1 = " +
              std::to_string(params.n_neighbors + 1) + " real-outage reports, got " +
              std::to_string(training.size()));
  MrfmModel m;
  m.params = params;

  double mx = 0.0, my = 0.0;
  for (const auto& r : training) {
    mx += r.position.x;
    my += r.position.y;
  }
  const double n = static_cast<double>(training.size());
  m.position_mean = {mx / n, my / n};
  double var = 0.0;
  for (const auto& r : training)
    var += (r.position.x - m.position_mean[0]) * (r.position.x - m.position_mean[0]) +
           (r.position.y - m.position_mean[1]) * (r.position.y - m.position_mean[1]);
  const double position_sd = std::sqrt(var / (2.0 * n));

  if (params.pca_k > 0) {
    const auto meas = learn::standardize_fit_transform(measurements(training));
    m.measurement_scaling = meas.params;
    m.pca = learn::pca_fit(meas.data, params.pca_k);
    double mean_var = 0.0;
    for (std::size_t c = 0; c < params.pca_k; ++c) mean_var += m.pca.eigenvalues[c];
    mean_var /= static_cast<double>(params.pca_k);
    // Put positions on the scale of the components.
    if (position_sd > 0.0 && mean_var > 0.0) m.position_scale = std::sqrt(mean_var) / position_sd;
  }

  m.lof = LofScorer(m.embed(training), params.n_neighbors);
  m.threshold = learn::quantile(m.lof.reference_scores(), 1.0 - params.contamination);
  m.fitted = true;
  return m;
}

std::vector<double> mrfm_scores(const MrfmModel& model, std::span<const MdtReport> reports) {
  require(model.fitted, ErrorKind::State, "MRFM model is not fitted");
  return model.lof.score(model.embed(reports));
}

std::vector<Label> mrfm_classify(const MrfmModel& model, std::span<const MdtReport> flagged) {
  const auto scores = mrfm_scores(model, flagged);
  std::vector<Label> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    out[i] = scores[i] > model.threshold ? Label::Malicious : Label::RealOutage;
  return out;
}

std::vector<Label> regional_count_rule(std::span<const MdtReport> flagged,
                                       const RegionalRule& rule) {
  require(rule.eta >= 1 && rule.region_radius_m > 0.0, ErrorKind::Configuration,
          "regional rule needs eta >= 1 and a positive radius");
  learn::Matrix pos(flagged.size(), 2);
  for (std::size_t i = 0; i < flagged.size(); ++i) {
    pos(i, 0) = flagged[i].position.x;
    pos(i, 1) = flagged[i].position.y;
  }
  const auto counts = kernels::radius_counts(pos, rule.region_radius_m);
  std::vector<Label> out(flagged.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    out[i] = counts[i] >= rule.eta ? Label::RealOutage : Label::Malicious;
  return out;
}

std::vector<Label> combine(std::span<const Label> lof, std::span<const Label> regional,
                           Composition composition) {
  require(lof.size() == regional.size(), ErrorKind::InvalidInput,
          "verdict lists differ in length");
  std::vector<Label> out(lof.size());
  for (std::size_t i = 0; i < lof.size(); ++i) {
    const bool a = lof[i] == Label::Malicious;
    const bool b = regional[i] == Label::Malicious;
    bool mal = a;
    if (composition == Composition::LofOrRegional) mal = a || b;
    if (composition == Composition::LofAndRegional) mal = a && b;
    out[i] = mal ? Label::Malicious : Label::RealOutage;
  }
  return out;
}

ClassErrors class_errors(std::span<const MdtReport> reports, std::span<const Label> verdicts) {
  require(reports.size() == verdicts.size(), ErrorKind::InvalidInput,
          "reports and verdicts differ in length");
  ClassErrors e;
  std::size_t real_wrong = 0, fake_wrong = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].label == Label::RealOutage) {
      ++e.real_count;
      if (verdicts[i] != Label::RealOutage) ++real_wrong;
    } else if (reports[i].label == Label::Malicious) {
      ++e.fake_count;
      if (verdicts[i] != Label::Malicious) ++fake_wrong;
    }
  }
  if (e.real_count) e.real_error_rate = static_cast<double>(real_wrong) / static_cast<double>(e.real_count);
  if (e.fake_count) e.fake_error_rate = static_cast<double>(fake_wrong) / static_cast<double>(e.fake_count);
  return e;
}

}  // namespace mrif::mrfm
