#pragma once

#include <span>
#include <vector>

#include "mrif/kernels.hpp"
#include "mrif/learn.hpp"
#include "mrif/scenario.hpp"

namespace mrif::mrfm {

/// Floor on the mean reachability distance, so duplicate points get a large
/// but finite density.
inline constexpr double kReachabilityFloor = 1e-12;

/// Local Outlier Factor over a fixed reference set. Reference points are
/// scored leave-self-out; queries are scored against the whole reference set.
class LofScorer {
 public:
  LofScorer() = default;
  LofScorer(learn::Matrix reference, std::size_t k);

  std::size_t k() const { return k_; }
  const learn::Matrix& reference() const { return reference_; }
  const std::vector<double>& reference_scores() const { return reference_scores_; }

  std::vector<double> score(const learn::Matrix& queries) const;

 private:
  learn::Matrix reference_;
  std::size_t k_ = 0;
  std::vector<double> k_distance_;
  std::vector<double> lrd_;
  std::vector<double> reference_scores_;
};

/// LOF of one query against a reference set.
double lof_score(const learn::Matrix& reference, std::span<const double> query,
                 std::size_t k);

struct LofParams {
  std::size_t n_neighbors = 15;
  double contamination = 0.15;
  std::size_t pca_k = 2;
};

struct RegionalRule {
  std::size_t eta = 10;
  double region_radius_m = 100.0;
};

/// How the LOF verdict and the regional count rule combine into stage 2.
enum class Composition {
  Lof,             // LOF alone
  LofOrRegional,   // malicious if either says malicious
  LofAndRegional,  // malicious only if both say malicious
};

std::string_view to_string(Composition c);
Composition composition_from_string(std::string_view s);

struct MrfmModel {
  LofParams params;
  learn::StandardizeParams measurement_scaling;  // 14 measurement columns
  learn::PcaBasis pca;
  std::vector<double> position_mean;  // x, y
  double position_scale = 1.0;
  LofScorer lof;
  double threshold = 0.0;
  bool fitted = false;

  learn::Matrix embed(std::span<const scenario::MdtReport> reports) const;
};

/// Fit on genuine outage reports: features are the scaled position plus the
/// leading principal components of the measurements.
MrfmModel mrfm_fit(std::span<const scenario::MdtReport> real_outage_training,
                   const LofParams& params);

std::vector<double> mrfm_scores(const MrfmModel& model,
                                std::span<const scenario::MdtReport> reports);

/// RealOutage or Malicious per report.
std::vector<scenario::Label> mrfm_classify(const MrfmModel& model,
                                           std::span<const scenario::MdtReport> flagged);

/// For each flagged report, count the other flagged reports within the
/// radius; at least eta means RealOutage, fewer means Malicious.
std::vector<scenario::Label> regional_count_rule(
    std::span<const scenario::MdtReport> flagged, const RegionalRule& rule);

std::vector<scenario::Label> combine(std::span<const scenario::Label> lof,
                                     std::span<const scenario::Label> regional,
                                     Composition composition);

struct ClassErrors {
  double real_error_rate = 0.0;
  double fake_error_rate = 0.0;
  std::size_t real_count = 0;
  std::size_t fake_count = 0;
};

/// Error rates of a verdict list against ground truth (RealOutage vs
/// Malicious reports only).
ClassErrors class_errors(std::span<const scenario::MdtReport> reports,
                         std::span<const scenario::Label> verdicts);

inline constexpr const char* kSweepHeader = "fake_rate,real_error_rate,fake_error_rate";

}  // namespace mrif::mrfm
