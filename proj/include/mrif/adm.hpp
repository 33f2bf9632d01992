#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrif/common.hpp"
#include "mrif/learn.hpp"

namespace mrif::adm {

// ---------------------------------------------------------------------------
// Autoencoder
// ---------------------------------------------------------------------------

struct AeConfig {
  std::vector<std::size_t> hidden = {8, 4, 8};
  std::size_t epochs = 60;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  /// Reshuffle rows every epoch. Off means batches follow row order.
  bool shuffle = true;
};

/// Dense layer y = W x + b with W stored out x in.
struct DenseLayer {
  learn::Matrix weight;
  std::vector<double> bias;
};

/// Fully connected autoencoder, tanh on hidden layers and identity output.
class Autoencoder {
 public:
  Autoencoder() = default;
  /// Xavier-uniform weights and zero biases drawn from the config seed.
  Autoencoder(std::size_t n_inputs, const AeConfig& config);

  std::size_t inputs() const { return layers_.empty() ? 0 : layers_.front().weight.cols(); }
  const AeConfig& config() const { return config_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  std::vector<double> reconstruct(std::span<const double> row) const;
  /// Mean over rows of the per-row mean squared reconstruction error.
  double loss(const learn::Matrix& rows) const;
  /// Gradient of loss() over the given rows, flattened like parameters().
  std::vector<double> gradient(const learn::Matrix& rows) const;

  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

  std::optional<double> threshold;
  std::vector<double> epoch_loss;  // mean training loss per epoch, index 0 = init

 private:
  AeConfig config_;
  std::vector<DenseLayer> layers_;
};

/// Mini-batch Adam on mean squared reconstruction error.
Autoencoder ae_train(const learn::Matrix& normal_rows, const AeConfig& config);

std::vector<double> ae_reconstruction_error(const Autoencoder& model,
                                            const learn::Matrix& rows);

/// (1 - outage_ratio) quantile of the errors, linearly interpolated.
double ae_calibrate_threshold(std::span<const double> errors, double outage_ratio);

/// 1 = anomalous (error strictly above the threshold), 0 = normal.
std::vector<int> ae_classify(const Autoencoder& model, const learn::Matrix& rows);

// ---------------------------------------------------------------------------
// Gradient-boosted trees
// ---------------------------------------------------------------------------

struct GbtConfig {
  std::size_t rounds = 100;
  std::size_t max_depth = 6;
  double learning_rate = 0.3;
  std::size_t bins = 32;
  double l2 = 1.0;
  double min_child_hessian = 1e-3;
  /// Fit on standardized features. Trees are invariant to per-column affine
  /// maps up to bin placement, so this mostly matters for reproducing
  /// externally trained models.
  bool standardize = false;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x <= threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> row) const;
};

struct GbtModel {
  GbtConfig config;
  double base_score = 0.0;  // log-odds of the training prior
  std::vector<RegressionTree> trees;
  std::optional<learn::StandardizeParams> scaling;
  std::vector<double> train_loss;  // log-loss after 0..rounds trees

  double margin(std::span<const double> row) const;
};

/// labels: 1 positive, 0 negative.
GbtModel gbt_train(const learn::Matrix& rows, std::span<const int> labels,
                   const GbtConfig& config);
std::vector<double> gbt_predict(const GbtModel& model, const learn::Matrix& rows);

double log_loss(std::span<const double> probabilities, std::span<const int> labels);

// ---------------------------------------------------------------------------
// Detector and evaluation grid
// ---------------------------------------------------------------------------

/// Stage-1 detector: standardization fit on normal training rows, the
/// autoencoder, and its calibrated threshold.
struct AnomalyDetector {
  learn::StandardizeParams scaling;
  Autoencoder autoencoder;
  double outage_ratio = 0.0;

  std::vector<double> errors(const learn::Matrix& raw_rows) const;
  std::vector<int> classify(const learn::Matrix& raw_rows) const;
};

/// Train on normal rows, calibrate on the composite training rows.
AnomalyDetector fit_detector(const learn::Matrix& normal_rows,
                             const learn::Matrix& calibration_rows,
                             double outage_ratio, const AeConfig& config);

struct GridRow {
  std::size_t size = 0;
  std::size_t severity = 0;
  std::string method;
  double f1 = 0.0;
};

inline constexpr const char* kGridHeader = "size,severity,method,f1";

}  // namespace mrif::adm
