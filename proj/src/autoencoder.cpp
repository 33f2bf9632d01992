#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrif/adm.hpp"
#include "mrif/rng.hpp"

namespace mrif::adm {
namespace {

// Activations of every layer for one row; acts[0] is the input.
void forward(const std::vector<DenseLayer>& layers, std::span<const double> x,
             std::vector<std::vector<double>>& acts) {
  acts.resize(layers.size() + 1);
  acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& w = layers[l].weight;
    auto& out = acts[l + 1];
    out.assign(w.rows(), 0.0);
    const auto& in = acts[l];
    const bool hidden = l + 1 < layers.size();
    for (std::size_t o = 0; o < w.rows(); ++o) {
      double s = layers[l].bias[o];
      const auto wr = w.row(o);
      for (std::size_t i = 0; i < wr.size(); ++i) s += wr[i] * in[i];
      out[o] = hidden ? std::tanh(s) : s;
    }
  }
}

double row_error(const std::vector<double>& recon, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = recon[i] - x[i];
    s += d * d;
  }
  return s / static_cast<double>(x.size());
}

std::size_t parameter_count(const std::vector<DenseLayer>& layers) {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.rows() * l.weight.cols() + l.bias.size();
  return n;
}

// Adds the gradient of (scale * row MSE) into grad.
void accumulate_gradient(const std::vector<DenseLayer>& layers,
                         std::span<const double> x, double scale,
                         std::vector<std::vector<double>>& acts,
                         std::vector<double>& grad) {
  forward(layers, x, acts);
  const std::size_t d = x.size();
  std::vector<double> delta(d);
  for (std::size_t i = 0; i < d; ++i)
    delta[i] = scale * 2.0 * (acts.back()[i] - x[i]) / static_cast<double>(d);

  // Offsets of each layer's block in the flat vector.
  std::vector<std::size_t> offset(layers.size());
  std::size_t off = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    offset[l] = off;
    off += layers[l].weight.rows() * layers[l].weight.cols() + layers[l].bias.size();
  }

  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& w = layers[l].weight;
    const auto& in = acts[l];
    double* gw = grad.data() + offset[l];
    double* gb = gw + w.rows() * w.cols();
    for (std::size_t o = 0; o < w.rows(); ++o) {
      for (std::size_t i = 0; i < w.cols(); ++i) gw[o * w.cols() + i] += delta[o] * in[i];
      gb[o] += delta[o];
    }
    if (l == 0) break;
    std::vector<double> prev(w.cols(), 0.0);
    for (std::size_t o = 0; o < w.rows(); ++o)
      for (std::size_t i = 0; i < w.cols(); ++i) prev[i] += w(o, i) * delta[o];
    for (std::size_t i = 0; i < prev.size(); ++i) prev[i] *= 1.0 - in[i] * in[i];
    delta = std::move(prev);
  }
}

}  // namespace

Autoencoder::Autoencoder(std::size_t n_inputs, const AeConfig& config)
    : config_(config) {
  require(n_inputs >= 1, ErrorKind::InvalidInput, "autoencoder needs inputs");
  for (std::size_t i = 0; i < config.hidden.size(); ++i)
    require(config.hidden[i] >= 1 &&
                config.hidden[i] == config.hidden[config.hidden.size() - 1 - i],
            ErrorKind::InvalidInput, "hidden widths must be positive and mirror-symmetric");
  std::vector<std::size_t> widths{n_inputs};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(n_inputs);
  Rng rng = Rng::derive(config.seed, "ae-init");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer{learn::Matrix(widths[l + 1], widths[l]),
                     std::vector<double>(widths[l + 1], 0.0)};
    const double limit = std::sqrt(6.0 / static_cast<double>(widths[l] + widths[l + 1]));
    for (double& w : layer.weight.values()) w = rng.uniform(-limit, limit);
    layers_.push_back(std::move(layer));
  }
}

std::vector<double> Autoencoder::reconstruct(std::span<const double> row) const {
  std::vector<std::vector<double>> acts;
  forward(layers_, row, acts);
  return acts.back();
}

double Autoencoder::loss(const learn::Matrix& rows) const {
  if (rows.empty()) return 0.0;
  std::vector<std::vector<double>> acts;
  double s = 0.0;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    forward(layers_, rows.row(r), acts);
    s += row_error(acts.back(), rows.row(r));
  }
  return s / static_cast<double>(rows.rows());
}

std::vector<double> Autoencoder::gradient(const learn::Matrix& rows) const {
  std::vector<double> grad(parameter_count(layers_), 0.0);
  std::vector<std::vector<double>> acts;
  const double scale = 1.0 / static_cast<double>(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r)
    accumulate_gradient(layers_, rows.row(r), scale, acts, grad);
  return grad;
}

std::vector<double> Autoencoder::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count(layers_));
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weight.values().begin(), l.weight.values().end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void Autoencoder::set_parameters(std::span<const double> flat) {
  require(flat.size() == parameter_count(layers_), ErrorKind::InvalidInput,
          "parameter vector has the wrong size");
  std::size_t off = 0;
  for (auto& l : layers_) {
    auto w = l.weight.values();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), w.size(), w.begin());
    off += w.size();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), l.bias.size(), l.bias.begin());
    off += l.bias.size();
  }
}

Autoencoder ae_train(const learn::Matrix& normal_rows, const AeConfig& config) {
  require(normal_rows.rows() >= 100, ErrorKind::Training,
          "autoencoder training needs at least 100 rows, got " +
              std::to_string(normal_rows.rows()));
  require(normal_rows.all_finite(), ErrorKind::Training, "training rows are not finite");
  require(config.batch_size >= 1 && config.learning_rate > 0.0, ErrorKind::Training,
          "batch size and learning rate must be positive");
  Autoencoder model(normal_rows.cols(), config);
  model.epoch_loss.push_back(model.loss(normal_rows));

  const std::size_t n = normal_rows.rows();
  std::vector<double> params = model.parameters();
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0), grad(params.size());
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  double b1t = 1.0, b2t = 1.0;
  std::vector<std::size_t> order(n);
  std::vector<std::vector<double>> acts;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.shuffle) {
      Rng rng = Rng::derive(config.seed, "ae-epoch", epoch);
      rng.shuffle(std::span<std::size_t>(order));
    }
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (std::size_t i = start; i < stop; ++i)
        accumulate_gradient(model.layers(), normal_rows.row(order[i]), scale, acts, grad);
      b1t *= kBeta1;
      b2t *= kBeta2;
      for (std::size_t p = 0; p < params.size(); ++p) {
        m[p] = kBeta1 * m[p] + (1.0 - kBeta1) * grad[p];
        v[p] = kBeta2 * v[p] + (1.0 - kBeta2) * grad[p] * grad[p];
        const double mhat = m[p] / (1.0 - b1t);
        const double vhat = v[p] / (1.0 - b2t);
        params[p] -= config.learning_rate * mhat / (std::sqrt(vhat) + kEps);
      }
      model.set_parameters(params);
    }
    const double loss = model.loss(normal_rows);
    require(std::isfinite(loss), ErrorKind::Training,
            "autoencoder diverged at epoch " + std::to_string(epoch));
    model.epoch_loss.push_back(loss);
  }
  return model;
}

std::vector<double> ae_reconstruction_error(const Autoencoder& model,
                                            const learn::Matrix& rows) {
  std::vector<double> out(rows.rows());
#pragma omp parallel
  {
    std::vector<std::vector<double>> acts;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows.rows()); ++i) {
      const auto r = static_cast<std::size_t>(i);
      forward(model.layers(), rows.row(r), acts);
      out[r] = row_error(acts.back(), rows.row(r));
    }
  }
  return out;
}

double ae_calibrate_threshold(std::span<const double> errors, double outage_ratio) {
  require(!errors.empty(), ErrorKind::InvalidInput, "no errors to calibrate on");
  require(outage_ratio > 0.0 && outage_ratio <= 0.5, ErrorKind::InvalidInput,
          "outage ratio must lie in (0, 0.5]");
  return learn::quantile(std::vector<double>(errors.begin(), errors.end()),
                         1.0 - outage_ratio);
}

std::vector<int> ae_classify(const Autoencoder& model, const learn::Matrix& rows) {
  require(model.threshold.has_value(), ErrorKind::State,
          "autoencoder threshold is not calibrated");
  const auto errors = ae_reconstruction_error(model, rows);
  std::vector<int> out(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) out[i] = errors[i] > *model.threshold ? 1 : 0;
  return out;
}

std::vector<double> AnomalyDetector::errors(const learn::Matrix& raw_rows) const {
  return ae_reconstruction_error(autoencoder, learn::standardize_apply(raw_rows, scaling));
}

std::vector<int> AnomalyDetector::classify(const learn::Matrix& raw_rows) const {
  return ae_classify(autoencoder, learn::standardize_apply(raw_rows, scaling));
}

AnomalyDetector fit_detector(const learn::Matrix& normal_rows,
                             const learn::Matrix& calibration_rows,
                             double outage_ratio, const AeConfig& config) {
  AnomalyDetector det;
  det.scaling = learn::standardize_fit(normal_rows);
  det.autoencoder = ae_train(learn::standardize_apply(normal_rows, det.scaling), config);
  det.outage_ratio = outage_ratio;
  det.autoencoder.threshold =
      ae_calibrate_threshold(det.errors(calibration_rows), outage_ratio);
  return det;
}

}  // namespace mrif::adm
