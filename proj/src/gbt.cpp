#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrif/adm.hpp"

namespace mrif::adm {
namespace {

double sigmoid(double m) {
  return m >= 0.0 ? 1.0 / (1.0 + std::exp(-m)) : std::exp(m) / (1.0 + std::exp(m));
}

// Per-feature candidate split points at the training quantiles.
std::vector<std::vector<double>> bin_edges(const learn::Matrix& x, std::size_t bins) {
  std::vector<std::vector<double>> edges(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::vector<double> col = x.column(f);
    std::sort(col.begin(), col.end());
    auto& e = edges[f];
    for (std::size_t b = 1; b < bins; ++b) {
      const double q = static_cast<double>(b) / static_cast<double>(bins);
      const double pos = q * static_cast<double>(col.size() - 1);
      const auto lo = static_cast<std::size_t>(pos);
      const double v = lo + 1 < col.size()
                           ? col[lo] + (pos - static_cast<double>(lo)) * (col[lo + 1] - col[lo])
                           : col[lo];
      if (e.empty() || v > e.back()) e.push_back(v);
    }
    // The largest edge must leave something on the right.
    while (!e.empty() && e.back() >= col.back()) e.pop_back();
  }
  return edges;
}

struct Builder {
  const std::vector<std::vector<std::uint8_t>>& bin;  // [feature][row]
  const std::vector<std::vector<double>>& edges;
  const std::vector<double>& g;
  const std::vector<double>& h;
  const GbtConfig& cfg;
  RegressionTree tree;

  double leaf_value(double G, double H) const { return -G / (H + cfg.l2); }
  double score(double G, double H) const { return G * G / (H + cfg.l2); }

  int build(std::vector<std::size_t>& rows, std::size_t depth) {
    double G = 0.0, H = 0.0;
    for (std::size_t r : rows) {
      G += g[r];
      H += h[r];
    }
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(G, H)});
    if (depth >= cfg.max_depth || rows.size() < 2) return id;

    double best_gain = 1e-12;
    int best_f = -1;
    std::size_t best_b = 0;
    std::vector<double> hg, hh;
    for (std::size_t f = 0; f < edges.size(); ++f) {
      const std::size_t nb = edges[f].size() + 1;
      if (nb < 2) continue;
      hg.assign(nb, 0.0);
      hh.assign(nb, 0.0);
      for (std::size_t r : rows) {
        hg[bin[f][r]] += g[r];
        hh[bin[f][r]] += h[r];
      }
      double gl = 0.0, hl = 0.0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += hg[b];
        hl += hh[b];
        const double gr = G - gl, hr = H - hl;
        if (hl < cfg.min_child_hessian || hr < cfg.min_child_hessian) continue;
        const double gain = score(gl, hl) + score(gr, hr) - score(G, H);
        if (gain > best_gain) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_b = b;
        }
      }
    }
    if (best_f < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows)
      (bin[static_cast<std::size_t>(best_f)][r] <= best_b ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = build(left, depth + 1);
    const int rr = build(right, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best_f;
    node.threshold = edges[static_cast<std::size_t>(best_f)][best_b];
    node.left = l;
    node.right = rr;
    return id;
  }
};

double mean_log_loss(const std::vector<double>& margin, std::span<const int> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < margin.size(); ++i) {
    // log(1 + e^-m) for positives, log(1 + e^m) for negatives, stably.
    const double m = y[i] == 1 ? margin[i] : -margin[i];
    s += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
  }
  return s / static_cast<double>(margin.size());
}

}  // namespace

double RegressionTree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0)
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes[i].feature)] <=
                                         nodes[i].threshold
                                     ? nodes[i].left
                                     : nodes[i].right);
  return nodes[i].value;
}

double GbtModel::margin(std::span<const double> row) const {
  double m = base_score;
  for (const auto& t : trees) m += t.predict(row);
  return m;
}

GbtModel gbt_train(const learn::Matrix& rows, std::span<const int> labels,
                   const GbtConfig& config) {
  require(rows.rows() == labels.size(), ErrorKind::InvalidInput,
          "gbt: rows and labels differ in length");
  require(config.bins >= 2 && config.bins <= 256, ErrorKind::Training,
          "gbt: bins must lie in [2, 256]");
  require(config.learning_rate > 0.0, ErrorKind::Training,
          "gbt: learning rate must be positive");
  std::size_t pos = 0;
  for (int y : labels) {
    require(y == 0 || y == 1, ErrorKind::InvalidInput, "gbt: labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  require(pos > 0 && pos < labels.size(), ErrorKind::Training,
          "gbt: training labels contain a single class");

  GbtModel model;
  model.config = config;
  learn::Matrix x = rows;
  if (config.standardize) {
    model.scaling = learn::standardize_fit(rows);
    x = learn::standardize_apply(rows, *model.scaling);
  }
  const std::size_t n = x.rows();
  const double prior = static_cast<double>(pos) / static_cast<double>(n);
  model.base_score = std::log(prior / (1.0 - prior));

  const auto edges = bin_edges(x, config.bins);
  std::vector<std::vector<std::uint8_t>> bin(x.cols(), std::vector<std::uint8_t>(n));
  for (std::size_t f = 0; f < x.cols(); ++f)
    for (std::size_t r = 0; r < n; ++r)
      bin[f][r] = static_cast<std::uint8_t>(
          std::lower_bound(edges[f].begin(), edges[f].end(), x(r, f)) - edges[f].begin());

  std::vector<double> margin(n, model.base_score), g(n), h(n), step(n);
  model.train_loss.push_back(mean_log_loss(margin, labels));
  std::vector<std::size_t> all(n);

  for (std::size_t round = 0; round < config.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      g[i] = p - labels[i];
      h[i] = std::max(p * (1.0 - p), 1e-16);
    }
    all.resize(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    Builder b{bin, edges, g, h, config, {}};
    b.build(all, 0);
    RegressionTree tree = std::move(b.tree);
    for (std::size_t i = 0; i < n; ++i) step[i] = tree.predict(x.row(i));

    // Shrink the step until the training loss does not rise.
    double scale = config.learning_rate;
    const double before = model.train_loss.back();
    double after = before;
    std::vector<double> trial(n);
    for (int attempt = 0; attempt < 40; ++attempt, scale *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = margin[i] + scale * step[i];
      after = mean_log_loss(trial, labels);
      if (after <= before) break;
    }
    if (after > before) {
      scale = 0.0;
      after = before;
      trial = margin;
    }
    for (auto& node : tree.nodes) node.value *= scale;
    margin.swap(trial);
    model.trees.push_back(std::move(tree));
    model.train_loss.push_back(after);
  }
  return model;
}

std::vector<double> gbt_predict(const GbtModel& model, const learn::Matrix& rows) {
  const learn::Matrix x =
      model.scaling ? learn::standardize_apply(rows, *model.scaling) : rows;
  std::vector<double> out(x.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.rows()); ++i)
    out[static_cast<std::size_t>(i)] = sigmoid(model.margin(x.row(static_cast<std::size_t>(i))));
  return out;
}

double log_loss(std::span<const double> probabilities, std::span<const int> labels) {
  require(probabilities.size() == labels.size() && !labels.empty(),
          ErrorKind::InvalidInput, "log_loss: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(probabilities[i], 1e-15, 1.0 - 1e-15);
    s -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return s / static_cast<double>(labels.size());
}

}  // namespace mrif::adm
