#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mrif/pipeline.hpp"

namespace mrif::pipeline {
namespace {

using nlohmann::json;

json matrix_json(const learn::Matrix& m) {
  return {{"rows", m.rows()},
          {"cols", m.cols()},
          {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

learn::Matrix matrix_from(const json& j) {
  learn::Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<std::vector<double>>();
  require(data.size() == m.rows() * m.cols(), ErrorKind::Parse,
          "bundle: matrix data size mismatch");
  std::copy(data.begin(), data.end(), m.values().begin());
  return m;
}

json scaling_json(const learn::StandardizeParams& p) {
  return {{"mean", p.mean}, {"scale", p.scale}};
}

learn::StandardizeParams scaling_from(const json& j) {
  return {j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
}

json ae_json(const adm::Autoencoder& ae) {
  const auto& c = ae.config();
  json layers = json::array();
  for (const auto& l : ae.layers())
    layers.push_back({{"weight", matrix_json(l.weight)}, {"bias", l.bias}});
  json j = {{"hidden", c.hidden},         {"epochs", c.epochs},
            {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
            {"seed", c.seed},             {"shuffle", c.shuffle},
            {"layers", layers},           {"epoch_loss", ae.epoch_loss}};
  j["threshold"] = ae.threshold ? json(*ae.threshold) : json(nullptr);
  return j;
}

adm::Autoencoder ae_from(const json& j) {
  adm::AeConfig c;
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.shuffle = j.at("shuffle").get<bool>();
  const auto& layers = j.at("layers");
  require(!layers.empty(), ErrorKind::Parse, "bundle: autoencoder has no layers");
  const std::size_t inputs = layers.front().at("weight").at("cols").get<std::size_t>();
  adm::Autoencoder ae(inputs, c);
  require(ae.layers().size() == layers.size(), ErrorKind::Parse,
          "bundle: autoencoder layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto w = matrix_from(layers[l].at("weight"));
    auto b = layers[l].at("bias").get<std::vector<double>>();
    require(w.rows() == ae.layers()[l].weight.rows() && w.cols() == ae.layers()[l].weight.cols() &&
                b.size() == ae.layers()[l].bias.size(),
            ErrorKind::Parse, "bundle: autoencoder layer shape mismatch");
    ae.layers()[l].weight = std::move(w);
    ae.layers()[l].bias = std::move(b);
  }
  ae.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
  if (!j.at("threshold").is_null()) ae.threshold = j.at("threshold").get<double>();
  return ae;
}

json gbt_json(const adm::GbtModel& g) {
  const auto& c = g.config;
  json trees = json::array();
  for (const auto& t : g.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    trees.push_back(nodes);
  }
  json j = {{"rounds", c.rounds},
            {"max_depth", c.max_depth},
            {"learning_rate", c.learning_rate},
            {"bins", c.bins},
            {"l2", c.l2},
            {"min_child_hessian", c.min_child_hessian},
            {"standardize", c.standardize},
            {"base_score", g.base_score},
            {"trees", trees},
            {"train_loss", g.train_loss}};
  j["scaling"] = g.scaling ? scaling_json(*g.scaling) : json(nullptr);
  return j;
}

adm::GbtModel gbt_from(const json& j) {
  adm::GbtModel g;
  g.config.rounds = j.at("rounds").get<std::size_t>();
  g.config.max_depth = j.at("max_depth").get<std::size_t>();
  g.config.learning_rate = j.at("learning_rate").get<double>();
  g.config.bins = j.at("bins").get<std::size_t>();
  g.config.l2 = j.at("l2").get<double>();
  g.config.min_child_hessian = j.at("min_child_hessian").get<double>();
  g.config.standardize = j.at("standardize").get<bool>();
  g.base_score = j.at("base_score").get<double>();
  for (const auto& t : j.at("trees")) {
    adm::RegressionTree tree;
    for (const auto& n : t)
      tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                            n.at(3).get<int>(), n.at(4).get<double>()});
    g.trees.push_back(std::move(tree));
  }
  g.train_loss = j.at("train_loss").get<std::vector<double>>();
  if (!j.at("scaling").is_null()) g.scaling = scaling_from(j.at("scaling"));
  return g;
}

json mrfm_json(const mrfm::MrfmModel& m) {
  return {{"n_neighbors", m.params.n_neighbors},
          {"contamination", m.params.contamination},
          {"pca_k", m.params.pca_k},
          {"measurement_scaling", scaling_json(m.measurement_scaling)},
          {"pca_mean", m.pca.mean},
          {"pca_components", matrix_json(m.pca.components)},
          {"pca_eigenvalues", m.pca.eigenvalues},
          {"pca_explained", m.pca.explained_variance_ratio},
          {"position_mean", m.position_mean},
          {"position_scale", m.position_scale},
          {"reference", matrix_json(m.lof.reference())},
          {"threshold", m.threshold}};
}

mrfm::MrfmModel mrfm_from(const json& j) {
  mrfm::MrfmModel m;
  m.params.n_neighbors = j.at("n_neighbors").get<std::size_t>();
  m.params.contamination = j.at("contamination").get<double>();
  m.params.pca_k = j.at("pca_k").get<std::size_t>();
  m.measurement_scaling = scaling_from(j.at("measurement_scaling"));
  m.pca.mean = j.at("pca_mean").get<std::vector<double>>();
  m.pca.components = matrix_from(j.at("pca_components"));
  m.pca.eigenvalues = j.at("pca_eigenvalues").get<std::vector<double>>();
  m.pca.explained_variance_ratio = j.at("pca_explained").get<std::vector<double>>();
  m.position_mean = j.at("position_mean").get<std::vector<double>>();
  m.position_scale = j.at("position_scale").get<double>();
  m.lof = mrfm::LofScorer(matrix_from(j.at("reference")), m.params.n_neighbors);
  m.threshold = j.at("threshold").get<double>();
  m.fitted = true;
  return m;
}

json bundle_body(const ModelBundle& b) {
  json j;
  j["format"] = "mrif-model-bundle";
  j["version"] = b.version;
  j["schema_digest"] = b.schema_digest;
  j["config_digest"] = b.config_digest;
  j["dataset_digest"] = b.dataset_digest;
  j["detector"] = {{"scaling", scaling_json(b.detector.scaling)},
                   {"outage_ratio", b.detector.outage_ratio},
                   {"autoencoder", ae_json(b.detector.autoencoder)}};
  j["gbt"] = b.gbt ? gbt_json(*b.gbt) : json(nullptr);
  j["mrfm"] = b.mrfm ? mrfm_json(*b.mrfm) : json(nullptr);
  j["regional"] = {{"eta", b.regional.eta}, {"radius_m", b.regional.region_radius_m}};
  j["composition"] = std::string(mrfm::to_string(b.composition));
  return j;
}

}  // namespace

std::string ModelBundle::digest() const {
  return hex_digest(fnv1a64(bundle_body(*this).dump()));
}

std::string bundle_to_json(const ModelBundle& bundle) {
  json j = bundle_body(bundle);
  j["content_digest"] = bundle.digest();
  return j.dump(1);
}

ModelBundle bundle_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("bundle: ") + e.what());
  }
  try {
    require(j.value("format", "") == "mrif-model-bundle", ErrorKind::Parse,
            "not a model bundle");
    ModelBundle b;
    b.version = j.at("version").get<int>();
    require(b.version == ModelBundle::kVersion, ErrorKind::Compatibility,
            "bundle version " + std::to_string(b.version) + " is not supported");
    b.schema_digest = j.at("schema_digest").get<std::string>();
    b.config_digest = j.at("config_digest").get<std::string>();
    b.dataset_digest = j.at("dataset_digest").get<std::string>();
    const auto& det = j.at("detector");
    b.detector.scaling = scaling_from(det.at("scaling"));
    b.detector.outage_ratio = det.at("outage_ratio").get<double>();
    b.detector.autoencoder = ae_from(det.at("autoencoder"));
    if (!j.at("gbt").is_null()) b.gbt = gbt_from(j.at("gbt"));
    if (!j.at("mrfm").is_null()) b.mrfm = mrfm_from(j.at("mrfm"));
    b.regional.eta = j.at("regional").at("eta").get<std::size_t>();
    b.regional.region_radius_m = j.at("regional").at("radius_m").get<double>();
    b.composition = mrfm::composition_from_string(j.at("composition").get<std::string>());
    require(j.at("content_digest").get<std::string>() == b.digest(), ErrorKind::Integrity,
            "bundle content digest mismatch");
    return b;
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("bundle: ") + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::InvalidInput, "cannot write " + path);
  out << bundle_to_json(bundle) << '\n';
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::InvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return bundle_from_json(ss.str());
}

}  // namespace mrif::pipeline
