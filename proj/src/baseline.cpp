#include <cmath>
#include <fstream>

#include "json.hpp"

#include "dentsynth/analytics.hpp"
#include "dentsynth/error.hpp"

namespace dentsynth {

namespace {

// Numerically stable log(1 + exp(z)).
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd targets(std::span<const Label> labels) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y[static_cast<Eigen::Index>(i)] = labels[i] == Label::deformed ? 1.0 : 0.0;
  return y;
}

void check_shapes(const Eigen::VectorXd& w, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.cols() != w.size() || x.rows() != y.size() || x.rows() == 0)
    fail(ErrorKind::shape, "logistic: inconsistent shapes (x " + std::to_string(x.rows()) + "x" +
                               std::to_string(x.cols()) + ", w " + std::to_string(w.size()) + ", y " +
                               std::to_string(y.size()) + ")");
}

}  // namespace

double LinearModel::probability(const Eigen::VectorXd& features) const {
  if (features.size() != static_cast<Eigen::Index>(weights.size()))
    fail(ErrorKind::shape, "model expects " + std::to_string(weights.size()) + " features, got " +
                               std::to_string(features.size()));
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return sigmoid(w.dot(features) + bias);
}

Label LinearModel::predict(const Eigen::VectorXd& features) const {
  return probability(features) > 0.5 ? Label::deformed : Label::non_deformed;
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "dentsynth-linear/1";
  j["feature_spec"] = model.feature_spec;
  j["bias"] = model.bias;
  j["weights"] = model.weights;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open model " + path.string());
  LinearModel m;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("format") != "dentsynth-linear/1") fail(ErrorKind::parse, path.string() + ": unknown model format");
    m.feature_spec = j.at("feature_spec").get<std::string>();
    m.bias = j.at("bias").get<double>();
    m.weights = j.at("weights").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, path.string() + ": " + e.what());
  }
  if (m.feature_spec != kFeatureSpec)
    fail(ErrorKind::data, path.string() + ": feature spec '" + m.feature_spec + "' does not match '" + kFeatureSpec + "'");
  if (m.weights.size() != static_cast<std::size_t>(kFeatureDim))
    fail(ErrorKind::data, path.string() + ": expected " + std::to_string(kFeatureDim) + " weights");
  return m;
}

double logistic_loss(const Eigen::VectorXd& w, double b, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     double l2) {
  check_shapes(w, x, y);
  const Eigen::VectorXd z = (x * w).array() + b;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) sum += softplus(z[i]) - y[i] * z[i];
  return sum / static_cast<double>(x.rows()) + 0.5 * l2 * w.squaredNorm();
}

void logistic_gradient(const Eigen::VectorXd& w, double b, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       double l2, Eigen::VectorXd& grad_w, double& grad_b) {
  check_shapes(w, x, y);
  const Eigen::VectorXd z = (x * w).array() + b;
  Eigen::VectorXd r(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) r[i] = sigmoid(z[i]) - y[i];
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  grad_w = (x.transpose() * r) * inv_n + l2 * w;
  grad_b = r.sum() * inv_n;
}

LinearModel train_baseline(const Eigen::MatrixXd& x, std::span<const Label> labels, const TrainParams& params,
                           TrainTrace* trace) {
  if (x.rows() != static_cast<Eigen::Index>(labels.size()))
    fail(ErrorKind::shape, "train: feature rows and labels differ in length");
  if (x.cols() != kFeatureDim)
    fail(ErrorKind::shape, "train: expected " + std::to_string(kFeatureDim) + " features per sample");
  std::size_t positives = 0;
  for (Label l : labels) positives += l == Label::deformed ? 1 : 0;
  if (positives == 0 || positives == labels.size())
    fail(ErrorKind::data, "train: training set contains a single class");
  if (params.epochs < 0 || !(params.learning_rate > 0.0) || params.l2 < 0.0)
    fail(ErrorKind::parameter, "train: epochs must be >= 0, learning_rate > 0, l2 >= 0");

  const Eigen::VectorXd mu = x.colwise().mean().transpose();
  Eigen::VectorXd sigma(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double var = (x.col(c).array() - mu[c]).square().mean();
    sigma[c] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  const Eigen::MatrixXd z = (x.rowwise() - mu.transpose()).array().rowwise() / sigma.transpose().array();
  const Eigen::VectorXd y = targets(labels);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.cols());
  double c = 0.0;
  Eigen::VectorXd gv;
  double gc = 0.0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    logistic_gradient(v, c, z, y, params.l2, gv, gc);
    v -= params.learning_rate * gv;
    c -= params.learning_rate * gc;
    if (trace) trace->loss.push_back(logistic_loss(v, c, z, y, params.l2));
  }

  LinearModel m;
  const Eigen::VectorXd w = v.array() / sigma.array();
  m.weights.assign(w.data(), w.data() + w.size());
  m.bias = c - w.dot(mu);
  return m;
}

LinearModel train_baseline(const DatasetManifest& manifest, const TrainParams& params, int jobs, TrainTrace* trace) {
  if (manifest.samples.empty()) fail(ErrorKind::data, "train: empty manifest");
  const auto labels = labels_of(manifest);
  return train_baseline(feature_matrix(manifest, jobs), labels, params, trace);
}

Evaluation evaluate(const LinearModel& model, const Eigen::MatrixXd& x, std::span<const Label> labels) {
  if (x.rows() == 0) fail(ErrorKind::data, "evaluate: empty test set");
  if (x.rows() != static_cast<Eigen::Index>(labels.size()))
    fail(ErrorKind::shape, "evaluate: feature rows and labels differ in length");
  Evaluation e;
  e.probabilities.reserve(labels.size());
  e.predictions.reserve(labels.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd f = x.row(i).transpose();
    const double p = model.probability(f);
    e.probabilities.push_back(p);
    e.predictions.push_back(p > 0.5 ? Label::deformed : Label::non_deformed);
  }
  e.confusion = confusion(labels, e.predictions);
  e.metrics = metrics(e.confusion);
  return e;
}

Evaluation evaluate(const LinearModel& model, const DatasetManifest& manifest, int jobs) {
  if (manifest.samples.empty()) fail(ErrorKind::data, "evaluate: empty manifest");
  const auto labels = labels_of(manifest);
  return evaluate(model, feature_matrix(manifest, jobs), labels);
}

}  // namespace dentsynth
