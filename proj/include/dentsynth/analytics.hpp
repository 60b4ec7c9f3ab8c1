#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dentsynth/config.hpp"
#include "dentsynth/dataset.hpp"
#include "dentsynth/image.hpp"
#include "dentsynth/label.hpp"

namespace dentsynth {

inline constexpr int kFeatureSide = 32;
inline constexpr int kFeatureDim = kFeatureSide * kFeatureSide;
inline constexpr const char* kFeatureSpec = "grayscale-bt601/area-32x32/unit";

// Luma (0.299, 0.587, 0.114) scaled to [0,1], area-averaged onto 32x32.
Eigen::VectorXd extract_features(const RgbImage& image);

// One row per manifest sample, in manifest order.
Eigen::MatrixXd feature_matrix(const DatasetManifest& manifest, int jobs = 1);

std::vector<Label> labels_of(const DatasetManifest& manifest);

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const Label> labels, std::span<const Label> predictions);

// Ratios whose denominator is zero are reported as 0 with the flag cleared.
struct MetricsReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
  bool f1_defined = true;
};

MetricsReport metrics(const ConfusionMatrix& cm);

struct PcaModel {
  Eigen::VectorXd mean;          // d
  Eigen::MatrixXd components;    // k x d, rows orthonormal
  Eigen::VectorXd variances;     // k, descending

  Eigen::MatrixXd project(const Eigen::MatrixXd& data) const;
};

// Covariance eigendecomposition (divisor n-1). Each component is signed so its
// largest-magnitude entry is positive.
PcaModel pca_fit(const Eigen::MatrixXd& data, int k);

struct PcaPoint {
  std::string tag;
  std::size_t index = 0;
  Label label = Label::non_deformed;
  std::vector<double> coords;
};

struct PcaScatter {
  PcaModel model;
  std::vector<PcaPoint> points;
};

// Fits on the union of all datasets. A single sample projects to the origin.
PcaScatter pca_scatter(const std::vector<std::pair<std::string, DatasetManifest>>& datasets, int k = 2,
                       int jobs = 1);
void write_pca_csv(const PcaScatter& scatter, const std::filesystem::path& path);

// Sum of the projected variances of the points carrying `tag`.
double projected_variance(const PcaScatter& scatter, const std::string& tag);

struct LinearModel {
  std::vector<double> weights = std::vector<double>(kFeatureDim, 0.0);
  double bias = 0.0;
  std::string feature_spec = kFeatureSpec;

  double probability(const Eigen::VectorXd& features) const;
  // Ties at exactly 0.5 go to the negative class.
  Label predict(const Eigen::VectorXd& features) const;
};

void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

// Mean logistic loss plus (l2/2)|w|^2, labels y in {0,1}.
double logistic_loss(const Eigen::VectorXd& w, double b, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     double l2);
void logistic_gradient(const Eigen::VectorXd& w, double b, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       double l2, Eigen::VectorXd& grad_w, double& grad_b);

struct TrainTrace {
  std::vector<double> loss;  // per epoch, in standardised space
};

// Full-batch gradient descent from zero on standardised features; the
// standardisation is folded back into the returned weights.
LinearModel train_baseline(const Eigen::MatrixXd& x, std::span<const Label> labels, const TrainParams& params,
                           TrainTrace* trace = nullptr);
LinearModel train_baseline(const DatasetManifest& manifest, const TrainParams& params, int jobs = 1,
                           TrainTrace* trace = nullptr);

struct Evaluation {
  ConfusionMatrix confusion;
  MetricsReport metrics;
  std::vector<double> probabilities;
  std::vector<Label> predictions;
};

Evaluation evaluate(const LinearModel& model, const Eigen::MatrixXd& x, std::span<const Label> labels);
Evaluation evaluate(const LinearModel& model, const DatasetManifest& manifest, int jobs = 1);

// metrics.csv: "metric,value,defined" with rows accuracy, f1, recall, precision.
void write_metrics_csv(const MetricsReport& report, const std::filesystem::path& path);
MetricsReport read_metrics_csv(const std::filesystem::path& path);

// confusion.csv: "actual,predicted_deformed,predicted_non_deformed".
void write_confusion_csv(const ConfusionMatrix& cm, const std::filesystem::path& path);
ConfusionMatrix read_confusion_csv(const std::filesystem::path& path);

void write_predictions_csv(const DatasetManifest& manifest, const Evaluation& eval,
                           const std::filesystem::path& path);

struct ReportColumn {
  std::string name;
  MetricsReport metrics;
};

// Rows Accuracy, F1, Recall, Precision; one column per evaluated dataset.
std::string report_csv(const std::vector<ReportColumn>& columns);
std::string report_text(const std::vector<ReportColumn>& columns);

}  // namespace dentsynth
