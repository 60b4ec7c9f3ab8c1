#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "dentsynth/analytics.hpp"
#include "dentsynth/error.hpp"

namespace dentsynth {

ConfusionMatrix confusion(std::span<const Label> labels, std::span<const Label> predictions) {
  if (labels.size() != predictions.size())
    fail(ErrorKind::shape, "confusion: " + std::to_string(labels.size()) + " labels but " +
                               std::to_string(predictions.size()) + " predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool actual = labels[i] == Label::deformed;
    const bool predicted = predictions[i] == Label::deformed;
    if (actual && predicted) ++cm.tp;
    else if (!actual && predicted) ++cm.fp;
    else if (actual) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) fail(ErrorKind::data, "metrics: empty confusion matrix");
  MetricsReport r;
  r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
  if (cm.tp + cm.fp > 0) r.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  else r.precision_defined = false;
  if (cm.tp + cm.fn > 0) r.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  else r.recall_defined = false;
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  else r.f1_defined = false;
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_number(const std::string& text, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::parse, path.string() + ": not a number: '" + text + "'");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

const char* const kMetricRows[] = {"accuracy", "f1", "recall", "precision"};

}  // namespace

void write_metrics_csv(const MetricsReport& r, const std::filesystem::path& path) {
  std::string s = "metric,value,defined\n";
  s += "accuracy," + fmt(r.accuracy) + ",1\n";
  s += "f1," + fmt(r.f1) + "," + (r.f1_defined ? "1" : "0") + "\n";
  s += "recall," + fmt(r.recall) + "," + (r.recall_defined ? "1" : "0") + "\n";
  s += "precision," + fmt(r.precision) + "," + (r.precision_defined ? "1" : "0") + "\n";
  write_text(path, s);
}

MetricsReport read_metrics_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.size() != 5 || rows[0] != std::vector<std::string>{"metric", "value", "defined"})
    fail(ErrorKind::parse, path.string() + ": expected header 'metric,value,defined' and 4 rows");
  MetricsReport r;
  double* values[] = {&r.accuracy, &r.f1, &r.recall, &r.precision};
  bool dummy = true;
  bool* flags[] = {&dummy, &r.f1_defined, &r.recall_defined, &r.precision_defined};
  for (int i = 0; i < 4; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i) + 1];
    if (row.size() != 3 || row[0] != kMetricRows[i])
      fail(ErrorKind::parse, path.string() + ": row " + std::to_string(i + 2) + " should be '" + kMetricRows[i] + "'");
    *values[i] = parse_number(row[1], path);
    if (*values[i] < 0.0 || *values[i] > 1.0)
      fail(ErrorKind::parse, path.string() + ": " + kMetricRows[i] + " outside [0,1]");
    if (row[2] != "0" && row[2] != "1") fail(ErrorKind::parse, path.string() + ": defined flag must be 0 or 1");
    *flags[i] = row[2] == "1";
  }
  return r;
}

void write_confusion_csv(const ConfusionMatrix& cm, const std::filesystem::path& path) {
  std::ostringstream s;
  s << "actual,predicted_deformed,predicted_non_deformed\n";
  s << "deformed," << cm.tp << ',' << cm.fn << '\n';
  s << "non_deformed," << cm.fp << ',' << cm.tn << '\n';
  write_text(path, s.str());
}

ConfusionMatrix read_confusion_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.size() != 3 ||
      rows[0] != std::vector<std::string>{"actual", "predicted_deformed", "predicted_non_deformed"} ||
      rows[1].size() != 3 || rows[1][0] != "deformed" || rows[2].size() != 3 || rows[2][0] != "non_deformed")
    fail(ErrorKind::parse, path.string() + ": not a confusion matrix CSV");
  auto count = [&](const std::string& t) {
    const double v = parse_number(t, path);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
      fail(ErrorKind::parse, path.string() + ": counts must be non-negative integers");
    return static_cast<std::size_t>(v);
  };
  return ConfusionMatrix{count(rows[1][1]), count(rows[2][1]), count(rows[1][2]), count(rows[2][2])};
}

void write_predictions_csv(const DatasetManifest& manifest, const Evaluation& eval,
                           const std::filesystem::path& path) {
  std::ostringstream s;
  s << "index,image,label,probability,prediction\n";
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const auto& smp = manifest.samples[i];
    s << smp.index << ',' << smp.image << ',' << to_string(smp.label) << ',' << fmt(eval.probabilities[i]) << ','
      << to_string(eval.predictions[i]) << '\n';
  }
  write_text(path, s.str());
}

std::string report_csv(const std::vector<ReportColumn>& columns) {
  std::string s = "metric";
  for (const auto& c : columns) s += "," + c.name;
  s += "\n";
  const char* names[] = {"Accuracy", "F1", "Recall", "Precision"};
  for (int i = 0; i < 4; ++i) {
    s += names[i];
    for (const auto& c : columns) {
      const double v[] = {c.metrics.accuracy, c.metrics.f1, c.metrics.recall, c.metrics.precision};
      char buf[16];
      std::snprintf(buf, sizeof buf, "%.3f", v[i]);
      s += ",";
      s += buf;
    }
    s += "\n";
  }
  return s;
}

std::string report_text(const std::vector<ReportColumn>& columns) {
  std::size_t width = 10;
  for (const auto& c : columns) width = std::max(width, c.name.size() + 2);
  std::ostringstream s;
  s << std::left << std::setw(12) << "";
  for (const auto& c : columns) s << std::right << std::setw(static_cast<int>(width)) << c.name;
  s << '\n';
  const char* names[] = {"Accuracy", "F1", "Recall", "Precision"};
  for (int i = 0; i < 4; ++i) {
    s << std::left << std::setw(12) << names[i];
    for (const auto& c : columns) {
      const double v[] = {c.metrics.accuracy, c.metrics.f1, c.metrics.recall, c.metrics.precision};
      s << std::right << std::setw(static_cast<int>(width)) << std::fixed << std::setprecision(3) << v[i];
    }
    s << '\n';
  }
  return s.str();
}

}  // namespace dentsynth
