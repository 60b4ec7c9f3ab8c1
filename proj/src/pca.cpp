#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "dentsynth/analytics.hpp"
#include "dentsynth/error.hpp"

namespace dentsynth {

Eigen::MatrixXd PcaModel::project(const Eigen::MatrixXd& data) const {
  if (data.cols() != mean.size())
    fail(ErrorKind::shape, "pca: data has " + std::to_string(data.cols()) + " columns, model expects " +
                               std::to_string(mean.size()));
  return (data.rowwise() - mean.transpose()) * components.transpose();
}

PcaModel pca_fit(const Eigen::MatrixXd& data, int k) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (n < 2) fail(ErrorKind::parameter, "pca: need at least 2 samples, got " + std::to_string(n));
  if (k < 1 || k > std::min(n, d))
    fail(ErrorKind::parameter, "pca: k=" + std::to_string(k) + " outside [1, " + std::to_string(std::min(n, d)) + "]");

  PcaModel m;
  m.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - m.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) fail(ErrorKind::data, "pca: eigendecomposition did not converge");

  // Eigen returns ascending eigenvalues.
  m.components.resize(k, d);
  m.variances.resize(k);
  for (int i = 0; i < k; ++i) {
    const Eigen::Index col = d - 1 - i;
    Eigen::VectorXd v = solver.eigenvectors().col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    m.components.row(i) = v.transpose();
    m.variances[i] = std::max(0.0, solver.eigenvalues()[col]);
  }
  return m;
}

PcaScatter pca_scatter(const std::vector<std::pair<std::string, DatasetManifest>>& datasets, int k, int jobs) {
  if (datasets.empty()) fail(ErrorKind::data, "pca: no datasets given");
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index total = 0;
  for (const auto& [tag, m] : datasets) {
    if (m.samples.empty()) fail(ErrorKind::data, "pca: dataset '" + tag + "' is empty");
    blocks.push_back(feature_matrix(m, jobs));
    total += blocks.back().rows();
  }
  Eigen::MatrixXd all(total, kFeatureDim);
  Eigen::Index row = 0;
  for (const auto& b : blocks) {
    all.middleRows(row, b.rows()) = b;
    row += b.rows();
  }

  PcaScatter out;
  if (total < 2) {
    out.model.mean = all.row(0).transpose();
    out.model.components = Eigen::MatrixXd::Identity(k, kFeatureDim);
    out.model.variances = Eigen::VectorXd::Zero(k);
  } else {
    out.model = pca_fit(all, std::min<int>(k, static_cast<int>(std::min<Eigen::Index>(total, kFeatureDim))));
  }
  const Eigen::MatrixXd proj = out.model.project(all);
  row = 0;
  for (const auto& [tag, m] : datasets) {
    for (const auto& s : m.samples) {
      PcaPoint p;
      p.tag = tag;
      p.index = s.index;
      p.label = s.label;
      p.coords.resize(static_cast<std::size_t>(proj.cols()));
      for (Eigen::Index c = 0; c < proj.cols(); ++c) p.coords[static_cast<std::size_t>(c)] = proj(row, c);
      out.points.push_back(std::move(p));
      ++row;
    }
  }
  return out;
}

void write_pca_csv(const PcaScatter& scatter, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << "dataset,index,label";
  const std::size_t k = scatter.points.empty() ? 0 : scatter.points.front().coords.size();
  for (std::size_t c = 0; c < k; ++c) out << ",pc" << (c + 1);
  out << '\n';
  char buf[32];
  for (const auto& p : scatter.points) {
    out << p.tag << ',' << p.index << ',' << to_string(p.label);
    for (double v : p.coords) {
      std::snprintf(buf, sizeof buf, "%.9g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

double projected_variance(const PcaScatter& scatter, const std::string& tag) {
  std::vector<const PcaPoint*> pts;
  for (const auto& p : scatter.points)
    if (p.tag == tag) pts.push_back(&p);
  if (pts.size() < 2) return 0.0;
  const std::size_t k = pts.front()->coords.size();
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    double mean = 0.0;
    for (const auto* p : pts) mean += p->coords[c];
    mean /= static_cast<double>(pts.size());
    double ss = 0.0;
    for (const auto* p : pts) ss += (p->coords[c] - mean) * (p->coords[c] - mean);
    total += ss / static_cast<double>(pts.size() - 1);
  }
  return total;
}

}  // namespace dentsynth
