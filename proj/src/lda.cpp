#include "ssvep/lda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "ssvep/model_io.hpp"
#include "ssvep/spectral.hpp"

namespace ssvep {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Ledoit-Wolf shrinkage intensity toward (trace/D) * I, estimated from the
// centered observations. Returns a value clamped to [0, 1].
double ledoit_wolf_gamma(const MatrixXd& centered, const MatrixXd& cov) {
  const int n = static_cast<int>(centered.rows());
  const int d = static_cast<int>(centered.cols());
  if (n < 2) return 0.1;
  const double mu = cov.trace() / d;
  MatrixXd target = MatrixXd::Identity(d, d) * mu;
  const double dn = (cov - target).squaredNorm();
  if (dn <= 0.0) return 0.0;
  double bn = 0.0;
  for (int i = 0; i < n; ++i) {
    const MatrixXd xi = centered.row(i).transpose() * centered.row(i);
    bn += (xi - cov).squaredNorm();
  }
  bn /= static_cast<double>(n) * n;
  const double g = bn / dn;
  if (!std::isfinite(g)) return 0.1;
  return std::clamp(g, 0.0, 1.0);
}

}  // namespace

LdaModel lda_fit(const MatrixXd& features, const std::vector<int>& labels,
                 int num_classes, std::optional<double> gamma) {
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("lda_fit: labels size mismatch");
  if (n < 3 * num_classes)
    throw std::invalid_argument("lda_fit: need at least 3 samples per class");
  if (d < 1) throw std::invalid_argument("lda_fit: empty feature space");
  if (gamma && (*gamma < 0.0 || *gamma > 1.0))
    throw std::invalid_argument("lda_fit: gamma outside [0, 1]");

  std::vector<int> counts(num_classes, 0);
  for (const int l : labels) {
    if (l < 0 || l >= num_classes)
      throw std::invalid_argument("lda_fit: label out of range");
    ++counts[l];
  }
  for (int c = 0; c < num_classes; ++c)
    if (counts[c] == 0)
      throw std::invalid_argument("lda_fit: class " + std::to_string(c) +
                                  " missing from training data");

  LdaModel m;
  m.means.assign(num_classes, VectorXd::Zero(d));
  for (int i = 0; i < n; ++i) m.means[labels[i]] += features.row(i).transpose();
  for (int c = 0; c < num_classes; ++c) m.means[c] /= counts[c];

  MatrixXd centered(n, d);
  for (int i = 0; i < n; ++i)
    centered.row(i) = features.row(i) - m.means[labels[i]].transpose();
  const MatrixXd pooled = centered.transpose() * centered / n;

  const double g = gamma ? *gamma : ledoit_wolf_gamma(centered, pooled);
  m.gamma = g;
  const double mu = pooled.trace() / d;
  m.cov = (1.0 - g) * pooled + g * mu * MatrixXd::Identity(d, d);

  Eigen::LDLT<MatrixXd> solver(m.cov);
  if (solver.info() != Eigen::Success || !solver.isPositive())
    throw std::runtime_error(
        "lda_fit: covariance is singular; use shrinkage gamma > 0");

  for (int c = 0; c < num_classes; ++c) {
    const VectorXd w = solver.solve(m.means[c]);
    m.weights.push_back(w);
    m.priors.push_back(static_cast<double>(counts[c]) / n);
    m.biases.push_back(-0.5 * m.means[c].dot(w) + std::log(m.priors[c]));
  }
  return m;
}

int lda_predict(const LdaModel& model, const VectorXd& x) {
  if (x.size() != model.dim())
    throw std::invalid_argument("lda_predict: dimension mismatch");
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < model.num_classes(); ++c) {
    const double score = x.dot(model.weights[c]) + model.biases[c];
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

VectorXd lda_band_features(const Epoch& epoch) {
  const SpectralFeatures sf = magnitude_features(epoch, 3.0, 45.0);
  const int c = epoch.num_channels();
  const int b = static_cast<int>(sf.matrix.cols());
  VectorXd out(static_cast<Eigen::Index>(b) * c);
  Eigen::Index idx = 0;
  for (int ch = 0; ch < c; ++ch)
    for (int k = 0; k < b; ++k) out[idx++] = sf.matrix(ch, k);
  return out;
}

void LdaModel::save(const std::filesystem::path& path) const {
  ModelFile mf;
  mf.arch = "lda";
  nlohmann::json desc;
  desc["classes"] = num_classes();
  desc["dim"] = dim();
  desc["gamma"] = gamma;
  mf.descriptor_json = desc.dump();
  auto push = [&](const std::string& name, const VectorXd& v) {
    mf.tensors.emplace_back(name,
                            std::vector<double>(v.data(), v.data() + v.size()));
  };
  for (int c = 0; c < num_classes(); ++c) {
    push("mean." + std::to_string(c), means[c]);
    push("weight." + std::to_string(c), weights[c]);
  }
  mf.tensors.emplace_back("bias", biases);
  mf.tensors.emplace_back("prior", priors);
  mf.tensors.emplace_back(
      "cov", std::vector<double>(cov.data(), cov.data() + cov.size()));
  save_model_file(mf, path);
}

LdaModel LdaModel::load(const std::filesystem::path& path) {
  const ModelFile mf = load_model_file(path);
  if (mf.arch != "lda") throw std::runtime_error("model file is not an LDA model");
  const nlohmann::json desc = nlohmann::json::parse(mf.descriptor_json);
  const int classes = desc.at("classes").get<int>();
  const int d = desc.at("dim").get<int>();
  LdaModel m;
  m.gamma = desc.at("gamma").get<double>();
  for (int c = 0; c < classes; ++c) {
    const auto& mean = mf.tensor("mean." + std::to_string(c));
    const auto& w = mf.tensor("weight." + std::to_string(c));
    m.means.push_back(Eigen::Map<const VectorXd>(mean.data(), d));
    m.weights.push_back(Eigen::Map<const VectorXd>(w.data(), d));
  }
  m.biases = mf.tensor("bias");
  m.priors = mf.tensor("prior");
  const auto& cov = mf.tensor("cov");
  m.cov = Eigen::Map<const MatrixXd>(cov.data(), d, d);
  return m;
}

}  // namespace ssvep
