#ifndef SSVEP_LDA_HPP
#define SSVEP_LDA_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <vector>

#include "ssvep/signal.hpp"

namespace ssvep {

// Shrinkage LDA: class means, pooled covariance shrunk toward a scaled
// identity, linear discriminants g_c(x) = x' S^-1 mu_c - mu_c' S^-1 mu_c / 2
// + log pi_c.
struct LdaModel {
  std::vector<Eigen::VectorXd> means;  // one per class
  Eigen::MatrixXd cov;                 // shrunk pooled covariance
  std::vector<Eigen::VectorXd> weights;
  std::vector<double> biases;
  std::vector<double> priors;
  double gamma = 0.1;

  int num_classes() const { return static_cast<int>(means.size()); }
  int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }

  void save(const std::filesystem::path& path) const;
  static LdaModel load(const std::filesystem::path& path);
};

// Fit with shrinkage gamma in [0,1]; when gamma is nullopt a Ledoit-Wolf
// style analytic estimate is used (falling back to 0.1 if degenerate).
LdaModel lda_fit(const Eigen::MatrixXd& features,  // N x D
                 const std::vector<int>& labels, int num_classes,
                 std::optional<double> gamma = std::nullopt);

int lda_predict(const LdaModel& model, const Eigen::VectorXd& x);

// Spectral feature vector for LDA: the magnitude spectrum restricted to the
// 3-45 Hz analysis band (the same representation the network's frequency
// stream consumes), flattened channel-major (D = num_bins * C).
Eigen::VectorXd lda_band_features(const Epoch& epoch);

}  // namespace ssvep

#endif  // SSVEP_LDA_HPP
