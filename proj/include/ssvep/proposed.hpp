#ifndef SSVEP_PROPOSED_HPP
#define SSVEP_PROPOSED_HPP

#include <filesystem>
#include <vector>

#include "ssvep/nn.hpp"
#include "ssvep/signal.hpp"
#include "ssvep/spectral.hpp"

namespace ssvep {

// Input standardization learned from the training set only: per-element
// z-scoring of the spectral features and per-channel z-scoring of the
// time-domain sequences.
struct Standardizer {
  Eigen::MatrixXd freq_mean, freq_sd;  // C x B
  Eigen::VectorXd time_mean, time_sd;  // C
};

// The full classifier: spectral feature extraction, standardization, and the
// two-stream net, trained per the fixed 50-epoch / lr 0.01 / batch 32 regime.
class ProposedModel {
public:
  static constexpr double kBandLoHz = 3.0;
  static constexpr double kBandHiHz = 45.0;
  static constexpr int kTimeDownsample = 4;

  // Network geometry for a given montage and epoch length.
  static NetConfig default_config(MontageKind montage, int num_samples,
                                  double rate);

  static ProposedModel fit(const std::vector<const Epoch*>& train,
                           const TrainConfig& cfg);

  int predict(const Epoch& epoch) const;
  std::pair<int, Eigen::VectorXd> predict_proba(const Epoch& epoch) const;

  const std::vector<double>& loss_curve() const { return loss_curve_; }
  const TwoStreamNet& net() const { return net_; }

  void save(const std::filesystem::path& path) const;
  static ProposedModel load(const std::filesystem::path& path);

  // Standardized (freq, time) pair for one epoch.
  TrainSample prepare(const Epoch& epoch) const;

private:
  ProposedModel(TwoStreamNet net, Standardizer stats)
      : net_(std::move(net)), stats_(std::move(stats)) {}

  TwoStreamNet net_;
  Standardizer stats_;
  std::vector<double> loss_curve_;
};

}  // namespace ssvep

#endif  // SSVEP_PROPOSED_HPP
