#ifndef SSVEP_CCA_HPP
#define SSVEP_CCA_HPP

#include <Eigen/Dense>
#include <vector>

#include "ssvep/signal.hpp"

namespace ssvep {

// Sin/cos reference set for one stimulus frequency: 2*n_harmonics rows of T
// samples at the working rate.
struct ReferenceBank {
  std::vector<double> freqs_hz;
  std::vector<Eigen::MatrixXd> references;  // one (2*n_harmonics) x T per freq
  int n_harmonics = 2;
  double rate = 100.0;
  int num_samples = 350;
};

ReferenceBank build_references(const std::vector<double>& freqs_hz,
                               int n_harmonics, int num_samples, double rate);

struct CcaResult {
  double rho = 0.0;
  bool regularized = false;  // low-rank input was rank-truncated
};

// Largest canonical correlation between row spaces of X (C x T) and Y (R x T).
// Rows are centered internally; the result is clamped to [0, 1].
CcaResult max_canonical_correlation(const Eigen::MatrixXd& x,
                                    const Eigen::MatrixXd& y);

struct CcaClassification {
  int label = 0;
  std::vector<double> rho;  // per class
};

// argmax over the bank's reference sets; ties break toward the lowest index.
CcaClassification cca_classify(const Epoch& epoch, const ReferenceBank& bank);

}  // namespace ssvep

#endif  // SSVEP_CCA_HPP
