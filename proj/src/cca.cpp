#include "ssvep/cca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/SVD>

namespace ssvep {

namespace {

using Eigen::MatrixXd;

// Orthonormal basis (columns) of the row space of a centered data matrix.
// Singular directions below 1e-8 of the largest are truncated; `truncated`
// reports whether that regularization kicked in.
MatrixXd row_space_basis(const MatrixXd& rows, bool& truncated) {
  MatrixXd centered = rows;
  for (Eigen::Index i = 0; i < centered.rows(); ++i)
    centered.row(i).array() -= centered.row(i).mean();
  Eigen::BDCSVD<MatrixXd> svd(centered.transpose(), Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() ? sv[0] * 1e-8 : 0.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > cutoff && sv[rank] > 0.0) ++rank;
  truncated = rank < rows.rows();
  return svd.matrixU().leftCols(rank);
}

}  // namespace

ReferenceBank build_references(const std::vector<double>& freqs_hz,
                               int n_harmonics, int num_samples, double rate) {
  if (num_samples < 2) throw std::invalid_argument("build_references: T < 2");
  if (n_harmonics < 1)
    throw std::invalid_argument("build_references: need >= 1 harmonic");
  for (const double f : freqs_hz)
    if (f * n_harmonics >= rate / 2.0)
      throw std::invalid_argument(
          "build_references: harmonic above Nyquist for f = " +
          std::to_string(f));

  ReferenceBank bank;
  bank.freqs_hz = freqs_hz;
  bank.n_harmonics = n_harmonics;
  bank.rate = rate;
  bank.num_samples = num_samples;
  for (const double f : freqs_hz) {
    MatrixXd y(2 * n_harmonics, num_samples);
    for (int h = 1; h <= n_harmonics; ++h) {
      for (int t = 0; t < num_samples; ++t) {
        const double ang =
            2.0 * std::numbers::pi * h * f * static_cast<double>(t) / rate;
        y(2 * (h - 1), t) = std::sin(ang);
        y(2 * (h - 1) + 1, t) = std::cos(ang);
      }
    }
    bank.references.push_back(std::move(y));
  }
  return bank;
}

CcaResult max_canonical_correlation(const MatrixXd& x, const MatrixXd& y) {
  if (x.cols() != y.cols())
    throw std::invalid_argument("max_canonical_correlation: T mismatch");
  if (x.cols() <= x.rows() + y.rows())
    throw std::invalid_argument(
        "max_canonical_correlation: T too short for C + R rows");

  CcaResult res;
  bool trunc_x = false, trunc_y = false;
  const MatrixXd qx = row_space_basis(x, trunc_x);
  const MatrixXd qy = row_space_basis(y, trunc_y);
  res.regularized = trunc_x || trunc_y;
  if (qx.cols() == 0 || qy.cols() == 0) {
    res.rho = 0.0;
    return res;
  }
  Eigen::JacobiSVD<MatrixXd> svd(qx.transpose() * qy);
  res.rho = std::clamp(svd.singularValues()[0], 0.0, 1.0);
  return res;
}

CcaClassification cca_classify(const Epoch& epoch, const ReferenceBank& bank) {
  if (epoch.num_samples() != bank.num_samples)
    throw std::invalid_argument("cca_classify: epoch length mismatch");

  bool trunc_x = false;
  const MatrixXd qx = row_space_basis(epoch.data, trunc_x);

  CcaClassification out;
  double best = -1.0;
  for (size_t k = 0; k < bank.references.size(); ++k) {
    bool trunc_y = false;
    const MatrixXd qy = row_space_basis(bank.references[k], trunc_y);
    double rho = 0.0;
    if (qx.cols() > 0 && qy.cols() > 0) {
      Eigen::JacobiSVD<MatrixXd> svd(qx.transpose() * qy);
      rho = std::clamp(svd.singularValues()[0], 0.0, 1.0);
    }
    out.rho.push_back(rho);
    if (rho > best) {
      best = rho;
      out.label = static_cast<int>(k);
    }
  }
  return out;
}

}  // namespace ssvep
