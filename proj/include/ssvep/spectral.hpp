#ifndef SSVEP_SPECTRAL_HPP
#define SSVEP_SPECTRAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ssvep/signal.hpp"

namespace ssvep {

// One-sided spectrum of a length-T real signal: bins 0 .. floor(T/2).
struct Spectrum {
  std::vector<std::complex<double>> bins;
  double resolution_hz = 0.0;  // rate / T
};

// Per-channel magnitude spectrum restricted to an analysis band.
struct SpectralFeatures {
  Eigen::MatrixXd matrix;          // channels x B
  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;
  std::vector<double> bin_freqs;   // length B, strictly increasing
};

// In-place complex DFT of arbitrary length (radix-2 plus Bluestein).
void fft(std::vector<std::complex<double>>& x, bool inverse = false);

// One-sided DFT of a real signal: bins[f] = sum_t x_t e^{-2 pi i f t / T}.
Spectrum dft_real(const std::vector<double>& x, double rate);

// Magnitude features of all channels of an epoch, bins with lo <= f <= hi.
SpectralFeatures magnitude_features(const Epoch& epoch, double lo_hz,
                                    double hi_hz);

// Number of kept bins for a given epoch geometry (same grid as
// magnitude_features).
int band_bin_count(int num_samples, double rate, double lo_hz, double hi_hz);

}  // namespace ssvep

#endif  // SSVEP_SPECTRAL_HPP
