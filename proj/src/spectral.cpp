#include "ssvep/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ssvep {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

// Iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_pow2(std::vector<cd>& a, bool inverse) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1 : -1);
    const cd wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cd w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const cd u = a[i + j];
        const cd v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= static_cast<double>(n);
}

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Bluestein's chirp-z transform: DFT of arbitrary length via a power-of-2
// convolution.
void fft_bluestein(std::vector<cd>& x, bool inverse) {
  const size_t n = x.size();
  size_t m = 1;
  while (m < 2 * n + 1) m <<= 1;

  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cd> chirp(n);
  for (size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small for large n.
    const uint64_t k2 = (static_cast<uint64_t>(k) * k) % (2 * n);
    const double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = cd(std::cos(ang), std::sin(ang));
  }

  std::vector<cd> a(m, cd(0, 0)), b(m, cd(0, 0));
  for (size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

  fft_pow2(a, false);
  fft_pow2(b, false);
  for (size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_pow2(a, true);

  for (size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
  if (inverse)
    for (auto& v : x) v /= static_cast<double>(n);
}

}  // namespace

void fft(std::vector<cd>& x, bool inverse) {
  if (x.empty()) throw std::invalid_argument("fft: empty input");
  if (x.size() == 1) return;
  if (is_pow2(x.size()))
    fft_pow2(x, inverse);
  else
    fft_bluestein(x, inverse);
}

Spectrum dft_real(const std::vector<double>& x, double rate) {
  if (x.size() < 2) throw std::invalid_argument("dft_real: need length >= 2");
  const size_t t = x.size();
  std::vector<cd> buf(t);
  for (size_t i = 0; i < t; ++i) buf[i] = cd(x[i], 0.0);
  fft(buf, false);

  Spectrum s;
  s.bins.assign(buf.begin(), buf.begin() + t / 2 + 1);
  // Real input: bin 0 (and the Nyquist bin for even T) are real.
  s.bins[0] = cd(s.bins[0].real(), 0.0);
  if (t % 2 == 0) s.bins[t / 2] = cd(s.bins[t / 2].real(), 0.0);
  s.resolution_hz = rate / static_cast<double>(t);
  return s;
}

int band_bin_count(int num_samples, double rate, double lo_hz, double hi_hz) {
  const double res = rate / num_samples;
  int count = 0;
  for (int k = 0; k <= num_samples / 2; ++k) {
    const double f = k * res;
    if (f >= lo_hz && f <= hi_hz) ++count;
  }
  return count;
}

SpectralFeatures magnitude_features(const Epoch& epoch, double lo_hz,
                                    double hi_hz) {
  if (!(lo_hz >= 0.0) || !(lo_hz < hi_hz) || !(hi_hz <= epoch.rate / 2.0))
    throw std::invalid_argument("magnitude_features: invalid band");

  const int c = epoch.num_channels();
  const int t = epoch.num_samples();
  const double res = epoch.rate / t;

  std::vector<int> kept;
  for (int k = 0; k <= t / 2; ++k) {
    const double f = k * res;
    if (f >= lo_hz && f <= hi_hz) kept.push_back(k);
  }

  SpectralFeatures out;
  out.band_lo_hz = lo_hz;
  out.band_hi_hz = hi_hz;
  out.bin_freqs.reserve(kept.size());
  for (const int k : kept) out.bin_freqs.push_back(k * res);
  out.matrix.resize(c, static_cast<int>(kept.size()));

  std::vector<double> row(t);
  for (int ch = 0; ch < c; ++ch) {
    for (int i = 0; i < t; ++i) row[i] = epoch.data(ch, i);
    const Spectrum s = dft_real(row, epoch.rate);
    for (size_t j = 0; j < kept.size(); ++j)
      out.matrix(ch, static_cast<int>(j)) = std::abs(s.bins[kept[j]]);
  }
  return out;
}

}  // namespace ssvep
