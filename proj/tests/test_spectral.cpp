#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "ssvep/rng.hpp"
#include "ssvep/spectral.hpp"

using namespace ssvep;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// The Eq.-1 sum, written naively in O(T^2); the fast transform must match it.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (size_t f = 0; f < out.size(); ++f) {
    std::complex<double> s{0.0, 0.0};
    for (size_t t = 0; t < n; ++t)
      s += x[t] * std::exp(std::complex<double>(
                      0.0, -kTwoPi * double(f) * double(t) / double(n)));
    out[f] = s;
  }
  return out;
}

std::vector<double> random_vector(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("dft of a constant is pure DC") {
  const int t_len = 350;
  Spectrum s = dft_real(std::vector<double>(t_len, 2.5), 100.0);
  REQUIRE(static_cast<int>(s.bins.size()) == t_len / 2 + 1);
  CHECK(s.resolution_hz == doctest::Approx(100.0 / t_len));
  CHECK(s.bins[0].real() == doctest::Approx(2.5 * t_len));
  CHECK(s.bins[0].imag() == 0.0);
  for (size_t k = 1; k < s.bins.size(); ++k)
    CHECK(std::abs(s.bins[k]) < 1e-9 * t_len);
}

TEST_CASE("dft of an integer-bin cosine concentrates at its bin") {
  const int t_len = 350;
  const int k = 42;
  std::vector<double> x(t_len);
  for (int t = 0; t < t_len; ++t) x[t] = std::cos(kTwoPi * k * t / t_len);
  Spectrum s = dft_real(x, 100.0);
  CHECK(std::abs(s.bins[k]) == doctest::Approx(t_len / 2.0).epsilon(1e-6));
  for (size_t j = 0; j < s.bins.size(); ++j)
    if (static_cast<int>(j) != k) CHECK(std::abs(s.bins[j]) < 1e-6 * t_len);
}

TEST_CASE("fast transform matches the naive sum on random vectors") {
  for (uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    for (size_t n : {16u, 350u, 351u, 1000u}) {
      auto x = random_vector(n, seed * 100 + n);
      Spectrum s = dft_real(x, 100.0);
      auto ref = naive_dft(x);
      REQUIRE(s.bins.size() == ref.size());
      for (size_t f = 0; f < ref.size(); ++f)
        CHECK(std::abs(s.bins[f] - ref[f]) < 1e-9);
    }
  }
}

TEST_CASE("dft is linear") {
  auto x = random_vector(350, 11);
  auto y = random_vector(350, 12);
  std::vector<double> z(350);
  for (int i = 0; i < 350; ++i) z[i] = 2.0 * x[i] - 0.5 * y[i];
  Spectrum sx = dft_real(x, 100.0), sy = dft_real(y, 100.0),
           sz = dft_real(z, 100.0);
  for (size_t f = 0; f < sz.bins.size(); ++f)
    CHECK(std::abs(sz.bins[f] - (2.0 * sx.bins[f] - 0.5 * sy.bins[f])) <
          1e-9);
}

TEST_CASE("Parseval holds on random vectors") {
  for (size_t n : {350u, 351u}) {
    auto x = random_vector(n, n);
    double time_energy = 0.0;
    for (double v : x) time_energy += v * v;
    Spectrum s = dft_real(x, 100.0);
    double freq_energy = std::norm(s.bins[0]);
    const size_t half = n / 2;
    for (size_t f = 1; f < half + (n % 2); ++f)
      freq_energy += 2.0 * std::norm(s.bins[f]);
    if (n % 2 == 0) freq_energy += std::norm(s.bins[half]);
    freq_energy /= double(n);
    CHECK(freq_energy ==
          doctest::Approx(time_energy).epsilon(1e-6));
  }
}

TEST_CASE("forward-then-inverse fft returns the input") {
  for (size_t n : {8u, 350u, 351u}) {
    auto xr = random_vector(n, 7 * n);
    std::vector<std::complex<double>> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = {xr[i], xr[(i + 1) % n]};
    auto y = x;
    fft(y, false);
    fft(y, true);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - x[i]) < 1e-10);
  }
}

TEST_CASE("dft rejects degenerate input") {
  CHECK_THROWS_AS((void)dft_real({}, 100.0), std::invalid_argument);
  CHECK_THROWS_AS((void)dft_real({1.0}, 100.0), std::invalid_argument);
}

TEST_CASE("band bin count for the default analysis band is 147") {
  CHECK(band_bin_count(350, 100.0, 3.0, 45.0) == 147);
}

TEST_CASE("magnitude features of a zero epoch are zero") {
  Epoch e;
  e.montage = MontageKind::Ear18;
  e.rate = 100.0;
  e.data = Eigen::MatrixXd::Zero(18, 350);
  SpectralFeatures f = magnitude_features(e, 3.0, 45.0);
  CHECK(f.matrix.rows() == 18);
  CHECK(f.matrix.cols() == 147);
  CHECK(f.matrix.cwiseAbs().maxCoeff() == 0.0);
  CHECK(static_cast<int>(f.bin_freqs.size()) == 147);
  for (size_t i = 1; i < f.bin_freqs.size(); ++i)
    CHECK(f.bin_freqs[i] > f.bin_freqs[i - 1]);
  CHECK(f.bin_freqs.front() >= 3.0);
  CHECK(f.bin_freqs.back() <= 45.0);
}

TEST_CASE("magnitude features peak at a 12 Hz tone") {
  Epoch e;
  e.montage = MontageKind::Ear18;
  e.rate = 100.0;
  e.data = Eigen::MatrixXd::Zero(18, 350);
  for (int t = 0; t < 350; ++t)
    e.data(4, t) = std::sin(kTwoPi * 12.0 * t / 100.0);
  SpectralFeatures f = magnitude_features(e, 3.0, 45.0);
  int arg = 0;
  f.matrix.row(4).maxCoeff(&arg);
  CHECK(std::abs(f.bin_freqs[arg] - 12.0) <= 100.0 / 350.0);
}

TEST_CASE("magnitude features validate the band") {
  Epoch e;
  e.montage = MontageKind::Ear18;
  e.rate = 100.0;
  e.data = Eigen::MatrixXd::Zero(18, 350);
  CHECK_THROWS_AS((void)magnitude_features(e, 45.0, 3.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)magnitude_features(e, 3.0, 80.0),
                  std::invalid_argument);
}
