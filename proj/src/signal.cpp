#include "ssvep/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace ssvep {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

// Mirror index into [0, n) with reflection at both ends (no repeated edge).
int reflect_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

}  // namespace

std::string to_string(MontageKind kind) {
  return kind == MontageKind::Scalp32 ? "scalp32" : "ear18";
}

std::string to_string(Condition cond) {
  switch (cond) {
    case Condition::Standing: return "standing";
    case Condition::Walk08: return "walk08";
    case Condition::Walk16: return "walk16";
  }
  return "standing";
}

MontageKind montage_from_string(const std::string& s) {
  if (s == "scalp32" || s == "scalp") return MontageKind::Scalp32;
  if (s == "ear18" || s == "ear") return MontageKind::Ear18;
  throw std::invalid_argument("unknown montage: " + s);
}

Condition condition_from_string(const std::string& s) {
  if (s == "standing") return Condition::Standing;
  if (s == "walk08") return Condition::Walk08;
  if (s == "walk16") return Condition::Walk16;
  throw std::invalid_argument("unknown condition: " + s);
}

Montage::Montage(MontageKind kind, std::vector<std::string> channels)
    : kind_(kind), channels_(std::move(channels)) {
  const size_t expected = kind == MontageKind::Scalp32 ? 32u : 18u;
  if (channels_.size() != expected)
    throw std::invalid_argument("montage has wrong channel count");
  std::set<std::string> unique(channels_.begin(), channels_.end());
  if (unique.size() != channels_.size())
    throw std::invalid_argument("montage has duplicate labels");
}

const Montage& Montage::scalp32() {
  static const Montage m(MontageKind::Scalp32,
                         {"Fp1", "Fp2", "AFz", "F7",  "F3",  "Fz",  "F4",
                          "F8",  "FC5", "FC1", "FC2", "FC6", "C3",  "Cz",
                          "C4",  "CP5", "CP1", "CP2", "CP6", "P7",  "P3",
                          "Pz",  "P4",  "P8",  "PO7", "PO3", "POz", "PO4",
                          "PO8", "O1",  "Oz",  "O2"});
  return m;
}

const Montage& Montage::ear18() {
  static const Montage m(MontageKind::Ear18,
                         {"L1", "L2", "L3", "L4", "L5", "L6", "L7", "L8",
                          "L9", "L10", "R1", "R2", "R3", "R4", "R5", "R6",
                          "R7", "R8"});
  return m;
}

const Montage& Montage::get(MontageKind kind) {
  return kind == MontageKind::Scalp32 ? scalp32() : ear18();
}

int Montage::index_of(const std::string& label) const {
  for (size_t i = 0; i < channels_.size(); ++i)
    if (channels_[i] == label) return static_cast<int>(i);
  return -1;
}

std::vector<double> resample(const std::vector<double>& signal,
                             double from_rate, double to_rate) {
  if (from_rate <= 0.0 || to_rate <= 0.0)
    throw std::invalid_argument("resample: rates must be positive");
  if (signal.size() < 2)
    throw std::invalid_argument("resample: signal too short");

  const int n_in = static_cast<int>(signal.size());
  const int n_out =
      static_cast<int>(std::llround(n_in * to_rate / from_rate));
  if (from_rate == to_rate) return signal;

  // Anti-aliasing cutoff as a fraction of the input Nyquist, with a little
  // rolloff headroom. For upsampling the kernel is a plain interpolator.
  const double c = std::min(1.0, to_rate / from_rate) * 0.92;
  const int half = static_cast<int>(std::ceil(32.0 / c));

  std::vector<double> out(n_out);
  for (int n = 0; n < n_out; ++n) {
    const double pos = n * from_rate / to_rate;
    const int m0 = static_cast<int>(std::floor(pos)) - half;
    const int m1 = static_cast<int>(std::floor(pos)) + half + 1;
    double acc = 0.0, wsum = 0.0;
    for (int m = m0; m <= m1; ++m) {
      const double u = (m - pos) * c;
      if (std::abs(u) > 32.0) continue;
      // Hamming window over the stretched support.
      const double w =
          sinc(u) * (0.54 + 0.46 * std::cos(kPi * u / 32.0));
      acc += w * signal[reflect_index(m, n_in)];
      wsum += w;
    }
    out[n] = wsum != 0.0 ? acc / wsum : 0.0;
  }
  return out;
}

FirFilter design_highpass(double cutoff_hz, double rate, int num_taps) {
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < rate / 2.0))
    throw std::invalid_argument("design_highpass: cutoff must be in (0, Nyquist)");
  if (num_taps % 2 == 0 || num_taps < 3)
    throw std::invalid_argument("design_highpass: num_taps must be odd and >= 3");

  const int mid = num_taps / 2;
  const double fc = cutoff_hz / rate;  // normalized to sampling rate
  std::vector<double> lp(num_taps);
  double sum = 0.0;
  for (int i = 0; i < num_taps; ++i) {
    const int k = i - mid;
    const double w =
        0.54 - 0.46 * std::cos(2.0 * kPi * i / (num_taps - 1));
    lp[i] = 2.0 * fc * sinc(2.0 * fc * k) * w;
    sum += lp[i];
  }
  // Unity DC gain for the low-pass, then spectral inversion.
  FirFilter f;
  f.taps.resize(num_taps);
  for (int i = 0; i < num_taps; ++i) f.taps[i] = -lp[i] / sum;
  f.taps[mid] += 1.0;
  f.cutoff_hz = cutoff_hz;
  f.rate = rate;
  return f;
}

double filter_response(const FirFilter& filter, double freq_hz) {
  double re = 0.0, im = 0.0;
  const double w = 2.0 * kPi * freq_hz / filter.rate;
  for (size_t k = 0; k < filter.taps.size(); ++k) {
    re += filter.taps[k] * std::cos(w * k);
    im -= filter.taps[k] * std::sin(w * k);
  }
  return std::hypot(re, im);
}

std::vector<double> filter_zero_phase(const FirFilter& filter,
                                      const std::vector<double>& signal) {
  const int nt = filter.num_taps();
  const int n = static_cast<int>(signal.size());
  if (n <= 3 * nt)
    throw std::invalid_argument("filter_zero_phase: signal too short");

  // Reflect-pad by num_taps on each side, filter forward and backward, crop.
  const int pad = nt;
  std::vector<double> ext(n + 2 * pad);
  for (int i = 0; i < n + 2 * pad; ++i)
    ext[i] = signal[reflect_index(i - pad, n)];

  auto convolve_same = [&](const std::vector<double>& x) {
    const int m = static_cast<int>(x.size());
    const int mid = nt / 2;
    std::vector<double> y(m, 0.0);
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int k = 0; k < nt; ++k) {
        const int j = i + mid - k;
        if (j >= 0 && j < m) acc += filter.taps[k] * x[j];
      }
      y[i] = acc;
    }
    return y;
  };

  std::vector<double> fwd = convolve_same(ext);
  std::reverse(fwd.begin(), fwd.end());
  std::vector<double> bwd = convolve_same(fwd);
  std::reverse(bwd.begin(), bwd.end());
  return std::vector<double>(bwd.begin() + pad, bwd.begin() + pad + n);
}

std::vector<Epoch> extract_epochs(const ContinuousRecording& rec,
                                  const std::vector<int>& onsets,
                                  double window_s,
                                  const std::vector<int>& labels) {
  if (onsets.size() != labels.size())
    throw std::invalid_argument("extract_epochs: onsets/labels length mismatch");
  const int win = static_cast<int>(std::llround(window_s * rec.rate));
  const int n = static_cast<int>(rec.data.cols());
  std::vector<Epoch> out;
  out.reserve(onsets.size());
  for (size_t i = 0; i < onsets.size(); ++i) {
    const int onset = onsets[i];
    if (onset < 0 || onset + win > n)
      throw std::invalid_argument("extract_epochs: onset " +
                                  std::to_string(onset) + " (index " +
                                  std::to_string(i) + ") out of range");
    Epoch e;
    e.montage = rec.montage;
    e.rate = rec.rate;
    e.data = rec.data.middleCols(onset, win);
    e.label = labels[i];
    e.condition = rec.condition;
    e.subject_id = rec.subject_id;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace ssvep
