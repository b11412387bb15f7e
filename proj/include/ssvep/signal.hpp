#ifndef SSVEP_SIGNAL_HPP
#define SSVEP_SIGNAL_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ssvep {

enum class MontageKind { Scalp32, Ear18 };

enum class Condition { Standing, Walk08, Walk16 };

std::string to_string(MontageKind kind);
std::string to_string(Condition cond);
MontageKind montage_from_string(const std::string& s);
Condition condition_from_string(const std::string& s);

// Fixed channel set for one recording modality. The two montages are the
// 32-channel cap layout (Fp1 .. O2) and the 18-channel around-the-ear grid
// (L1-L10, R1-R8). Construction through the factories is the only way to get
// one, so a malformed montage cannot exist.
class Montage {
public:
  static const Montage& scalp32();
  static const Montage& ear18();
  static const Montage& get(MontageKind kind);

  MontageKind kind() const { return kind_; }
  int num_channels() const { return static_cast<int>(channels_.size()); }
  const std::vector<std::string>& channels() const { return channels_; }
  // Index of a label, -1 if absent.
  int index_of(const std::string& label) const;

private:
  Montage(MontageKind kind, std::vector<std::string> channels);
  MontageKind kind_;
  std::vector<std::string> channels_;
};

struct ContinuousRecording {
  MontageKind montage;
  double rate = 0.0;                 // samples/second
  Eigen::MatrixXd data;              // channels x samples
  Condition condition = Condition::Standing;
  int subject_id = 1;
};

// One trial: channels x T samples at the working rate, plus its label.
struct Epoch {
  MontageKind montage;
  double rate = 0.0;
  Eigen::MatrixXd data;              // channels x T
  int label = 0;                     // class index in {0,1,2}
  Condition condition = Condition::Standing;
  int subject_id = 1;

  int num_channels() const { return static_cast<int>(data.rows()); }
  int num_samples() const { return static_cast<int>(data.cols()); }
};

// Linear-phase FIR filter, symmetric odd-length taps.
struct FirFilter {
  std::vector<double> taps;
  double cutoff_hz = 0.0;
  double rate = 0.0;

  int num_taps() const { return static_cast<int>(taps.size()); }
};

// Windowed-sinc resampling between arbitrary positive rates.
// Output length = round(len * to_rate / from_rate).
std::vector<double> resample(const std::vector<double>& signal,
                             double from_rate, double to_rate);

// Windowed-sinc (Hamming) high-pass by spectral inversion of the
// complementary low-pass. num_taps must be odd.
FirFilter design_highpass(double cutoff_hz, double rate, int num_taps);

// Magnitude response |H(f)| by direct DTFT evaluation of the taps.
double filter_response(const FirFilter& filter, double freq_hz);

// Forward-backward application with reflect padding; zero phase, |H|^2
// effective magnitude, output length == input length.
std::vector<double> filter_zero_phase(const FirFilter& filter,
                                      const std::vector<double>& signal);

// Slice fixed-length windows out of a recording. onsets are sample indices;
// each epoch covers [onset, onset + round(window_s * rate)).
std::vector<Epoch> extract_epochs(const ContinuousRecording& rec,
                                  const std::vector<int>& onsets,
                                  double window_s,
                                  const std::vector<int>& labels);

}  // namespace ssvep

#endif  // SSVEP_SIGNAL_HPP
