#ifndef SSVEP_SYNTHGEN_HPP
#define SSVEP_SYNTHGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ssvep/dataset.hpp"
#include "ssvep/rng.hpp"
#include "ssvep/signal.hpp"

namespace ssvep {

enum class SnrPreset { Noiseless, High, PaperLike, Hard };

std::string to_string(SnrPreset preset);
SnrPreset preset_from_string(const std::string& s);

struct GenConfig {
  int n_subjects = 13;
  int trials_per_class = 30;
  std::vector<double> stimulus_hz = {60.0 / 11.0, 60.0 / 7.0, 60.0 / 5.0};
  int num_samples = 350;
  double rate = 100.0;
  SnrPreset preset = SnrPreset::PaperLike;
  uint64_t master_seed = 1;

  std::string to_json() const;
  static GenConfig from_json(const std::string& text);
};

// Noise / artifact scales implied by a preset. The paper-like scale was
// calibrated once against the standing ear-EEG CCA band and is frozen here.
struct PresetParams {
  double noise_scale = 0.0;     // background pink-noise RMS
  double artifact_unit = 0.0;   // cadence-oscillation base amplitude
};
PresetParams preset_params(SnrPreset preset);

// Per-subject randomization, drawn deterministically from the master seed.
struct SubjectProfile {
  int subject_id = 1;
  std::vector<double> scalp_gain;      // per scalp channel
  std::vector<double> ear_gain;        // per ear channel
  std::vector<double> scalp_artifact_w;
  std::vector<double> ear_artifact_w;
  double noise_scale = 0.0;
  double artifact_susceptibility = 1.0;
  std::vector<double> phase_offsets;   // one per stimulus
  uint64_t stream_seed = 0;
};

SubjectProfile make_profile(const GenConfig& cfg, int subject_id);

struct ConditionSpec {
  Condition condition = Condition::Standing;
  double cadence_hz = 0.0;
  double artifact_amplitude = 0.0;
  double burst_rate = 0.0;   // EMG bursts per second
  double ssvep_atten = 1.0;  // gait reduces visual phase-locking
};

ConditionSpec condition_spec(const GenConfig& cfg, Condition cond);

// Harmonic SSVEP template: gain * sum_{h=1..3} 0.5^{h-1} sin(2 pi h f t +
// h*phase); harmonics at or above Nyquist are dropped.
std::vector<double> gen_ssvep(double f_hz, double gain, double phase,
                              int num_samples, double rate);

// 1/f-shaped Gaussian noise with exact RMS = scale.
std::vector<double> gen_pink_noise(int num_samples, double scale, Rng& rng);

// Cadence oscillation (3 harmonics, random phases) plus Poisson EMG bursts.
// background_rms sets the burst amplitude (3x background).
std::vector<double> gen_walking_artifact(const ConditionSpec& spec,
                                         double susceptibility,
                                         double background_rms,
                                         int num_samples, double rate,
                                         Rng& rng);

// Simultaneous scalp and ear epochs for one trial; both share the SSVEP
// phases and the artifact realization.
std::pair<Epoch, Epoch> gen_trial(const SubjectProfile& profile,
                                  const ConditionSpec& cond, int label,
                                  int trial_index, const GenConfig& cfg);

struct SyntheticDataset {
  EpochDataset scalp;
  EpochDataset ear;
  GenConfig cfg;
};

SyntheticDataset gen_dataset(const GenConfig& cfg);

}  // namespace ssvep

#endif  // SSVEP_SYNTHGEN_HPP
