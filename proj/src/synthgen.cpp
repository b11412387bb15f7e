#include "ssvep/synthgen.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "ssvep/spectral.hpp"

namespace ssvep {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rms(const std::vector<double>& x) {
  double acc = 0.0;
  for (const double v : x) acc += v * v;
  return std::sqrt(acc / x.size());
}

double scalp_region_gain(const std::string& label) {
  static const std::vector<std::string> occipital = {
      "O1", "Oz", "O2", "PO7", "PO3", "POz", "PO4", "PO8"};
  static const std::vector<std::string> parietal = {
      "P7", "P3", "Pz", "P4", "P8", "CP5", "CP1", "CP2", "CP6"};
  static const std::vector<std::string> central = {"C3",  "Cz",  "C4", "FC5",
                                                   "FC1", "FC2", "FC6"};
  for (const auto& l : occipital)
    if (l == label) return 1.0;
  for (const auto& l : parietal)
    if (l == label) return 0.6;
  for (const auto& l : central)
    if (l == label) return 0.3;
  return 0.15;  // frontal row
}

}  // namespace

std::string to_string(SnrPreset preset) {
  switch (preset) {
    case SnrPreset::Noiseless: return "noiseless";
    case SnrPreset::High: return "high";
    case SnrPreset::PaperLike: return "paper-like";
    case SnrPreset::Hard: return "hard";
  }
  return "paper-like";
}

SnrPreset preset_from_string(const std::string& s) {
  if (s == "noiseless") return SnrPreset::Noiseless;
  if (s == "high") return SnrPreset::High;
  if (s == "paper-like") return SnrPreset::PaperLike;
  if (s == "hard") return SnrPreset::Hard;
  throw std::invalid_argument("unknown SNR preset: " + s);
}

PresetParams preset_params(SnrPreset preset) {
  switch (preset) {
    case SnrPreset::Noiseless: return {0.0, 0.0};
    case SnrPreset::High: return {0.25, 0.4};
    case SnrPreset::PaperLike: return {5.5, 3.0};
    case SnrPreset::Hard: return {10.0, 4.0};
  }
  return {4.5, 0.8};
}

std::string GenConfig::to_json() const {
  nlohmann::json j;
  j["n_subjects"] = n_subjects;
  j["trials_per_class"] = trials_per_class;
  j["stimulus_hz"] = stimulus_hz;
  j["num_samples"] = num_samples;
  j["rate"] = rate;
  j["preset"] = to_string(preset);
  j["master_seed"] = master_seed;
  return j.dump(2);
}

GenConfig GenConfig::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  GenConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "n_subjects") cfg.n_subjects = value.get<int>();
    else if (key == "trials_per_class") cfg.trials_per_class = value.get<int>();
    else if (key == "stimulus_hz") cfg.stimulus_hz = value.get<std::vector<double>>();
    else if (key == "num_samples") cfg.num_samples = value.get<int>();
    else if (key == "rate") cfg.rate = value.get<double>();
    else if (key == "preset") cfg.preset = preset_from_string(value.get<std::string>());
    else if (key == "master_seed") cfg.master_seed = value.get<uint64_t>();
    else throw std::invalid_argument("unknown config key: " + key);
  }
  if (cfg.n_subjects <= 0 || cfg.trials_per_class <= 0 || cfg.num_samples <= 0)
    throw std::invalid_argument("config counts must be positive");
  for (const double f : cfg.stimulus_hz)
    if (2.0 * f >= cfg.rate / 2.0)
      throw std::invalid_argument("stimulus frequency too high for rate");
  return cfg;
}

SubjectProfile make_profile(const GenConfig& cfg, int subject_id) {
  SubjectProfile p;
  p.subject_id = subject_id;
  p.stream_seed = Rng::derive(cfg.master_seed, "subject-profile", subject_id);
  Rng rng(p.stream_seed);

  const PresetParams params = preset_params(cfg.preset);
  // Subject-level spread around the preset's nominal SNR.
  const double gain_mult = 1.0 + 0.3 * std::tanh(rng.gaussian());
  p.noise_scale = params.noise_scale * (1.0 + 0.2 * std::tanh(rng.gaussian()));
  p.artifact_susceptibility = 1.0 + 0.3 * std::tanh(rng.gaussian());

  const auto& scalp = Montage::scalp32().channels();
  for (const auto& label : scalp) {
    p.scalp_gain.push_back(scalp_region_gain(label) * gain_mult);
    p.scalp_artifact_w.push_back(rng.uniform(0.5, 1.5));
  }
  const int ear_n = Montage::ear18().num_channels();
  for (int i = 0; i < ear_n; ++i) {
    p.ear_gain.push_back(0.3 * rng.uniform(0.8, 1.2) * gain_mult);
    p.ear_artifact_w.push_back(rng.uniform(0.5, 1.5));
  }
  for (size_t k = 0; k < cfg.stimulus_hz.size(); ++k)
    p.phase_offsets.push_back(rng.uniform(0.0, kTwoPi));
  return p;
}

ConditionSpec condition_spec(const GenConfig& cfg, Condition cond) {
  const PresetParams params = preset_params(cfg.preset);
  ConditionSpec spec;
  spec.condition = cond;
  switch (cond) {
    case Condition::Standing:
      break;
    case Condition::Walk08:
      spec.cadence_hz = 1.8;
      spec.artifact_amplitude = params.artifact_unit;
      spec.burst_rate = 0.5;
      spec.ssvep_atten = 0.95;
      break;
    case Condition::Walk16:
      spec.cadence_hz = 2.4;
      spec.artifact_amplitude = 2.0 * params.artifact_unit;
      spec.burst_rate = 1.0;
      spec.ssvep_atten = 0.9;
      break;
  }
  return spec;
}

std::vector<double> gen_ssvep(double f_hz, double gain, double phase,
                              int num_samples, double rate) {
  if (f_hz >= rate / 2.0)
    throw std::invalid_argument("gen_ssvep: frequency at or above Nyquist");
  std::vector<double> out(num_samples, 0.0);
  for (int h = 1; h <= 3; ++h) {
    if (h * f_hz >= rate / 2.0) break;
    const double amp = gain * std::pow(0.5, h - 1);
    for (int t = 0; t < num_samples; ++t)
      out[t] += amp * std::sin(kTwoPi * h * f_hz * t / rate + h * phase);
  }
  return out;
}

std::vector<double> gen_pink_noise(int num_samples, double scale, Rng& rng) {
  if (num_samples < 2)
    throw std::invalid_argument("gen_pink_noise: need T >= 2");
  // Draw the spectrum regardless of scale so the stream advances identically.
  std::vector<std::complex<double>> spec(num_samples, {0.0, 0.0});
  for (int k = 1; k <= num_samples / 2; ++k) {
    const double w = 1.0 / std::sqrt(static_cast<double>(k));
    spec[k] = {w * rng.gaussian(), w * rng.gaussian()};
    if (k != num_samples - k)
      spec[num_samples - k] = std::conj(spec[k]);
  }
  if (scale == 0.0) return std::vector<double>(num_samples, 0.0);
  fft(spec, true);
  std::vector<double> out(num_samples);
  for (int t = 0; t < num_samples; ++t) out[t] = spec[t].real();
  const double r = rms(out);
  if (r > 0.0)
    for (double& v : out) v *= scale / r;
  return out;
}

std::vector<double> gen_walking_artifact(const ConditionSpec& spec,
                                         double susceptibility,
                                         double background_rms,
                                         int num_samples, double rate,
                                         Rng& rng) {
  if (spec.cadence_hz >= rate / 8.0)
    throw std::invalid_argument("gen_walking_artifact: cadence too high");
  std::vector<double> out(num_samples, 0.0);
  if (spec.artifact_amplitude <= 0.0) return out;

  // Gait oscillation with decaying harmonics and random phases.
  const double amp = spec.artifact_amplitude * susceptibility;
  for (int h = 1; h <= 3; ++h) {
    const double ph = rng.uniform(0.0, kTwoPi);
    const double a = amp * std::pow(0.45, h - 1);
    for (int t = 0; t < num_samples; ++t)
      out[t] += a * std::sin(kTwoPi * h * spec.cadence_hz * t / rate + ph);
  }

  // Poisson-arriving EMG bursts: 50-100 ms Hann-windowed first-difference
  // white noise at 3x the background RMS.
  const double burst_rms =
      3.0 * (background_rms > 0.0 ? background_rms : amp) * susceptibility;
  double t_arrival = rng.exponential(spec.burst_rate);
  while (t_arrival * rate < num_samples) {
    const int start = static_cast<int>(t_arrival * rate);
    const int len = static_cast<int>(rng.uniform(0.050, 0.100) * rate);
    std::vector<double> burst(len + 1);
    for (double& v : burst) v = rng.gaussian();
    std::vector<double> shaped(len);
    for (int i = 0; i < len; ++i) {
      const double env =
          0.5 * (1.0 - std::cos(kTwoPi * i / std::max(1, len - 1)));
      shaped[i] = (burst[i + 1] - burst[i]) * env;
    }
    const double r = rms(shaped);
    if (r > 0.0)
      for (int i = 0; i < len && start + i < num_samples; ++i)
        out[start + i] += shaped[i] * burst_rms / r;
    t_arrival += rng.exponential(spec.burst_rate);
  }
  return out;
}

std::pair<Epoch, Epoch> gen_trial(const SubjectProfile& profile,
                                  const ConditionSpec& cond, int label,
                                  int trial_index, const GenConfig& cfg) {
  if (label < 0 || label >= static_cast<int>(cfg.stimulus_hz.size()))
    throw std::invalid_argument("gen_trial: label out of range");
  const uint64_t cond_tag = static_cast<uint64_t>(cond.condition);
  const uint64_t trial_key =
      Rng::derive(profile.stream_seed, "trial", cond_tag, label, trial_index);

  // Shared streams: phases and artifact identical for both montages.
  Rng phase_rng(Rng::derive(trial_key, "phase"));
  Rng artifact_rng(Rng::derive(trial_key, "artifact"));
  Rng scalp_noise(Rng::derive(trial_key, "noise-scalp"));
  Rng ear_noise(Rng::derive(trial_key, "noise-ear"));

  const double phase =
      profile.phase_offsets[label] + phase_rng.uniform(0.0, kTwoPi);
  const std::vector<double> tmpl = gen_ssvep(
      cfg.stimulus_hz[label], 1.0, phase, cfg.num_samples, cfg.rate);
  const std::vector<double> artifact = gen_walking_artifact(
      cond, profile.artifact_susceptibility, profile.noise_scale,
      cfg.num_samples, cfg.rate, artifact_rng);

  auto build = [&](MontageKind kind, const std::vector<double>& gains,
                   const std::vector<double>& art_w, Rng& noise_rng) {
    Epoch e;
    e.montage = kind;
    e.rate = cfg.rate;
    e.label = label;
    e.condition = cond.condition;
    e.subject_id = profile.subject_id;
    const int c = static_cast<int>(gains.size());
    // Session drift: each condition is a separate recording session, so the
    // electrode gains pick up a per-channel multiplier that is fixed within a
    // session but differs between them. Within-session evaluation never sees
    // it; cross-session transfer does.
    Rng drift_rng(Rng::derive(profile.stream_seed, "session-drift", cond_tag,
                              static_cast<uint64_t>(kind)));
    std::vector<double> drift(c), response(c);
    for (double& d : drift) d = drift_rng.uniform(0.7, 1.3);
    // Electrode repositioning between sessions also reshapes which channels
    // pick up the SSVEP itself, not just the overall gain; the reshaping is
    // worse the more the subject moves.
    const double spread = cond_tag == 0 ? 0.7 : (cond_tag == 1 ? 0.9 : 1.2);
    for (double& r : response)
      r = drift_rng.uniform(1.0 - spread, 1.0 + spread);
    e.data.resize(c, cfg.num_samples);
    for (int ch = 0; ch < c; ++ch) {
      const std::vector<double> noise =
          gen_pink_noise(cfg.num_samples, profile.noise_scale, noise_rng);
      for (int t = 0; t < cfg.num_samples; ++t)
        e.data(ch, t) =
            drift[ch] * (cond.ssvep_atten * response[ch] * gains[ch] * tmpl[t] +
                         noise[t] +
                         art_w[ch] * artifact[t]);
    }
    return e;
  };

  Epoch scalp = build(MontageKind::Scalp32, profile.scalp_gain,
                      profile.scalp_artifact_w, scalp_noise);
  Epoch ear = build(MontageKind::Ear18, profile.ear_gain,
                    profile.ear_artifact_w, ear_noise);
  return {std::move(scalp), std::move(ear)};
}

SyntheticDataset gen_dataset(const GenConfig& cfg) {
  SyntheticDataset ds;
  ds.cfg = cfg;
  for (EpochDataset* set : {&ds.scalp, &ds.ear}) {
    set->rate = cfg.rate;
    set->num_samples = cfg.num_samples;
    set->num_classes = static_cast<int>(cfg.stimulus_hz.size());
    set->provenance_json = cfg.to_json();
  }
  ds.scalp.montage = MontageKind::Scalp32;
  ds.ear.montage = MontageKind::Ear18;

  const std::vector<Condition> conditions = {
      Condition::Standing, Condition::Walk08, Condition::Walk16};
  for (int s = 1; s <= cfg.n_subjects; ++s) {
    const SubjectProfile profile = make_profile(cfg, s);
    for (const Condition cond : conditions) {
      const ConditionSpec spec = condition_spec(cfg, cond);
      for (int trial = 0; trial < cfg.trials_per_class; ++trial) {
        for (int k = 0; k < static_cast<int>(cfg.stimulus_hz.size()); ++k) {
          auto [scalp, ear] = gen_trial(profile, spec, k, trial, cfg);
          ds.scalp.epochs.push_back(std::move(scalp));
          ds.ear.epochs.push_back(std::move(ear));
        }
      }
    }
  }
  return ds;
}

}  // namespace ssvep
