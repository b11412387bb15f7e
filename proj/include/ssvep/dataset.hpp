#ifndef SSVEP_DATASET_HPP
#define SSVEP_DATASET_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "ssvep/signal.hpp"

namespace ssvep {

// A labeled epoch collection for one montage, together with its on-disk
// format: manifest.json describing the trials and epochs.bin holding the
// samples as channels x T float32 little-endian, channel-major.
struct EpochDataset {
  MontageKind montage = MontageKind::Scalp32;
  double rate = 100.0;
  int num_samples = 350;
  int num_classes = 3;
  std::vector<Epoch> epochs;
  // Free-form provenance blob stored alongside the trial list (the synthetic
  // generator records its full config here). Must be a JSON object as text.
  std::string provenance_json;

  // Trials for one (subject, condition) slice, in stored order.
  std::vector<const Epoch*> slice(int subject_id, Condition cond) const;
  std::vector<int> subject_ids() const;
};

void save_dataset(const EpochDataset& ds, const std::filesystem::path& dir);
EpochDataset load_dataset(const std::filesystem::path& dir);

}  // namespace ssvep

#endif  // SSVEP_DATASET_HPP
