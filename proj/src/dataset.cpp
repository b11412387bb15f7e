#include "ssvep/dataset.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace ssvep {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<const Epoch*> EpochDataset::slice(int subject_id,
                                              Condition cond) const {
  std::vector<const Epoch*> out;
  for (const Epoch& e : epochs)
    if (e.subject_id == subject_id && e.condition == cond) out.push_back(&e);
  return out;
}

std::vector<int> EpochDataset::subject_ids() const {
  std::set<int> ids;
  for (const Epoch& e : epochs) ids.insert(e.subject_id);
  return std::vector<int>(ids.begin(), ids.end());
}

void save_dataset(const EpochDataset& ds, const fs::path& dir) {
  fs::create_directories(dir);
  const int c = Montage::get(ds.montage).num_channels();
  const int t = ds.num_samples;

  json manifest;
  manifest["montage"] = to_string(ds.montage);
  manifest["rate"] = ds.rate;
  manifest["num_samples"] = t;
  manifest["num_classes"] = ds.num_classes;

  std::ofstream bin(dir / "epochs.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + (dir / "epochs.bin").string());

  json trials = json::array();
  uint64_t offset = 0;
  std::vector<float> buf(static_cast<size_t>(c) * t);
  for (const Epoch& e : ds.epochs) {
    if (e.data.rows() != c || e.data.cols() != t)
      throw std::invalid_argument("save_dataset: epoch shape mismatch");
    trials.push_back({{"subject_id", e.subject_id},
                      {"condition", to_string(e.condition)},
                      {"label", e.label},
                      {"offset", offset}});
    size_t idx = 0;
    for (int ch = 0; ch < c; ++ch)
      for (int i = 0; i < t; ++i)
        buf[idx++] = static_cast<float>(e.data(ch, i));
    bin.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    offset += buf.size() * sizeof(float);
  }
  manifest["trials"] = std::move(trials);
  if (!ds.provenance_json.empty())
    manifest["provenance"] = json::parse(ds.provenance_json);

  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  mf << manifest.dump(2) << "\n";
}

EpochDataset load_dataset(const fs::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw std::runtime_error("cannot read " + (dir / "manifest.json").string());
  json manifest = json::parse(mf);

  EpochDataset ds;
  ds.montage = montage_from_string(manifest.at("montage").get<std::string>());
  ds.rate = manifest.at("rate").get<double>();
  ds.num_samples = manifest.at("num_samples").get<int>();
  ds.num_classes = manifest.at("num_classes").get<int>();
  if (manifest.contains("provenance"))
    ds.provenance_json = manifest["provenance"].dump();

  const int c = Montage::get(ds.montage).num_channels();
  const int t = ds.num_samples;

  std::ifstream bin(dir / "epochs.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot read " + (dir / "epochs.bin").string());

  std::vector<float> buf(static_cast<size_t>(c) * t);
  for (const json& trial : manifest.at("trials")) {
    Epoch e;
    e.montage = ds.montage;
    e.rate = ds.rate;
    e.subject_id = trial.at("subject_id").get<int>();
    e.condition = condition_from_string(trial.at("condition").get<std::string>());
    e.label = trial.at("label").get<int>();
    bin.seekg(static_cast<std::streamoff>(trial.at("offset").get<uint64_t>()));
    bin.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!bin) throw std::runtime_error("epochs.bin truncated");
    e.data.resize(c, t);
    size_t idx = 0;
    for (int ch = 0; ch < c; ++ch)
      for (int i = 0; i < t; ++i) e.data(ch, i) = buf[idx++];
    ds.epochs.push_back(std::move(e));
  }
  return ds;
}

}  // namespace ssvep
