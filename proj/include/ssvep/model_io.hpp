#ifndef SSVEP_MODEL_IO_HPP
#define SSVEP_MODEL_IO_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ssvep {

// Shared binary model container: magic, format version, an architecture tag,
// a JSON descriptor, then named parameter tensors as 64-bit little-endian
// floats in writer order. Round-trips must be bit-exact.
struct ModelFile {
  std::string arch;                 // e.g. "twostream" or "lda"
  std::string descriptor_json;      // sizes and hyperparameters
  std::vector<std::pair<std::string, std::vector<double>>> tensors;

  const std::vector<double>& tensor(const std::string& name) const;
};

void save_model_file(const ModelFile& m, const std::filesystem::path& path);
ModelFile load_model_file(const std::filesystem::path& path);

}  // namespace ssvep

#endif  // SSVEP_MODEL_IO_HPP
