#include "ssvep/model_io.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace ssvep {

namespace {

constexpr char kMagic[8] = {'S', 'S', 'V', 'E', 'P', 'M', 'D', 'L'};
constexpr uint32_t kVersion = 1;

void write_string(std::ofstream& out, const std::string& s) {
  const uint32_t n = static_cast<uint32_t>(s.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(s.data(), n);
}

std::string read_string(std::ifstream& in) {
  uint32_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}

}  // namespace

const std::vector<double>& ModelFile::tensor(const std::string& name) const {
  for (const auto& [n, v] : tensors)
    if (n == name) return v;
  throw std::invalid_argument("model file has no tensor named " + name);
}

void save_model_file(const ModelFile& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  write_string(out, m.arch);
  write_string(out, m.descriptor_json);
  const uint32_t count = static_cast<uint32_t>(m.tensors.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const auto& [name, data] : m.tensors) {
    write_string(out, name);
    const uint64_t len = data.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(len * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ModelFile load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 8) != std::string(kMagic, 8))
    throw std::runtime_error("not a model file: " + path.string());
  uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kVersion)
    throw std::runtime_error("unsupported model format version");
  ModelFile m;
  m.arch = read_string(in);
  m.descriptor_json = read_string(in);
  uint32_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = read_string(in);
    uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::vector<double> data(len);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(len * sizeof(double)));
    if (!in) throw std::runtime_error("model file truncated: " + path.string());
    m.tensors.emplace_back(std::move(name), std::move(data));
  }
  return m;
}

}  // namespace ssvep
