#include "ssvep/proposed.hpp"

#include <cmath>

#include "json.hpp"
#include "ssvep/model_io.hpp"

namespace ssvep {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSdFloor = 1e-8;

// Raw (unstandardized) inputs for one epoch: band magnitudes and the
// stride-decimated time sequence, step-major rows.
std::pair<MatrixXd, MatrixXd> raw_inputs(const Epoch& epoch) {
  const SpectralFeatures sf = magnitude_features(
      epoch, ProposedModel::kBandLoHz, ProposedModel::kBandHiHz);
  const int t = epoch.num_samples();
  const int steps = (t + ProposedModel::kTimeDownsample - 1) /
                    ProposedModel::kTimeDownsample;
  MatrixXd time(steps, epoch.num_channels());
  for (int s = 0; s < steps; ++s)
    time.row(s) = epoch.data.col(s * ProposedModel::kTimeDownsample);
  return {sf.matrix, std::move(time)};
}

std::vector<double> to_vec(const MatrixXd& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

MatrixXd from_vec(const std::vector<double>& v, Eigen::Index rows,
                  Eigen::Index cols) {
  if (static_cast<Eigen::Index>(v.size()) != rows * cols)
    throw std::runtime_error("model tensor has unexpected size");
  return Eigen::Map<const MatrixXd>(v.data(), rows, cols);
}

}  // namespace

NetConfig ProposedModel::default_config(MontageKind montage, int num_samples,
                                       double rate) {
  NetConfig cfg;
  cfg.channels = Montage::get(montage).num_channels();
  cfg.freq_bins = band_bin_count(num_samples, rate, kBandLoHz, kBandHiHz);
  cfg.time_steps = (num_samples + kTimeDownsample - 1) / kTimeDownsample;
  return cfg;
}

TrainSample ProposedModel::prepare(const Epoch& epoch) const {
  auto [freq, time] = raw_inputs(epoch);
  freq = (freq - stats_.freq_mean).cwiseQuotient(stats_.freq_sd);
  for (int c = 0; c < time.cols(); ++c)
    time.col(c) =
        (time.col(c).array() - stats_.time_mean[c]) / stats_.time_sd[c];
  TrainSample s;
  s.freq = std::move(freq);
  s.time = std::move(time);
  s.label = epoch.label;
  return s;
}

ProposedModel ProposedModel::fit(const std::vector<const Epoch*>& train,
                                 const TrainConfig& cfg) {
  if (train.empty()) throw std::invalid_argument("fit: empty training set");
  const Epoch& first = *train.front();
  const NetConfig net_cfg =
      default_config(first.montage, first.num_samples(), first.rate);

  // Training-set statistics, frozen into the model.
  std::vector<std::pair<MatrixXd, MatrixXd>> raw;
  raw.reserve(train.size());
  for (const Epoch* e : train) raw.push_back(raw_inputs(*e));

  const int n = static_cast<int>(raw.size());
  Standardizer st;
  st.freq_mean = MatrixXd::Zero(net_cfg.channels, net_cfg.freq_bins);
  for (const auto& [f, t] : raw) st.freq_mean += f;
  st.freq_mean /= n;
  st.freq_sd = MatrixXd::Zero(net_cfg.channels, net_cfg.freq_bins);
  for (const auto& [f, t] : raw)
    st.freq_sd += (f - st.freq_mean).cwiseAbs2();
  st.freq_sd = (st.freq_sd / n).cwiseSqrt().cwiseMax(kSdFloor);

  st.time_mean = VectorXd::Zero(net_cfg.channels);
  st.time_sd = VectorXd::Zero(net_cfg.channels);
  const double samples_per_ch = static_cast<double>(n) * net_cfg.time_steps;
  for (const auto& [f, t] : raw) st.time_mean += t.colwise().sum().transpose();
  st.time_mean /= samples_per_ch;
  for (const auto& [f, t] : raw)
    st.time_sd +=
        (t.rowwise() - st.time_mean.transpose()).cwiseAbs2().colwise().sum().transpose();
  st.time_sd = (st.time_sd / samples_per_ch).cwiseSqrt().cwiseMax(kSdFloor);

  ProposedModel model(TwoStreamNet::init(net_cfg, cfg), std::move(st));

  std::vector<TrainSample> samples;
  samples.reserve(train.size());
  for (const Epoch* e : train) samples.push_back(model.prepare(*e));
  model.loss_curve_ = ssvep::train(model.net_, samples, cfg);
  return model;
}

std::pair<int, VectorXd> ProposedModel::predict_proba(
    const Epoch& epoch) const {
  const TrainSample s = prepare(epoch);
  return ssvep::predict(net_, s.freq, s.time);
}

int ProposedModel::predict(const Epoch& epoch) const {
  return predict_proba(epoch).first;
}

void ProposedModel::save(const std::filesystem::path& path) const {
  ModelFile mf;
  mf.arch = "twostream";
  nlohmann::json desc;
  const NetConfig& c = net_.cfg;
  desc["channels"] = c.channels;
  desc["freq_bins"] = c.freq_bins;
  desc["time_steps"] = c.time_steps;
  desc["spatial_kernels"] = c.spatial_kernels;
  desc["conv_kernel_len"] = c.conv_kernel_len;
  desc["conv_stride"] = c.conv_stride;
  desc["conv1_maps"] = c.conv1_maps;
  desc["conv2_maps"] = c.conv2_maps;
  desc["dense_units"] = c.dense_units;
  desc["lstm_hidden"] = c.lstm_hidden;
  desc["classes"] = c.classes;
  mf.descriptor_json = desc.dump();

  net_.for_each_param([&](const std::string& name,
                          Eigen::Map<const VectorXd> p) {
    mf.tensors.emplace_back(name,
                            std::vector<double>(p.data(), p.data() + p.size()));
  });
  mf.tensors.emplace_back("stats.freq_mean", to_vec(stats_.freq_mean));
  mf.tensors.emplace_back("stats.freq_sd", to_vec(stats_.freq_sd));
  mf.tensors.emplace_back("stats.time_mean", to_vec(stats_.time_mean));
  mf.tensors.emplace_back("stats.time_sd", to_vec(stats_.time_sd));
  save_model_file(mf, path);
}

ProposedModel ProposedModel::load(const std::filesystem::path& path) {
  const ModelFile mf = load_model_file(path);
  if (mf.arch != "twostream")
    throw std::runtime_error("model file is not a twostream model");
  const nlohmann::json desc = nlohmann::json::parse(mf.descriptor_json);
  NetConfig c;
  c.channels = desc.at("channels").get<int>();
  c.freq_bins = desc.at("freq_bins").get<int>();
  c.time_steps = desc.at("time_steps").get<int>();
  c.spatial_kernels = desc.at("spatial_kernels").get<int>();
  c.conv_kernel_len = desc.at("conv_kernel_len").get<int>();
  c.conv_stride = desc.at("conv_stride").get<int>();
  c.conv1_maps = desc.at("conv1_maps").get<int>();
  c.conv2_maps = desc.at("conv2_maps").get<int>();
  c.dense_units = desc.at("dense_units").get<int>();
  c.lstm_hidden = desc.at("lstm_hidden").get<int>();
  c.classes = desc.at("classes").get<int>();

  TwoStreamNet net(c);
  net.for_each_param([&](const std::string& name,
                         Eigen::Map<VectorXd> p) {
    const std::vector<double>& v = mf.tensor(name);
    if (static_cast<Eigen::Index>(v.size()) != p.size())
      throw std::runtime_error("model tensor size mismatch: " + name);
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = v[i];
  });

  Standardizer st;
  st.freq_mean = from_vec(mf.tensor("stats.freq_mean"), c.channels, c.freq_bins);
  st.freq_sd = from_vec(mf.tensor("stats.freq_sd"), c.channels, c.freq_bins);
  st.time_mean = from_vec(mf.tensor("stats.time_mean"), c.channels, 1);
  st.time_sd = from_vec(mf.tensor("stats.time_sd"), c.channels, 1);
  return ProposedModel(std::move(net), std::move(st));
}

}  // namespace ssvep
