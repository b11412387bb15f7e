#ifndef SSVEP_NN_HPP
#define SSVEP_NN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssvep {

// Geometry of the two-stream net. Defaults match the production pipeline
// (C is montage dependent; B comes from the analysis band).
struct NetConfig {
  int channels = 32;        // C
  int freq_bins = 147;      // B
  int time_steps = 88;      // LSTM sequence length after downsampling
  int spatial_kernels = 8;  // channel-wise kernels in the first conv layer
  int conv_kernel_len = 11;
  int conv_stride = 2;
  int conv1_maps = 16;
  int conv2_maps = 16;
  int dense_units = 32;
  int lstm_hidden = 16;     // H
  int classes = 3;

  int conv1_out_len() const {
    return (freq_bins - conv_kernel_len) / conv_stride + 1;
  }
  int conv2_out_len() const {
    return (conv1_out_len() - conv_kernel_len) / conv_stride + 1;
  }
  int head_inputs() const { return dense_units + lstm_hidden; }
  // Total learnable parameter count (asserted against the built net).
  int64_t param_count() const;
};

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 50;
  int batch_size = 32;
  double init_sd = 1.0;  // multiplier on the sqrt(2/fan_in) weight scale
  // Decoupled L2 decay per step; without it the net memorizes small
  // training folds through the noise-dominated time branch.
  double weight_decay = 0.7;
  // Classical momentum; 50 epochs on a 72-trial fold is only ~150 SGD
  // steps, far too few for plain SGD at this learning rate.
  double momentum = 0.9;
  uint64_t rng_seed = 0;
};

// One LSTM layer's parameters; gates stacked (i, f, g, o) along rows.
struct LstmLayer {
  Eigen::MatrixXd wx;  // 4H x D
  Eigen::MatrixXd wh;  // 4H x H
  Eigen::VectorXd b;   // 4H
};

// All learnable parameters of the network. The frequency branch is a
// channel-wise spatial conv, two 1-d convs along the bin axis, and a dense
// layer; the time branch is a 3-layer LSTM; the head fuses both by
// concatenation into 3 logits.
struct TwoStreamNet {
  NetConfig cfg;

  Eigen::MatrixXd spatial_w;   // kernels x C
  Eigen::VectorXd spatial_b;   // kernels
  Eigen::MatrixXd conv1_w;     // conv1_maps x (kernels * klen)
  Eigen::VectorXd conv1_b;
  Eigen::MatrixXd conv2_w;     // conv2_maps x (conv1_maps * klen)
  Eigen::VectorXd conv2_b;
  Eigen::MatrixXd dense_w;     // dense_units x (conv2_maps * conv2_out_len)
  Eigen::VectorXd dense_b;
  std::vector<LstmLayer> lstm; // 3 layers
  Eigen::MatrixXd head_w;      // classes x head_inputs
  Eigen::VectorXd head_b;      // classes

  // Zero-filled net of the given geometry.
  explicit TwoStreamNet(const NetConfig& cfg);
  // Random-init net per the training config (normal weights, LSTM forget
  // biases at 1).
  static TwoStreamNet init(const NetConfig& cfg, const TrainConfig& tc);

  int64_t param_count() const;
  // Visit every parameter tensor in the fixed serialization order. The map
  // views the tensor's flat storage, so writes go through.
  void for_each_param(
      const std::function<void(const std::string&,
                               Eigen::Map<Eigen::VectorXd>)>& fn);
  void for_each_param(
      const std::function<void(const std::string&,
                               Eigen::Map<const Eigen::VectorXd>)>& fn) const;
};

// Mini-batch inputs. freq[i] is C x B; time is the whole batch's sequences
// stacked step-major: row (t * batch + i) holds trial i at step t, D == C.
struct BatchInput {
  std::vector<Eigen::MatrixXd> freq;
  Eigen::MatrixXd time;  // (time_steps * batch) x C
  int batch() const { return static_cast<int>(freq.size()); }
};

// Intermediates retained by forward() for backward().
struct ForwardCache;

struct ForwardResult {
  Eigen::MatrixXd logits;  // batch x classes
  std::shared_ptr<ForwardCache> cache;
};

Eigen::MatrixXd relu(const Eigen::MatrixXd& x);

// First conv layer: kernel k at bin j gives relu(b_k + sum_c input(c,j) *
// w(k,c)); output is kernels x B.
Eigen::MatrixXd channelwise_conv_forward(const Eigen::MatrixXd& input,
                                         const Eigen::MatrixXd& weights,
                                         const Eigen::VectorXd& biases);

// Final hidden state of the stacked LSTM for one sequence (rows = steps),
// zero initial state.
Eigen::VectorXd lstm_forward(const Eigen::MatrixXd& sequence,
                             const std::vector<LstmLayer>& stack);

ForwardResult forward(const TwoStreamNet& net, const BatchInput& in);

// Loss and gradient for one sample: p = softmax(logits), loss = -log p[label],
// dlogits = p - onehot(label).
std::pair<double, Eigen::VectorXd> softmax_cross_entropy(
    const Eigen::VectorXd& logits, int label);

// Mean loss over the batch plus dloss/dlogits (already divided by batch).
std::pair<double, Eigen::MatrixXd> batch_cross_entropy(
    const Eigen::MatrixXd& logits, const std::vector<int>& labels);

// Gradients, shaped exactly like the net's parameters.
struct Gradients {
  TwoStreamNet tensors;  // same geometry, parameter slots hold gradients
  explicit Gradients(const NetConfig& cfg) : tensors(cfg) {}
};

Gradients backward(const TwoStreamNet& net, const BatchInput& in,
                   const ForwardCache& cache, const Eigen::MatrixXd& dlogits);

struct DivergedError : std::runtime_error {
  DivergedError(int epoch, int batch)
      : std::runtime_error("training diverged (NaN loss) at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch)),
        epoch(epoch),
        batch(batch) {}
  int epoch;
  int batch;
};

struct TrainSample {
  Eigen::MatrixXd freq;  // C x B
  Eigen::MatrixXd time;  // time_steps x C (one trial, step-major rows)
  int label = 0;
};

// Plain mini-batch SGD, shuffled each epoch from cfg.rng_seed. Returns the
// per-epoch mean training loss.
std::vector<double> train(TwoStreamNet& net,
                          const std::vector<TrainSample>& data,
                          const TrainConfig& cfg);

// argmax class and softmax probabilities for one sample.
std::pair<int, Eigen::VectorXd> predict(const TwoStreamNet& net,
                                        const Eigen::MatrixXd& freq,
                                        const Eigen::MatrixXd& time);

// Central finite-difference check of every parameter tensor on a small batch.
// Returns (tensor name, max relative error) in serialization order.
// corrupt_tensor is a fault-injection hook: a nonempty name perturbs that
// tensor's analytic gradient so the failure path can be exercised.
std::vector<std::pair<std::string, double>> gradient_check(
    const NetConfig& cfg, uint64_t seed, double epsilon = 1e-5,
    const std::string& corrupt_tensor = {});

}  // namespace ssvep

#endif  // SSVEP_NN_HPP
