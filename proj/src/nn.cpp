#include "ssvep/nn.hpp"

#include <cmath>
#include <map>

#include "ssvep/rng.hpp"

namespace ssvep {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd sigmoid(const MatrixXd& x) {
  return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

// im2col along the bin axis: column j stacks the kernel window starting at
// j*stride, rows ordered (map, offset) with offset minor.
MatrixXd im2col(const MatrixXd& in, int klen, int stride, int out_len) {
  const int maps = static_cast<int>(in.rows());
  MatrixXd col(maps * klen, out_len);
  for (int j = 0; j < out_len; ++j)
    for (int m = 0; m < maps; ++m)
      for (int q = 0; q < klen; ++q)
        col(m * klen + q, j) = in(m, j * stride + q);
  return col;
}

void col2im_add(const MatrixXd& dcol, int klen, int stride, MatrixXd& din) {
  const int maps = static_cast<int>(din.rows());
  const int out_len = static_cast<int>(dcol.cols());
  for (int j = 0; j < out_len; ++j)
    for (int m = 0; m < maps; ++m)
      for (int q = 0; q < klen; ++q)
        din(m, j * stride + q) += dcol(m * klen + q, j);
}

void check_finite(const MatrixXd& m, const char* what) {
  if (!m.allFinite())
    throw std::runtime_error(std::string("non-finite values in ") + what);
}

}  // namespace

struct ForwardCache {
  // Frequency branch, per trial.
  std::vector<MatrixXd> a0;    // kernels x B (post-ReLU)
  std::vector<MatrixXd> col1;  // (kernels*klen) x L1
  std::vector<MatrixXd> a1;    // conv1_maps x L1
  std::vector<MatrixXd> col2;
  std::vector<MatrixXd> a2;    // conv2_maps x L2
  MatrixXd flat;               // batch x (conv2_maps*L2)
  MatrixXd dense_act;          // batch x dense_units (post-ReLU)
  // Time branch, per layer; big matrices are (time_steps*batch) x H with
  // step-major row blocks.
  struct LstmCache {
    MatrixXd xin;  // layer input, (T*batch) x D
    MatrixXd gi, gf, gg, go, c, tanh_c, h;
  };
  std::vector<LstmCache> lstm;
  MatrixXd concat;  // batch x head_inputs
};

int64_t NetConfig::param_count() const {
  const int l2 = conv2_out_len();
  int64_t n = 0;
  n += static_cast<int64_t>(spatial_kernels) * channels + spatial_kernels;
  n += static_cast<int64_t>(conv1_maps) * spatial_kernels * conv_kernel_len +
       conv1_maps;
  n += static_cast<int64_t>(conv2_maps) * conv1_maps * conv_kernel_len +
       conv2_maps;
  n += static_cast<int64_t>(dense_units) * conv2_maps * l2 + dense_units;
  const int h = lstm_hidden;
  n += 4LL * h * (channels + h + 1);      // layer 1
  n += 2LL * 4LL * h * (h + h + 1);       // layers 2, 3
  n += static_cast<int64_t>(classes) * head_inputs() + classes;
  return n;
}

TwoStreamNet::TwoStreamNet(const NetConfig& c) : cfg(c) {
  if (c.conv1_out_len() < 1 || c.conv2_out_len() < 1)
    throw std::invalid_argument("net config: conv output length < 1");
  spatial_w = MatrixXd::Zero(c.spatial_kernels, c.channels);
  spatial_b = VectorXd::Zero(c.spatial_kernels);
  conv1_w = MatrixXd::Zero(c.conv1_maps, c.spatial_kernels * c.conv_kernel_len);
  conv1_b = VectorXd::Zero(c.conv1_maps);
  conv2_w = MatrixXd::Zero(c.conv2_maps, c.conv1_maps * c.conv_kernel_len);
  conv2_b = VectorXd::Zero(c.conv2_maps);
  dense_w = MatrixXd::Zero(c.dense_units, c.conv2_maps * c.conv2_out_len());
  dense_b = VectorXd::Zero(c.dense_units);
  lstm.resize(3);
  for (int l = 0; l < 3; ++l) {
    const int d = l == 0 ? c.channels : c.lstm_hidden;
    lstm[l].wx = MatrixXd::Zero(4 * c.lstm_hidden, d);
    lstm[l].wh = MatrixXd::Zero(4 * c.lstm_hidden, c.lstm_hidden);
    lstm[l].b = VectorXd::Zero(4 * c.lstm_hidden);
  }
  head_w = MatrixXd::Zero(c.classes, c.head_inputs());
  head_b = VectorXd::Zero(c.classes);
}

TwoStreamNet TwoStreamNet::init(const NetConfig& cfg, const TrainConfig& tc) {
  TwoStreamNet net(cfg);
  Rng rng(Rng::derive(tc.rng_seed, "net-init"));
  // Fan-in of each weight matrix; a fixed small sd collapses activations
  // through the five-layer frequency branch and the net never trains.
  std::map<std::string, int, std::less<>> fan_in = {
      {"spatial.w", cfg.channels},
      {"conv1.w", cfg.spatial_kernels * cfg.conv_kernel_len},
      {"conv2.w", cfg.conv1_maps * cfg.conv_kernel_len},
      {"dense.w", cfg.conv2_maps * cfg.conv2_out_len()},
      {"head.w", cfg.head_inputs()},
      {"lstm1.wx", cfg.channels},   {"lstm1.wh", cfg.lstm_hidden},
      {"lstm2.wx", cfg.lstm_hidden}, {"lstm2.wh", cfg.lstm_hidden},
      {"lstm3.wx", cfg.lstm_hidden}, {"lstm3.wh", cfg.lstm_hidden},
  };
  net.for_each_param([&](const std::string& name,
                         Eigen::Map<Eigen::VectorXd> p) {
    const auto it = fan_in.find(name);
    // Biases get a small jitter rather than exact zero so pre-activations
    // never sit on the ReLU kink.
    const double sd =
        it == fan_in.end() ? 0.01 * tc.init_sd
                           : tc.init_sd * std::sqrt(2.0 / it->second);
    for (Eigen::Index i = 0; i < p.size(); ++i)
      p[i] = rng.gaussian(0.0, sd);
    // Forget-gate biases start open so gradients flow through time early on.
    if (name.size() == 7 && name.rfind("lstm", 0) == 0 && name.ends_with(".b")) {
      const int h = cfg.lstm_hidden;
      for (int i = h; i < 2 * h; ++i) p[i] = 1.0;
    }
  });
  return net;
}

int64_t TwoStreamNet::param_count() const {
  int64_t n = 0;
  for_each_param([&](const std::string&, Eigen::Map<const Eigen::VectorXd> p) {
    n += p.size();
  });
  return n;
}

void TwoStreamNet::for_each_param(
    const std::function<void(const std::string&, Eigen::Map<Eigen::VectorXd>)>&
        fn) {
  auto visit = [&](const std::string& name, double* data, Eigen::Index n) {
    fn(name, Eigen::Map<Eigen::VectorXd>(data, n));
  };
  visit("spatial.w", spatial_w.data(), spatial_w.size());
  visit("spatial.b", spatial_b.data(), spatial_b.size());
  visit("conv1.w", conv1_w.data(), conv1_w.size());
  visit("conv1.b", conv1_b.data(), conv1_b.size());
  visit("conv2.w", conv2_w.data(), conv2_w.size());
  visit("conv2.b", conv2_b.data(), conv2_b.size());
  visit("dense.w", dense_w.data(), dense_w.size());
  visit("dense.b", dense_b.data(), dense_b.size());
  for (int l = 0; l < 3; ++l) {
    const std::string p = "lstm" + std::to_string(l + 1);
    visit(p + ".wx", lstm[l].wx.data(), lstm[l].wx.size());
    visit(p + ".wh", lstm[l].wh.data(), lstm[l].wh.size());
    visit(p + ".b", lstm[l].b.data(), lstm[l].b.size());
  }
  visit("head.w", head_w.data(), head_w.size());
  visit("head.b", head_b.data(), head_b.size());
}

void TwoStreamNet::for_each_param(
    const std::function<void(const std::string&,
                             Eigen::Map<const Eigen::VectorXd>)>& fn) const {
  const_cast<TwoStreamNet*>(this)->for_each_param(
      [&](const std::string& name, Eigen::Map<Eigen::VectorXd> p) {
        fn(name, Eigen::Map<const Eigen::VectorXd>(p.data(), p.size()));
      });
}

MatrixXd relu(const MatrixXd& x) { return x.cwiseMax(0.0); }

MatrixXd channelwise_conv_forward(const MatrixXd& input,
                                  const MatrixXd& weights,
                                  const VectorXd& biases) {
  if (weights.cols() != input.rows())
    throw std::invalid_argument(
        "channelwise_conv_forward: weight/input channel mismatch");
  if (biases.size() != weights.rows())
    throw std::invalid_argument(
        "channelwise_conv_forward: bias/kernel count mismatch");
  return relu((weights * input).colwise() + biases);
}

VectorXd lstm_forward(const MatrixXd& sequence,
                      const std::vector<LstmLayer>& stack) {
  if (sequence.rows() == 0)
    throw std::invalid_argument("lstm_forward: empty sequence");
  if (stack.empty()) throw std::invalid_argument("lstm_forward: empty stack");
  MatrixXd x = sequence;
  for (const LstmLayer& lp : stack) {
    const int h = static_cast<int>(lp.wh.rows() / 4);
    if (lp.wx.rows() != 4 * h || lp.wx.cols() != x.cols() ||
        lp.wh.cols() != h || lp.b.size() != 4 * h)
      throw std::invalid_argument("lstm_forward: layer shape mismatch");
    MatrixXd out(x.rows(), h);
    VectorXd c = VectorXd::Zero(h);
    VectorXd hs = VectorXd::Zero(h);
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
      VectorXd gates = lp.wx * x.row(t).transpose() + lp.wh * hs + lp.b;
      const auto seg = [&](int k) { return gates.segment(k * h, h); };
      const VectorXd gi = sigmoid(seg(0));
      const VectorXd gf = sigmoid(seg(1));
      const VectorXd gg = seg(2).array().tanh().matrix();
      const VectorXd go = sigmoid(seg(3));
      c = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
      hs = go.cwiseProduct(c.array().tanh().matrix());
      out.row(t) = hs.transpose();
    }
    x = std::move(out);
  }
  return x.row(x.rows() - 1).transpose();
}

ForwardResult forward(const TwoStreamNet& net, const BatchInput& in) {
  const NetConfig& cfg = net.cfg;
  const int batch = in.batch();
  if (batch == 0) throw std::invalid_argument("forward: empty batch");
  if (in.time.rows() != static_cast<Eigen::Index>(cfg.time_steps) * batch ||
      in.time.cols() != cfg.channels)
    throw std::invalid_argument("forward: time input shape mismatch (lstm)");

  auto cache = std::make_shared<ForwardCache>();
  const int l1 = cfg.conv1_out_len();
  const int l2 = cfg.conv2_out_len();

  // Frequency branch.
  cache->flat.resize(batch, cfg.conv2_maps * l2);
  for (int i = 0; i < batch; ++i) {
    const MatrixXd& x = in.freq[i];
    if (x.rows() != cfg.channels || x.cols() != cfg.freq_bins)
      throw std::invalid_argument(
          "forward: freq input shape mismatch (spatial conv)");
    MatrixXd a0 =
        relu((net.spatial_w * x).colwise() + net.spatial_b);
    MatrixXd col1 = im2col(a0, cfg.conv_kernel_len, cfg.conv_stride, l1);
    MatrixXd a1 = relu((net.conv1_w * col1).colwise() + net.conv1_b);
    MatrixXd col2 = im2col(a1, cfg.conv_kernel_len, cfg.conv_stride, l2);
    MatrixXd a2 = relu((net.conv2_w * col2).colwise() + net.conv2_b);
    for (int m = 0; m < cfg.conv2_maps; ++m)
      for (int j = 0; j < l2; ++j) cache->flat(i, m * l2 + j) = a2(m, j);
    cache->a0.push_back(std::move(a0));
    cache->col1.push_back(std::move(col1));
    cache->a1.push_back(std::move(a1));
    cache->col2.push_back(std::move(col2));
    cache->a2.push_back(std::move(a2));
  }
  cache->dense_act = relu(
      (cache->flat * net.dense_w.transpose()).rowwise() +
      net.dense_b.transpose());

  // Time branch: 3 stacked LSTM layers, zero initial state.
  const int h = cfg.lstm_hidden;
  const int steps = cfg.time_steps;
  cache->lstm.resize(3);
  for (int l = 0; l < 3; ++l) {
    auto& lc = cache->lstm[l];
    lc.xin = l == 0 ? in.time : cache->lstm[l - 1].h;
    const LstmLayer& lp = net.lstm[l];
    MatrixXd zx = (lc.xin * lp.wx.transpose()).rowwise() + lp.b.transpose();
    lc.gi.resize(steps * batch, h);
    lc.gf.resize(steps * batch, h);
    lc.gg.resize(steps * batch, h);
    lc.go.resize(steps * batch, h);
    lc.c.resize(steps * batch, h);
    lc.tanh_c.resize(steps * batch, h);
    lc.h.resize(steps * batch, h);
    MatrixXd c_prev = MatrixXd::Zero(batch, h);
    MatrixXd h_prev = MatrixXd::Zero(batch, h);
    for (int t = 0; t < steps; ++t) {
      MatrixXd gates = zx.middleRows(t * batch, batch);
      gates.noalias() += h_prev * lp.wh.transpose();
      const MatrixXd gi = sigmoid(gates.leftCols(h));
      const MatrixXd gf = sigmoid(gates.middleCols(h, h));
      const MatrixXd gg = gates.middleCols(2 * h, h).array().tanh().matrix();
      const MatrixXd go = sigmoid(gates.rightCols(h));
      const MatrixXd c = gf.cwiseProduct(c_prev) + gi.cwiseProduct(gg);
      const MatrixXd tc = c.array().tanh().matrix();
      const MatrixXd hh = go.cwiseProduct(tc);
      lc.gi.middleRows(t * batch, batch) = gi;
      lc.gf.middleRows(t * batch, batch) = gf;
      lc.gg.middleRows(t * batch, batch) = gg;
      lc.go.middleRows(t * batch, batch) = go;
      lc.c.middleRows(t * batch, batch) = c;
      lc.tanh_c.middleRows(t * batch, batch) = tc;
      lc.h.middleRows(t * batch, batch) = hh;
      c_prev = c;
      h_prev = hh;
    }
  }
  const MatrixXd h_final =
      cache->lstm[2].h.middleRows((steps - 1) * batch, batch);

  cache->concat.resize(batch, cfg.head_inputs());
  cache->concat << cache->dense_act, h_final;

  ForwardResult res;
  res.logits = (cache->concat * net.head_w.transpose()).rowwise() +
               net.head_b.transpose();
  check_finite(res.logits, "logits");
  res.cache = std::move(cache);
  return res;
}

std::pair<double, VectorXd> softmax_cross_entropy(const VectorXd& logits,
                                                  int label) {
  if (label < 0 || label >= logits.size())
    throw std::invalid_argument("softmax_cross_entropy: label out of range");
  const double m = logits.maxCoeff();
  VectorXd p = (logits.array() - m).exp();
  p /= p.sum();
  const double loss = -std::log(std::max(p[label], 1e-300));
  VectorXd grad = p;
  grad[label] -= 1.0;
  return {loss, std::move(grad)};
}

std::pair<double, MatrixXd> batch_cross_entropy(
    const MatrixXd& logits, const std::vector<int>& labels) {
  const int batch = static_cast<int>(logits.rows());
  if (static_cast<int>(labels.size()) != batch)
    throw std::invalid_argument("batch_cross_entropy: labels size mismatch");
  MatrixXd dlogits(batch, logits.cols());
  double loss = 0.0;
  for (int i = 0; i < batch; ++i) {
    auto [li, gi] = softmax_cross_entropy(logits.row(i).transpose(), labels[i]);
    loss += li;
    dlogits.row(i) = gi.transpose() / batch;
  }
  return {loss / batch, std::move(dlogits)};
}

Gradients backward(const TwoStreamNet& net, const BatchInput& in,
                   const ForwardCache& cache, const MatrixXd& dlogits) {
  const NetConfig& cfg = net.cfg;
  const int batch = in.batch();
  if (cache.concat.rows() != batch || dlogits.rows() != batch)
    throw std::logic_error("backward: cache does not match this batch");

  Gradients g(cfg);
  TwoStreamNet& gt = g.tensors;
  const int h = cfg.lstm_hidden;
  const int steps = cfg.time_steps;
  const int l1 = cfg.conv1_out_len();
  const int l2 = cfg.conv2_out_len();

  // Head.
  gt.head_w = dlogits.transpose() * cache.concat;
  gt.head_b = dlogits.colwise().sum().transpose();
  const MatrixXd dconcat = dlogits * net.head_w;
  const MatrixXd ddense = dconcat.leftCols(cfg.dense_units);
  const MatrixXd dh_final = dconcat.rightCols(h);

  // Dense layer (mask from post-activation: a > 0 <=> pre > 0).
  const MatrixXd dpre_dense =
      ddense.cwiseProduct((cache.dense_act.array() > 0.0).cast<double>().matrix());
  gt.dense_w = dpre_dense.transpose() * cache.flat;
  gt.dense_b = dpre_dense.colwise().sum().transpose();
  const MatrixXd dflat = dpre_dense * net.dense_w;

  // Conv stack, per trial.
  for (int i = 0; i < batch; ++i) {
    MatrixXd da2(cfg.conv2_maps, l2);
    for (int m = 0; m < cfg.conv2_maps; ++m)
      for (int j = 0; j < l2; ++j) da2(m, j) = dflat(i, m * l2 + j);

    const MatrixXd dpre2 = da2.cwiseProduct(
        (cache.a2[i].array() > 0.0).cast<double>().matrix());
    gt.conv2_w.noalias() += dpre2 * cache.col2[i].transpose();
    gt.conv2_b += dpre2.rowwise().sum();
    const MatrixXd dcol2 = net.conv2_w.transpose() * dpre2;
    MatrixXd da1 = MatrixXd::Zero(cfg.conv1_maps, l1);
    col2im_add(dcol2, cfg.conv_kernel_len, cfg.conv_stride, da1);

    const MatrixXd dpre1 = da1.cwiseProduct(
        (cache.a1[i].array() > 0.0).cast<double>().matrix());
    gt.conv1_w.noalias() += dpre1 * cache.col1[i].transpose();
    gt.conv1_b += dpre1.rowwise().sum();
    const MatrixXd dcol1 = net.conv1_w.transpose() * dpre1;
    MatrixXd da0 = MatrixXd::Zero(cfg.spatial_kernels, cfg.freq_bins);
    col2im_add(dcol1, cfg.conv_kernel_len, cfg.conv_stride, da0);

    const MatrixXd dpre0 = da0.cwiseProduct(
        (cache.a0[i].array() > 0.0).cast<double>().matrix());
    gt.spatial_w.noalias() += dpre0 * in.freq[i].transpose();
    gt.spatial_b += dpre0.rowwise().sum();
  }

  // LSTM stack, top layer first. dh_ext carries the gradient w.r.t. each
  // layer's output sequence.
  MatrixXd dh_ext = MatrixXd::Zero(steps * batch, h);
  dh_ext.middleRows((steps - 1) * batch, batch) = dh_final;
  for (int l = 2; l >= 0; --l) {
    const auto& lc = cache.lstm[l];
    const LstmLayer& lp = net.lstm[l];
    MatrixXd dgates_all(steps * batch, 4 * h);
    MatrixXd dh_rec = MatrixXd::Zero(batch, h);
    MatrixXd dc_carry = MatrixXd::Zero(batch, h);
    for (int t = steps - 1; t >= 0; --t) {
      const auto gi = lc.gi.middleRows(t * batch, batch);
      const auto gf = lc.gf.middleRows(t * batch, batch);
      const auto gg = lc.gg.middleRows(t * batch, batch);
      const auto go = lc.go.middleRows(t * batch, batch);
      const auto tc = lc.tanh_c.middleRows(t * batch, batch);

      const MatrixXd dh = dh_ext.middleRows(t * batch, batch) + dh_rec;
      const MatrixXd dc =
          dc_carry.array() +
          (dh.array() * go.array() * (1.0 - tc.array().square()));
      const MatrixXd dgo_pre =
          (dh.array() * tc.array() * go.array() * (1.0 - go.array())).matrix();
      const MatrixXd dgi_pre =
          (dc.array() * gg.array() * gi.array() * (1.0 - gi.array())).matrix();
      const MatrixXd dgg_pre =
          (dc.array() * gi.array() * (1.0 - gg.array().square())).matrix();
      MatrixXd dgf_pre;
      if (t > 0) {
        const auto c_prev = lc.c.middleRows((t - 1) * batch, batch);
        dgf_pre = (dc.array() * c_prev.array() * gf.array() *
                   (1.0 - gf.array()))
                      .matrix();
        dc_carry = dc.cwiseProduct(gf);
      } else {
        dgf_pre = MatrixXd::Zero(batch, h);
        dc_carry.setZero();
      }
      auto block = dgates_all.middleRows(t * batch, batch);
      block.leftCols(h) = dgi_pre;
      block.middleCols(h, h) = dgf_pre;
      block.middleCols(2 * h, h) = dgg_pre;
      block.rightCols(h) = dgo_pre;
      dh_rec.noalias() = block * lp.wh;
    }
    TwoStreamNet& dst = gt;
    dst.lstm[l].wx.noalias() = dgates_all.transpose() * lc.xin;
    MatrixXd h_prev_all = MatrixXd::Zero(steps * batch, h);
    h_prev_all.bottomRows((steps - 1) * batch) =
        lc.h.topRows((steps - 1) * batch);
    dst.lstm[l].wh.noalias() = dgates_all.transpose() * h_prev_all;
    dst.lstm[l].b = dgates_all.colwise().sum().transpose();
    if (l > 0) dh_ext.noalias() = dgates_all * lp.wx;
  }

  return g;
}

std::vector<double> train(TwoStreamNet& net,
                          const std::vector<TrainSample>& data,
                          const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  for (const TrainSample& s : data)
    if (s.label < 0 || s.label >= net.cfg.classes)
      throw std::invalid_argument("train: label out of range");

  const int n = static_cast<int>(data.size());
  const int steps = net.cfg.time_steps;
  std::vector<double> curve;
  curve.reserve(cfg.epochs);
  Rng shuffle_rng(Rng::derive(cfg.rng_seed, "train-shuffle"));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  TwoStreamNet velocity(net.cfg);  // zero-initialized momentum buffers
  std::vector<Eigen::Map<Eigen::VectorXd>> vmaps;
  velocity.for_each_param(
      [&](const std::string&, Eigen::Map<Eigen::VectorXd> v) {
        vmaps.push_back(v);
      });

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates from the dedicated stream; platform-stable.
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i],
                order[static_cast<int>(shuffle_rng.below(i + 1))]);

    double epoch_loss = 0.0;
    int batch_index = 0;
    for (int start = 0; start < n; start += cfg.batch_size, ++batch_index) {
      const int bs = std::min(cfg.batch_size, n - start);
      BatchInput in;
      in.freq.reserve(bs);
      in.time.resize(static_cast<Eigen::Index>(steps) * bs, net.cfg.channels);
      std::vector<int> labels(bs);
      for (int i = 0; i < bs; ++i) {
        const TrainSample& s = data[order[start + i]];
        in.freq.push_back(s.freq);
        for (int t = 0; t < steps; ++t)
          in.time.row(static_cast<Eigen::Index>(t) * bs + i) = s.time.row(t);
        labels[i] = s.label;
      }
      ForwardResult fr;
      try {
        fr = forward(net, in);
      } catch (const std::runtime_error&) {  // non-finite activations
        throw DivergedError(epoch, batch_index);
      }
      auto [loss, dlogits] = batch_cross_entropy(fr.logits, labels);
      if (!std::isfinite(loss)) throw DivergedError(epoch, batch_index);
      epoch_loss += loss * bs;

      Gradients grads = backward(net, in, *fr.cache, dlogits);
      std::vector<Eigen::Map<Eigen::VectorXd>> gmaps;
      grads.tensors.for_each_param(
          [&](const std::string&, Eigen::Map<Eigen::VectorXd> g) {
            gmaps.push_back(g);
          });
      const double shrink = 1.0 - cfg.learning_rate * cfg.weight_decay;
      size_t k = 0;
      net.for_each_param([&](const std::string& name,
                             Eigen::Map<Eigen::VectorXd> p) {
        Eigen::Map<Eigen::VectorXd> v = vmaps[k];
        v = cfg.momentum * v + gmaps[k];
        if (!name.ends_with(".b")) p *= shrink;  // decay weights, not biases
        p -= cfg.learning_rate * v;
        ++k;
      });
    }
    curve.push_back(epoch_loss / n);
  }
  return curve;
}

std::pair<int, VectorXd> predict(const TwoStreamNet& net,
                                 const MatrixXd& freq, const MatrixXd& time) {
  BatchInput in;
  in.freq.push_back(freq);
  in.time = time;
  const ForwardResult fr = forward(net, in);
  const VectorXd logits = fr.logits.row(0).transpose();
  const double m = logits.maxCoeff();
  VectorXd p = (logits.array() - m).exp();
  p /= p.sum();
  int cls = 0;
  p.maxCoeff(&cls);
  return {cls, std::move(p)};
}

std::vector<std::pair<std::string, double>> gradient_check(
    const NetConfig& cfg, uint64_t seed, double epsilon,
    const std::string& corrupt_tensor) {
  TrainConfig tc;
  tc.rng_seed = seed;
  tc.init_sd = 1.0;
  TwoStreamNet net = TwoStreamNet::init(cfg, tc);

  Rng rng(Rng::derive(seed, "gradcheck-data"));
  const int batch = 4;
  BatchInput in;
  std::vector<int> labels(batch);
  in.time.resize(static_cast<Eigen::Index>(cfg.time_steps) * batch,
                 cfg.channels);
  for (int i = 0; i < batch; ++i) {
    MatrixXd f(cfg.channels, cfg.freq_bins);
    for (Eigen::Index k = 0; k < f.size(); ++k) f.data()[k] = rng.gaussian();
    in.freq.push_back(std::move(f));
    labels[i] = static_cast<int>(rng.below(cfg.classes));
  }
  for (Eigen::Index k = 0; k < in.time.size(); ++k)
    in.time.data()[k] = rng.gaussian();

  auto loss_fn = [&]() {
    const ForwardResult fr = forward(net, in);
    return batch_cross_entropy(fr.logits, labels).first;
  };

  const ForwardResult fr = forward(net, in);
  const auto [loss, dlogits] = batch_cross_entropy(fr.logits, labels);
  (void)loss;
  Gradients grads = backward(net, in, *fr.cache, dlogits);
  if (!corrupt_tensor.empty()) {
    grads.tensors.for_each_param([&](const std::string& name,
                                     Eigen::Map<Eigen::VectorXd> gv) {
      if (name == corrupt_tensor) gv.array() += 0.01;
    });
  }

  std::vector<std::pair<std::string, double>> report;
  net.for_each_param([&](const std::string& name,
                         Eigen::Map<Eigen::VectorXd> p) {
    double max_rel = 0.0;
    grads.tensors.for_each_param([&](const std::string& gname,
                                     Eigen::Map<Eigen::VectorXd> gv) {
      if (gname != name) return;
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double orig = p[i];
        p[i] = orig + epsilon;
        const double lp = loss_fn();
        p[i] = orig - epsilon;
        const double lm = loss_fn();
        p[i] = orig;
        const double numeric = (lp - lm) / (2.0 * epsilon);
        const double analytic = gv[i];
        const double rel = std::abs(analytic - numeric) /
                           std::max(std::abs(analytic) + std::abs(numeric), 1e-6);
        max_rel = std::max(max_rel, rel);
      }
    });
    report.emplace_back(name, max_rel);
  });
  return report;
}

}  // namespace ssvep
