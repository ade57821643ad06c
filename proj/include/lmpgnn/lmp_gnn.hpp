#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lmpgnn/errors.hpp"
#include "lmpgnn/graph.hpp"
#include "lmpgnn/lp_update.hpp"
#include "lmpgnn/spectral.hpp"

namespace lmpgnn {

// Spectral GNN whose layer is the lp adaptive update with a trainable
// diagonal spectral filter theta and bias per layer:
//   x_{l+1} = act(x_l + mu * U diag(theta_l) U^T (|eps|^(p-1) o sign(eps)) + b_l),
//   eps     = D_S(y - x_l).
// Parameters are trained online by gradient descent on the lp loss of the
// final layer's error; gradients are hand-derived (the architecture is small
// and fixed). p = 2 gives the LMS-GNN, p = 1 the Sign-GNN.

enum class Activation { identity, leaky_relu, tanh };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::tanh: return "tanh";
  }
  return "?";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "leaky_relu") return Activation::leaky_relu;
  if (s == "tanh") return Activation::tanh;
  throw ParameterError("unknown activation '" + s + "'");
}

inline double activate(Activation a, double slope, double x) {
  switch (a) {
    case Activation::identity: return x;
    case Activation::leaky_relu: return x > 0.0 ? x : slope * x;
    case Activation::tanh: return std::tanh(x);
  }
  return x;
}

inline double activate_derivative(Activation a, double slope, double x) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::leaky_relu: return x > 0.0 ? 1.0 : slope;
    case Activation::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

struct LmpGnnLayer {
  Vec theta;  // trainable diagonal spectral filter
  Vec bias;   // trainable bias
  double step_size = 0.5;  // mu
  double p = 2.0;
  Activation activation = Activation::identity;
  double leaky_slope = 0.01;

  void validate(int n) const {
    if (theta.size() != n || bias.size() != n)
      throw DimensionError("layer parameter length != N");
    if (!theta.allFinite() || !bias.allFinite())
      throw ParameterError("layer parameters must be finite");
    if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("p must be in [1, 2]");
    if (!(step_size > 0.0)) throw ParameterError("mu must be positive");
  }
};

/// One generic layer: act(x + mu U diag(theta) U^T lp(eps) + bias).
inline Vec layer_forward(const LmpGnnLayer& layer, const Vec& x,
                         const Vec& eps, const GftBasis& basis) {
  if (x.size() != basis.n() || eps.size() != basis.n())
    throw DimensionError("signal length != N");
  layer.validate(basis.n());
  const Mat& u = basis.eigenvectors();
  const Vec v = u.transpose() * lp_error_transform(eps, layer.p);
  Vec pre = x + layer.step_size * (u * layer.theta.cwiseProduct(v)) + layer.bias;
  for (Eigen::Index i = 0; i < pre.size(); ++i)
    pre[i] = activate(layer.activation, layer.leaky_slope, pre[i]);
  return pre;
}

/// Dedicated Sign-GNN layer: the error enters only through its sign, no power
/// evaluation on the forward path.
inline Vec sign_layer_forward(const LmpGnnLayer& layer, const Vec& x,
                              const Vec& eps, const GftBasis& basis) {
  if (x.size() != basis.n() || eps.size() != basis.n())
    throw DimensionError("signal length != N");
  const Mat& u = basis.eigenvectors();
  Vec s(eps.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) s[i] = sign(eps[i]);
  const Vec v = u.transpose() * s;
  Vec pre = x + layer.step_size * (u * layer.theta.cwiseProduct(v)) + layer.bias;
  for (Eigen::Index i = 0; i < pre.size(); ++i)
    pre[i] = activate(layer.activation, layer.leaky_slope, pre[i]);
  return pre;
}

/// Dedicated LMS-GNN layer: the raw error drives the update.
inline Vec lms_layer_forward(const LmpGnnLayer& layer, const Vec& x,
                             const Vec& eps, const GftBasis& basis) {
  if (x.size() != basis.n() || eps.size() != basis.n())
    throw DimensionError("signal length != N");
  const Mat& u = basis.eigenvectors();
  const Vec v = u.transpose() * eps;
  Vec pre = x + layer.step_size * (u * layer.theta.cwiseProduct(v)) + layer.bias;
  for (Eigen::Index i = 0; i < pre.size(); ++i)
    pre[i] = activate(layer.activation, layer.leaky_slope, pre[i]);
  return pre;
}

struct LmpGnnNetwork {
  std::vector<LmpGnnLayer> layers;
  std::shared_ptr<const GftBasis> basis;
  double learning_rate = 1e-3;   // eta
  double grad_smoothing = 1e-6;  // delta_grad
  // When set, eps_l is treated as a constant per layer during backprop
  // instead of propagating through x_l's dependence on earlier parameters.
  bool stop_gradient = false;

  int n() const { return basis ? basis->n() : 0; }
  int depth() const { return static_cast<int>(layers.size()); }

  void validate() const {
    if (!basis) throw ParameterError("network has no basis");
    if (layers.empty()) throw ParameterError("network needs at least one layer");
    if (!(learning_rate >= 0.0)) throw ParameterError("eta must be >= 0");
    if (!(grad_smoothing > 0.0)) throw ParameterError("delta_grad must be positive");
    for (const auto& l : layers) l.validate(n());
  }
};

/// Uniform-layer network; theta starts as the given spectral response (the
/// bandlimited indicator of the classical baselines), biases start at zero.
inline LmpGnnNetwork make_network(std::shared_ptr<const GftBasis> basis,
                                  int n_layers, double p, double mu,
                                  double eta, const SpectralFilter& theta_init,
                                  Activation activation = Activation::identity,
                                  double delta_grad = 1e-6,
                                  double leaky_slope = 0.01) {
  if (!basis) throw ParameterError("null basis");
  if (n_layers < 1) throw ParameterError("need at least one layer");
  if (theta_init.n() != basis->n())
    throw DimensionError("theta_init length != N");
  LmpGnnNetwork net;
  net.basis = std::move(basis);
  net.learning_rate = eta;
  net.grad_smoothing = delta_grad;
  net.layers.resize(n_layers);
  for (auto& l : net.layers) {
    l.theta = theta_init.response();
    l.bias = Vec::Zero(theta_init.n());
    l.step_size = mu;
    l.p = p;
    l.activation = activation;
    l.leaky_slope = leaky_slope;
  }
  net.validate();
  return net;
}

struct LayerCache {
  Vec x_in;        // layer input x_l
  Vec eps;         // D_S(y - x_l)
  Vec g_spectrum;  // U^T lp(eps)
  Vec preact;      // pre-activation output
};

struct ForwardPass {
  Vec prediction;  // x_L
  std::vector<LayerCache> layers;
};

/// Forward through all layers, recomputing eps from the same y at every
/// layer. Caches intermediates for backprop.
inline ForwardPass network_forward(const LmpGnnNetwork& net, const Vec& x_hat,
                                   const Vec& y, const SamplingMask& mask) {
  net.validate();
  if (x_hat.size() != net.n() || y.size() != net.n())
    throw DimensionError("signal length != N");
  const Mat& u = net.basis->eigenvectors();
  ForwardPass fwd;
  fwd.layers.reserve(net.layers.size());
  Vec x = x_hat;
  for (int l = 0; l < net.depth(); ++l) {
    const LmpGnnLayer& layer = net.layers[l];
    LayerCache cache;
    cache.x_in = x;
    cache.eps = mask.apply(y - x);
    cache.g_spectrum = u.transpose() * lp_error_transform(cache.eps, layer.p);
    cache.preact = x +
                   layer.step_size * (u * layer.theta.cwiseProduct(cache.g_spectrum)) +
                   layer.bias;
    x.resize(cache.preact.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = activate(layer.activation, layer.leaky_slope, cache.preact[i]);
    if (!x.allFinite()) throw DivergenceError(-1, l);
    fwd.layers.push_back(std::move(cache));
  }
  fwd.prediction = std::move(x);
  return fwd;
}

/// Training loss J = sum_i |(D_S(y - x_L))_i|^p / |S|.
inline double lp_loss(const Vec& masked_error, double p, int observed_count) {
  if (observed_count == 0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < masked_error.size(); ++i)
    acc += std::pow(std::abs(masked_error[i]), p);
  return acc / observed_count;
}

inline double training_loss(const LmpGnnNetwork& net, const Vec& x_hat,
                            const Vec& y, const SamplingMask& mask) {
  const ForwardPass fwd = network_forward(net, x_hat, y, mask);
  const double p = net.layers.back().p;
  return lp_loss(mask.apply(y - fwd.prediction), p, mask.observed_count());
}

struct GradientSet {
  std::vector<Vec> theta;
  std::vector<Vec> bias;
  double loss = 0.0;
};

/// Backpropagate the lp loss through the cached forward pass.
inline GradientSet backward(const LmpGnnNetwork& net, const ForwardPass& fwd,
                            const Vec& y, const SamplingMask& mask) {
  const Mat& u = net.basis->eigenvectors();
  const int depth = net.depth();
  const int n_obs = mask.observed_count();
  GradientSet grads;
  grads.theta.resize(depth);
  grads.bias.resize(depth);

  const double p_loss = net.layers.back().p;
  const Vec eps_out = mask.apply(y - fwd.prediction);
  grads.loss = lp_loss(eps_out, p_loss, n_obs);

  // dJ/dx_L; lp_error_transform of a masked error is already zero at
  // unobserved nodes.
  Vec delta = Vec::Zero(net.n());
  if (n_obs > 0) delta = -(p_loss / n_obs) * lp_error_transform(eps_out, p_loss);

  for (int l = depth - 1; l >= 0; --l) {
    const LmpGnnLayer& layer = net.layers[l];
    const LayerCache& cache = fwd.layers[l];
    Vec du(delta.size());
    for (Eigen::Index i = 0; i < du.size(); ++i)
      du[i] = delta[i] * activate_derivative(layer.activation,
                                             layer.leaky_slope,
                                             cache.preact[i]);
    grads.bias[l] = du;
    grads.theta[l] =
        layer.step_size * (u.transpose() * du).cwiseProduct(cache.g_spectrum);
    if (l == 0) break;
    if (net.stop_gradient) {
      delta = std::move(du);
      continue;
    }
    // Through the error path: d eps / d x_l = -D_S.
    const Vec bdu = u * layer.theta.cwiseProduct(u.transpose() * du);
    const Vec gp =
        lp_error_transform_derivative(cache.eps, layer.p, net.grad_smoothing);
    delta = du - layer.step_size * mask.apply(gp.cwiseProduct(bdu));
  }
  return grads;
}

struct UpdateResult {
  LmpGnnNetwork net;
  Vec prediction;
  double loss = 0.0;
};

/// One online step: forward, backprop, gradient-descent parameter update.
/// The returned prediction (x_L) is the estimate for the next timestep.
inline UpdateResult online_update(const LmpGnnNetwork& net, const Vec& x_hat,
                                  const Vec& y, const SamplingMask& mask,
                                  long timestep = -1) {
  ForwardPass fwd;
  try {
    fwd = network_forward(net, x_hat, y, mask);
  } catch (const DivergenceError& e) {
    throw DivergenceError(timestep, e.layer());
  }
  const GradientSet grads = backward(net, fwd, y, mask);
  UpdateResult out;
  out.net = net;
  out.prediction = fwd.prediction;
  out.loss = grads.loss;
  for (int l = 0; l < net.depth(); ++l) {
    out.net.layers[l].theta -= net.learning_rate * grads.theta[l];
    out.net.layers[l].bias -= net.learning_rate * grads.bias[l];
    if (!out.net.layers[l].theta.allFinite() ||
        !out.net.layers[l].bias.allFinite())
      throw DivergenceError(timestep, l);
  }
  return out;
}

struct PretrainSpec {
  int train_prefix = 0;  // observations [0, train_prefix) form the training set
  int epochs = 0;
};

struct GnnRunResult {
  std::vector<Vec> predictions;  // one per test timestep, never saw its y[t]
  LmpGnnNetwork net;
};

/// Optional multi-epoch pretraining over the training prefix (each epoch
/// replays the prefix from the initial estimate; parameters persist), then an
/// online pass over the test timesteps. predictions[i] is the estimate before
/// ingesting observation train_prefix + i.
inline GnnRunResult run_online_gnn(LmpGnnNetwork net,
                                   std::span<const Vec> observations,
                                   const SamplingMask& mask,
                                   const Vec& initial_estimate,
                                   const PretrainSpec& pretrain) {
  if (observations.empty()) throw ParameterError("observations must be nonempty");
  if (pretrain.train_prefix < 0 ||
      pretrain.train_prefix > static_cast<int>(observations.size()))
    throw ParameterError("train_prefix out of range");
  Vec x = initial_estimate;
  for (int e = 0; e < pretrain.epochs; ++e) {
    x = initial_estimate;
    for (int t = 0; t < pretrain.train_prefix; ++t) {
      UpdateResult r = online_update(net, x, observations[t], mask, t);
      net = std::move(r.net);
      x = std::move(r.prediction);
    }
  }
  GnnRunResult out;
  out.predictions.reserve(observations.size() - pretrain.train_prefix);
  for (int t = pretrain.train_prefix;
       t < static_cast<int>(observations.size()); ++t) {
    out.predictions.push_back(x);
    UpdateResult r = online_update(net, x, observations[t], mask, t);
    net = std::move(r.net);
    x = std::move(r.prediction);
  }
  out.net = std::move(net);
  return out;
}

// ---------------------------------------------------------------------------
// Checkpointing: versioned text format, one value per token at full double
// precision. Header carries N, L, p; then theta and bias per layer.

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void save_checkpoint(const LmpGnnNetwork& net, const std::string& path) {
  net.validate();
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open for writing");
  const LmpGnnLayer& first = net.layers.front();
  out << "lmpgnn-checkpoint 1\n";
  out << "n " << net.n() << "\n";
  out << "layers " << net.depth() << "\n";
  out << "p " << detail::format_double(first.p) << "\n";
  out << "mu " << detail::format_double(first.step_size) << "\n";
  out << "eta " << detail::format_double(net.learning_rate) << "\n";
  out << "delta_grad " << detail::format_double(net.grad_smoothing) << "\n";
  out << "activation " << to_string(first.activation) << "\n";
  out << "leaky_slope " << detail::format_double(first.leaky_slope) << "\n";
  out << "stop_gradient " << (net.stop_gradient ? 1 : 0) << "\n";
  for (int l = 0; l < net.depth(); ++l) {
    out << "layer " << l << " theta";
    for (Eigen::Index i = 0; i < net.layers[l].theta.size(); ++i)
      out << " " << detail::format_double(net.layers[l].theta[i]);
    out << "\nlayer " << l << " bias";
    for (Eigen::Index i = 0; i < net.layers[l].bias.size(); ++i)
      out << " " << detail::format_double(net.layers[l].bias[i]);
    out << "\n";
  }
  if (!out) throw ParseError(path, 0, "write failed");
}

inline LmpGnnNetwork load_checkpoint(const std::string& path,
                                     std::shared_ptr<const GftBasis> basis) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open");
  std::string line;
  long lineno = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError(path, lineno, "unexpected end of file");
    ++lineno;
    return std::istringstream(line);
  };
  auto expect_key = [&](std::istringstream& is, const std::string& key) {
    std::string k;
    is >> k;
    if (k != key) throw ParseError(path, lineno, "expected '" + key + "'");
  };

  {
    auto is = next_line();
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "lmpgnn-checkpoint" || version != 1)
      throw ParseError(path, lineno, "not a version-1 checkpoint");
  }
  int n = 0, depth = 0, stop_grad = 0;
  double p = 2.0, mu = 0.0, eta = 0.0, delta_grad = 1e-6, slope = 0.01;
  std::string act_name = "identity";
  {
    auto is = next_line(); expect_key(is, "n"); is >> n;
    is = next_line(); expect_key(is, "layers"); is >> depth;
    is = next_line(); expect_key(is, "p"); is >> p;
    is = next_line(); expect_key(is, "mu"); is >> mu;
    is = next_line(); expect_key(is, "eta"); is >> eta;
    is = next_line(); expect_key(is, "delta_grad"); is >> delta_grad;
    is = next_line(); expect_key(is, "activation"); is >> act_name;
    is = next_line(); expect_key(is, "leaky_slope"); is >> slope;
    is = next_line(); expect_key(is, "stop_gradient"); is >> stop_grad;
  }
  if (basis && basis->n() != n)
    throw DimensionError("checkpoint N does not match basis");
  LmpGnnNetwork net;
  net.basis = std::move(basis);
  net.learning_rate = eta;
  net.grad_smoothing = delta_grad;
  net.stop_gradient = stop_grad != 0;
  net.layers.resize(depth);
  for (int l = 0; l < depth; ++l) {
    LmpGnnLayer& layer = net.layers[l];
    layer.p = p;
    layer.step_size = mu;
    layer.activation = activation_from_string(act_name);
    layer.leaky_slope = slope;
    for (const char* part : {"theta", "bias"}) {
      auto is = next_line();
      expect_key(is, "layer");
      int idx = -1;
      std::string which;
      is >> idx >> which;
      if (idx != l || which != part)
        throw ParseError(path, lineno, std::string("expected layer ") +
                                           std::to_string(l) + " " + part);
      Vec v(n);
      for (int i = 0; i < n; ++i)
        if (!(is >> v[i]))
          throw ParseError(path, lineno, "expected " + std::to_string(n) + " values");
      (which == "theta" ? layer.theta : layer.bias) = std::move(v);
    }
  }
  if (net.basis) net.validate();
  return net;
}

}  // namespace lmpgnn
