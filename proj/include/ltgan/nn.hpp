#pragma once

// Dense feed-forward networks with inverted dropout, manual backpropagation
// and Adam. Batches are column-major: one sample per column.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ltgan/error.hpp"
#include "ltgan/rng.hpp"

namespace ltgan::nn {

enum class Activation { LeakyRelu, Tanh, Sigmoid, Identity };
enum class Mode { Train, Eval };

inline constexpr double kLeakySlope = 0.2;

std::string_view to_string(Activation act);
Activation activation_from_string(std::string_view name);

// L hidden layers of n_neurons each, followed by the output layer.
struct NetworkConfig {
  int n_layers = 1;
  int n_neurons = 16;
  double dropout_rate = 0.0;
  double learning_rate = 1e-3;
  int input_dim = 1;
  int output_dim = 1;
  Activation output_activation = Activation::Sigmoid;

  void validate() const;
  bool operator==(const NetworkConfig&) const = default;
};

nlohmann::json to_json(const NetworkConfig& config);
// Keys absent from doc keep the values in base.
NetworkConfig network_config_from_json(const nlohmann::json& doc, NetworkConfig base = {});

template <typename Scalar>
struct DenseLayer {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix weights;  // out x in
  Vector bias;     // out
  Activation activation = Activation::Identity;
  double dropout = 0.0;  // applied to this layer's output in train mode

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
};

template <typename Scalar>
struct Gradients {
  std::vector<typename DenseLayer<Scalar>::Matrix> weights;
  std::vector<typename DenseLayer<Scalar>::Vector> bias;
  typename DenseLayer<Scalar>::Matrix input;  // dL/dx, filled on request
};

template <typename Scalar>
class DenseNet;

// Intermediates of one forward pass; consumed by backward().
template <typename Scalar>
struct ForwardCache {
  using Matrix = typename DenseLayer<Scalar>::Matrix;

  std::vector<Matrix> inputs;     // layer inputs a_{l-1}
  std::vector<Matrix> activated;  // act(z_l) before dropout
  std::vector<Matrix> masks;      // scaled keep masks; empty matrix when unused
  Matrix output;
  const DenseNet<Scalar>* owner = nullptr;
  std::uint64_t version = 0;
};

namespace detail {

template <typename Derived>
void apply_activation(Eigen::MatrixBase<Derived>& z, Activation act) {
  using S = typename Derived::Scalar;
  switch (act) {
    case Activation::LeakyRelu:
      z = z.unaryExpr([](S v) { return v > S(0) ? v : S(kLeakySlope) * v; });
      break;
    case Activation::Tanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::Sigmoid:
      z = z.unaryExpr([](S v) { return S(1) / (S(1) + std::exp(-v)); });
      break;
    case Activation::Identity:
      break;
  }
}

// Multiplies grad in place by act'(z), expressed through the activated value.
template <typename Matrix>
void scale_by_derivative(Matrix& grad, const Matrix& activated, Activation act) {
  using S = typename Matrix::Scalar;
  switch (act) {
    case Activation::LeakyRelu:
      grad.array() *= activated.array().unaryExpr([](S a) { return a > S(0) ? S(1) : S(kLeakySlope); });
      break;
    case Activation::Tanh:
      grad.array() *= S(1) - activated.array().square();
      break;
    case Activation::Sigmoid:
      grad.array() *= activated.array() * (S(1) - activated.array());
      break;
    case Activation::Identity:
      break;
  }
}

}  // namespace detail

template <typename Scalar>
class DenseNet {
 public:
  using Layer = DenseLayer<Scalar>;
  using Matrix = typename Layer::Matrix;
  using Vector = typename Layer::Vector;
  using Cache = ForwardCache<Scalar>;

  DenseNet() = default;

  // Uniform weights with bound gain / sqrt(fan_in). Hidden layers use the
  // leaky-rectifier He gain sqrt(6 / (1 + slope^2)); the output layer uses
  // gain 1 so untrained heads sit near their midpoint. Biases start at zero.
  DenseNet(const NetworkConfig& config, Rng& rng) : config_(config) {
    config.validate();
    const double leaky_gain = std::sqrt(6.0 / (1.0 + kLeakySlope * kLeakySlope));
    int in = config.input_dim;
    for (int l = 0; l <= config.n_layers; ++l) {
      const bool output = l == config.n_layers;
      const int out = output ? config.output_dim : config.n_neurons;
      Layer layer;
      layer.activation = output ? config.output_activation : Activation::LeakyRelu;
      layer.dropout = output ? 0.0 : config.dropout_rate;
      const double bound = (output ? 1.0 : leaky_gain) / std::sqrt(static_cast<double>(in));
      layer.weights.resize(out, in);
      for (Eigen::Index r = 0; r < out; ++r) {
        for (Eigen::Index c = 0; c < in; ++c) {
          layer.weights(r, c) = static_cast<Scalar>(rng.uniform(-bound, bound));
        }
      }
      layer.bias = Vector::Zero(out);
      layers_.push_back(std::move(layer));
      in = out;
    }
  }

  explicit DenseNet(std::vector<Layer> layers) : layers_(std::move(layers)) { check_chain(); }

  const std::vector<Layer>& layers() const { return layers_; }
  // Mutable access invalidates outstanding caches.
  std::vector<Layer>& mutable_layers() {
    ++version_;
    return layers_;
  }
  const NetworkConfig& config() const { return config_; }
  void set_config(const NetworkConfig& config) { config_ = config; }
  std::uint64_t version() const { return version_; }

  Eigen::Index input_dim() const { return layers_.front().in_dim(); }
  Eigen::Index output_dim() const { return layers_.back().out_dim(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
  }

  // Train mode draws fresh dropout masks from rng (required when any layer
  // has dropout). Eval mode never touches rng.
  Cache forward(const Matrix& x, Mode mode, Rng* rng = nullptr) const {
    return run(x, mode, rng, nullptr);
  }

  // Train-mode pass reusing the masks of an earlier cache.
  Cache forward_with_masks(const Matrix& x, const std::vector<Matrix>& masks) const {
    return run(x, Mode::Train, nullptr, &masks);
  }

  Matrix predict(const Matrix& x) const { return forward(x, Mode::Eval).output; }

  Gradients<Scalar> backward(const Cache& cache, const Matrix& output_grad,
                             bool want_input_grad = false) const {
    if (cache.owner != this || cache.version != version_) {
      throw Error(Errc::StaleCache, "forward cache does not match the current parameters");
    }
    if (output_grad.rows() != output_dim() || output_grad.cols() != cache.output.cols()) {
      throw Error(Errc::DimensionMismatch, "output gradient shape mismatch");
    }
    const std::size_t n = layers_.size();
    Gradients<Scalar> grads;
    grads.weights.resize(n);
    grads.bias.resize(n);
    Matrix delta = output_grad;
    for (std::size_t l = n; l-- > 0;) {
      const Layer& layer = layers_[l];
      if (cache.masks[l].size() > 0) delta.array() *= cache.masks[l].array();
      detail::scale_by_derivative(delta, cache.activated[l], layer.activation);
      grads.weights[l].noalias() = delta * cache.inputs[l].transpose();
      grads.bias[l] = delta.rowwise().sum();
      if (l > 0 || want_input_grad) {
        Matrix upstream = layer.weights.transpose() * delta;
        delta = std::move(upstream);
      }
    }
    if (want_input_grad) grads.input = std::move(delta);
    return grads;
  }

  nlohmann::json to_json(std::uint64_t seed = 0) const;
  static DenseNet from_json(const nlohmann::json& doc);

 private:
  void check_chain() const {
    if (layers_.empty()) throw Error(Errc::InvalidArgument, "network has no layers");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      if (layer.bias.size() != layer.out_dim()) {
        throw Error(Errc::DimensionMismatch, "bias length differs from layer width");
      }
      if (l > 0 && layers_[l - 1].out_dim() != layer.in_dim()) {
        throw Error(Errc::DimensionMismatch, "layer dimensions do not chain");
      }
      if (!(layer.dropout >= 0.0 && layer.dropout < 1.0)) {
        throw Error(Errc::InvalidArgument, "dropout must lie in [0, 1)");
      }
    }
  }

  Cache run(const Matrix& x, Mode mode, Rng* rng, const std::vector<Matrix>* fixed_masks) const {
    if (x.rows() != input_dim() || x.cols() < 1) {
      throw Error(Errc::DimensionMismatch, "input has " + std::to_string(x.rows()) +
                                               " rows, network expects " +
                                               std::to_string(input_dim()));
    }
    Cache cache;
    cache.owner = this;
    cache.version = version_;
    const std::size_t n = layers_.size();
    cache.inputs.reserve(n);
    cache.activated.reserve(n);
    cache.masks.resize(n);
    Matrix a = x;
    for (std::size_t l = 0; l < n; ++l) {
      const Layer& layer = layers_[l];
      Matrix z = layer.weights * a;
      z.colwise() += layer.bias;
      detail::apply_activation(z, layer.activation);
      cache.inputs.push_back(std::move(a));
      a = z;
      if (mode == Mode::Train && layer.dropout > 0.0) {
        Matrix& mask = cache.masks[l];
        if (fixed_masks) {
          mask = (*fixed_masks)[l];
        } else {
          if (!rng) throw Error(Errc::InvalidArgument, "train-mode dropout needs an Rng");
          const double keep = 1.0 - layer.dropout;
          const Scalar scale = static_cast<Scalar>(1.0 / keep);
          mask.resize(z.rows(), z.cols());
          for (Eigen::Index i = 0; i < mask.size(); ++i) {
            mask.data()[i] = rng->uniform() < keep ? scale : Scalar(0);
          }
        }
        a.array() *= mask.array();
      }
      cache.activated.push_back(std::move(z));
    }
    cache.output = std::move(a);
    return cache;
  }

  std::vector<Layer> layers_;
  NetworkConfig config_;
  std::uint64_t version_ = 0;
};

struct BceResult {
  double loss = 0.0;
  Eigen::RowVectorXd grad;  // dLoss/dprediction
};

inline constexpr double kBceEpsilon = 1e-7;

// Mean binary cross-entropy with predictions clamped to [eps, 1 - eps]. The
// gradient is the analytic derivative evaluated at the clamped prediction.
template <typename Derived>
BceResult bce_loss(const Eigen::MatrixBase<Derived>& predictions, const Eigen::RowVectorXd& labels) {
  if (predictions.size() != labels.size() || labels.size() == 0) {
    throw Error(Errc::DimensionMismatch, "bce_loss: prediction/label length mismatch");
  }
  const auto n = labels.size();
  BceResult out;
  out.grad.resize(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = std::clamp(static_cast<double>(predictions(i)), kBceEpsilon, 1.0 - kBceEpsilon);
    const double y = labels(i);
    total += y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    out.grad(i) = (-(y / p) + (1.0 - y) / (1.0 - p)) / static_cast<double>(n);
  }
  out.loss = -total / static_cast<double>(n);
  return out;
}

// Adam with bias-corrected moments.
template <typename Scalar>
class Adam {
 public:
  using Matrix = typename DenseLayer<Scalar>::Matrix;
  using Vector = typename DenseLayer<Scalar>::Vector;

  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  Adam() = default;
  explicit Adam(const DenseNet<Scalar>& net) { reset(net); }

  void reset(const DenseNet<Scalar>& net) {
    step_ = 0;
    m_w_.clear();
    v_w_.clear();
    m_b_.clear();
    v_b_.clear();
    for (const auto& l : net.layers()) {
      m_w_.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
      v_w_.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
      m_b_.push_back(Vector::Zero(l.bias.size()));
      v_b_.push_back(Vector::Zero(l.bias.size()));
    }
  }

  std::uint64_t steps() const { return step_; }
  const std::vector<Matrix>& first_moment_weights() const { return m_w_; }
  const std::vector<Matrix>& second_moment_weights() const { return v_w_; }

  void step(DenseNet<Scalar>& net, const Gradients<Scalar>& grads, double learning_rate) {
    auto& layers = net.mutable_layers();
    if (layers.size() != m_w_.size() || grads.weights.size() != layers.size()) {
      throw Error(Errc::DimensionMismatch, "optimizer state does not match the network");
    }
    ++step_;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
    for (std::size_t l = 0; l < layers.size(); ++l) {
      update(layers[l].weights, grads.weights[l], m_w_[l], v_w_[l], learning_rate, c1, c2);
      update(layers[l].bias, grads.bias[l], m_b_[l], v_b_[l], learning_rate, c1, c2);
    }
  }

 private:
  template <typename Param, typename Grad>
  void update(Param& param, const Grad& grad, Param& m, Param& v, double lr, double c1, double c2) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols()) {
      throw Error(Errc::DimensionMismatch, "gradient shape differs from parameter shape");
    }
    const Scalar b1 = static_cast<Scalar>(beta1), b2 = static_cast<Scalar>(beta2);
    m = b1 * m + (Scalar(1) - b1) * grad;
    v = b2 * v + (Scalar(1) - b2) * grad.cwiseAbs2();
    const Scalar step_size = static_cast<Scalar>(lr / c1);
    const Scalar inv_c2 = static_cast<Scalar>(1.0 / c2);
    const Scalar eps = static_cast<Scalar>(epsilon);
    param.array() -= step_size * m.array() / ((v.array() * inv_c2).sqrt() + eps);
  }

  std::uint64_t step_ = 0;
  std::vector<Matrix> m_w_, v_w_;
  std::vector<Vector> m_b_, v_b_;
};

template <typename Scalar>
nlohmann::json DenseNet<Scalar>::to_json(std::uint64_t seed) const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : layers_) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.weights.size()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(static_cast<double>(l.weights(r, c)));
    }
    std::vector<double> b(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back({{"in", l.in_dim()},
                      {"out", l.out_dim()},
                      {"activation", nn::to_string(l.activation)},
                      {"dropout", l.dropout},
                      {"weights", std::move(w)},
                      {"bias", std::move(b)}});
  }
  return {{"format", "ltgan.densenet.v1"},
          {"scalar", sizeof(Scalar) == 4 ? "float32" : "float64"},
          {"config", nn::to_json(config_)},
          {"seed", seed},
          {"layers", std::move(layers)}};
}

template <typename Scalar>
DenseNet<Scalar> DenseNet<Scalar>::from_json(const nlohmann::json& doc) {
  if (doc.value("format", std::string{}) != "ltgan.densenet.v1") {
    throw Error(Errc::ParseError, "not a ltgan.densenet.v1 document");
  }
  std::vector<Layer> layers;
  for (const auto& jl : doc.at("layers")) {
    Layer l;
    const auto in = jl.at("in").get<Eigen::Index>();
    const auto out = jl.at("out").get<Eigen::Index>();
    const auto w = jl.at("weights").get<std::vector<double>>();
    const auto b = jl.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != in * out || static_cast<Eigen::Index>(b.size()) != out) {
      throw Error(Errc::ParseError, "layer array lengths do not match its shape");
    }
    l.weights.resize(out, in);
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) l.weights(r, c) = static_cast<Scalar>(w[r * in + c]);
    }
    l.bias.resize(out);
    for (Eigen::Index r = 0; r < out; ++r) l.bias(r) = static_cast<Scalar>(b[r]);
    l.activation = activation_from_string(jl.at("activation").get<std::string>());
    l.dropout = jl.at("dropout").get<double>();
    layers.push_back(std::move(l));
  }
  DenseNet net(std::move(layers));
  if (doc.contains("config")) net.config_ = network_config_from_json(doc.at("config"));
  return net;
}

}  // namespace ltgan::nn
