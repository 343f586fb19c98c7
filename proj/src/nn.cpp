#include "ltgan/nn.hpp"

namespace ltgan::nn {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::LeakyRelu: return "leaky_relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Identity: return "identity";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  for (auto act : {Activation::LeakyRelu, Activation::Tanh, Activation::Sigmoid, Activation::Identity}) {
    if (to_string(act) == name) return act;
  }
  throw Error(Errc::ParseError, "unknown activation '" + std::string(name) + "'");
}

void NetworkConfig::validate() const {
  if (n_layers < 1) throw Error(Errc::InvalidArgument, "n_layers must be >= 1");
  if (n_neurons < 1) throw Error(Errc::InvalidArgument, "n_neurons must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(Errc::InvalidArgument, "dropout_rate must lie in [0, 1)");
  }
  if (!(learning_rate > 0.0)) throw Error(Errc::InvalidArgument, "learning_rate must be positive");
  if (input_dim < 1 || output_dim < 1) {
    throw Error(Errc::InvalidArgument, "input and output dims must be positive");
  }
  if (output_activation != Activation::Tanh && output_activation != Activation::Sigmoid) {
    throw Error(Errc::InvalidArgument, "output activation must be tanh or sigmoid");
  }
}

nlohmann::json to_json(const NetworkConfig& c) {
  return {{"n_layers", c.n_layers},
          {"n_neurons", c.n_neurons},
          {"dropout_rate", c.dropout_rate},
          {"learning_rate", c.learning_rate},
          {"input_dim", c.input_dim},
          {"output_dim", c.output_dim},
          {"output_activation", to_string(c.output_activation)}};
}

NetworkConfig network_config_from_json(const nlohmann::json& doc, NetworkConfig base) {
  NetworkConfig c = base;
  c.n_layers = doc.value("n_layers", c.n_layers);
  c.n_neurons = doc.value("n_neurons", c.n_neurons);
  c.dropout_rate = doc.value("dropout_rate", c.dropout_rate);
  c.learning_rate = doc.value("learning_rate", c.learning_rate);
  c.input_dim = doc.value("input_dim", c.input_dim);
  c.output_dim = doc.value("output_dim", c.output_dim);
  if (doc.contains("output_activation")) {
    c.output_activation = activation_from_string(doc.at("output_activation").get<std::string>());
  }
  return c;
}

}  // namespace ltgan::nn
