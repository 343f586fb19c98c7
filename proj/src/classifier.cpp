#include "ltgan/classifier.hpp"

#include <algorithm>
#include <numeric>

#include "ltgan/error.hpp"
#include "ltgan/io.hpp"
#include "ltgan/rng.hpp"

namespace ltgan::classifier {

nn::NetworkConfig ClassifierConfig::default_network() {
  nn::NetworkConfig c;
  c.n_layers = 3;
  c.n_neurons = 128;
  c.dropout_rate = 0.1;
  c.learning_rate = 1e-3;
  c.input_dim = 22;
  c.output_dim = 1;
  c.output_activation = nn::Activation::Sigmoid;
  return c;
}

void ClassifierConfig::validate() const {
  net.validate();
  if (net.output_dim != 1 || net.output_activation != nn::Activation::Sigmoid) {
    throw Error(Errc::InvalidArgument, "classifier needs a single sigmoid output");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(Errc::InvalidArgument, "threshold must lie in (0, 1)");
  }
  if (epochs < 1 || batch_size < 1) throw Error(Errc::InvalidArgument, "epochs and batch_size must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "train_fraction must lie in (0, 1)");
  }
}

nlohmann::json to_json(const ClassifierConfig& c) {
  return {{"net", nn::to_json(c.net)},
          {"threshold", c.threshold},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"train_fraction", c.train_fraction},
          {"balance", "undersample_majority"}};
}

ClassifierConfig classifier_config_from_json(const nlohmann::json& doc) {
  ClassifierConfig c;
  if (doc.contains("net")) c.net = nn::network_config_from_json(doc.at("net"), c.net);
  c.threshold = doc.value("threshold", c.threshold);
  c.epochs = doc.value("epochs", c.epochs);
  c.batch_size = doc.value("batch_size", c.batch_size);
  c.train_fraction = doc.value("train_fraction", c.train_fraction);
  return c;
}

nlohmann::json to_json(const Metrics& m) {
  return {{"n", m.n},         {"tp", m.tp},         {"fp", m.fp},
          {"tn", m.tn},       {"fn", m.fn},         {"accuracy", m.accuracy},
          {"precision", m.precision}, {"recall", m.recall}};
}

Classifier::Classifier(Net net, double threshold) : net_(std::move(net)), threshold_(threshold) {
  if (net_.output_dim() != 1) throw Error(Errc::DimensionMismatch, "classifier needs one output");
}

Eigen::VectorXd Classifier::predict_proba(const Eigen::MatrixXd& scaled) const {
  if (scaled.cols() == 0) return {};
  return net_.predict(scaled.cast<Real>()).row(0).transpose().cast<double>();
}

std::vector<bool> Classifier::predict_feasible(const Eigen::MatrixXd& scaled, double tau) const {
  const Eigen::VectorXd p = predict_proba(scaled);
  std::vector<bool> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p(i) >= tau;
  return out;
}

double Classifier::feasible_fraction(const Eigen::MatrixXd& scaled) const {
  const auto flags = predict_feasible(scaled);
  if (flags.empty()) return 0.0;
  return static_cast<double>(std::count(flags.begin(), flags.end(), true)) /
         static_cast<double>(flags.size());
}

nlohmann::json Classifier::to_json(std::uint64_t seed) const {
  return {{"format", "ltgan.classifier.v1"}, {"threshold", threshold_}, {"net", net_.to_json(seed)}};
}

Classifier Classifier::from_json(const nlohmann::json& doc) {
  if (doc.value("format", std::string{}) != "ltgan.classifier.v1") {
    throw Error(Errc::ParseError, "not a ltgan.classifier.v1 document");
  }
  return Classifier(Net::from_json(doc.at("net")), doc.at("threshold").get<double>());
}

void Classifier::save(const std::filesystem::path& path, std::uint64_t seed) const {
  io::write_file(path, to_json(seed).dump());
}

Classifier Classifier::load(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(io::read_file(path)));
  } catch (const nlohmann::json::exception& err) {
    throw Error(Errc::ParseError, path.string() + ": " + err.what());
  }
}

Metrics evaluate(const Classifier& model, const Eigen::MatrixXd& scaled,
                 const std::vector<bool>& labels) {
  if (static_cast<std::size_t>(scaled.cols()) != labels.size()) {
    throw Error(Errc::DimensionMismatch, "label count differs from sample count");
  }
  const auto pred = model.predict_feasible(scaled);
  Metrics m;
  m.n = labels.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (pred[i]) {
      (labels[i] ? m.tp : m.fp)++;
    } else {
      (labels[i] ? m.fn : m.tn)++;
    }
  }
  const auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  m.accuracy = ratio(m.tp + m.tn, m.n);
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  return m;
}

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(idx[j]));
  return out;
}

}  // namespace

TrainResult train_classifier(const Eigen::MatrixXd& scaled, const std::vector<bool>& labels,
                             const ClassifierConfig& config, std::uint64_t seed) {
  config.validate();
  if (static_cast<std::size_t>(scaled.cols()) != labels.size()) {
    throw Error(Errc::DimensionMismatch, "label count differs from sample count");
  }
  if (scaled.rows() != config.net.input_dim) {
    throw Error(Errc::DimensionMismatch, "feature rows differ from classifier input width");
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) {
    throw Error(Errc::SingleClass, "classifier training needs both feasible and infeasible rows");
  }
  Rng rng(mix_seed(seed, 0));
  rng.shuffle(pos.begin(), pos.end());
  rng.shuffle(neg.begin(), neg.end());
  const std::size_t per_class = std::min(pos.size(), neg.size());
  pos.resize(per_class);
  neg.resize(per_class);
  const auto n_train_class = std::max<std::size_t>(
      1, std::min(per_class - (per_class > 1 ? 1 : 0),
                  static_cast<std::size_t>(config.train_fraction * static_cast<double>(per_class))));
  std::vector<std::size_t> train_idx, test_idx;
  for (const auto* cls : {&pos, &neg}) {
    train_idx.insert(train_idx.end(), cls->begin(), cls->begin() + static_cast<std::ptrdiff_t>(n_train_class));
    test_idx.insert(test_idx.end(), cls->begin() + static_cast<std::ptrdiff_t>(n_train_class), cls->end());
  }
  std::vector<bool> train_labels, test_labels;
  for (auto i : train_idx) train_labels.push_back(labels[i]);
  for (auto i : test_idx) test_labels.push_back(labels[i]);
  const Eigen::MatrixXf x_train = gather(scaled, train_idx).cast<Real>();

  Rng init_rng(mix_seed(seed, 1));
  Rng train_rng(mix_seed(seed, 2));
  Net net(config.net, init_rng);
  nn::Adam<Real> adam(net);
  TrainResult result;
  result.n_balanced = 2 * per_class;
  std::vector<std::size_t> order(train_idx.size());
  const auto nb = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    train_rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += nb) {
      const std::size_t len = std::min(nb, order.size() - start);
      Eigen::MatrixXf xb(x_train.rows(), static_cast<Eigen::Index>(len));
      Eigen::RowVectorXd yb(static_cast<Eigen::Index>(len));
      for (std::size_t j = 0; j < len; ++j) {
        xb.col(static_cast<Eigen::Index>(j)) = x_train.col(static_cast<Eigen::Index>(order[start + j]));
        yb(static_cast<Eigen::Index>(j)) = train_labels[order[start + j]] ? 1.0 : 0.0;
      }
      const auto cache = net.forward(xb, nn::Mode::Train, &train_rng);
      const auto bce = nn::bce_loss(cache.output, yb);
      const auto grads = net.backward(cache, bce.grad.cast<Real>());
      adam.step(net, grads, config.net.learning_rate);
      loss_sum += bce.loss;
      ++batches;
    }
    result.loss_history.push_back(loss_sum / static_cast<double>(batches));
  }
  result.model = Classifier(std::move(net), config.threshold);
  result.train_metrics = evaluate(result.model, gather(scaled, train_idx), train_labels);
  if (!test_idx.empty()) result.held_out = evaluate(result.model, gather(scaled, test_idx), test_labels);
  return result;
}

}  // namespace ltgan::classifier
