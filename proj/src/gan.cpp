#include "ltgan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ltgan/io.hpp"
#include "ltgan/stats.hpp"

namespace ltgan::gan {

namespace {

nn::NetworkConfig make_net(int layers, int neurons, double dropout, double lr, int in, int out,
                           nn::Activation head) {
  nn::NetworkConfig c;
  c.n_layers = layers;
  c.n_neurons = neurons;
  c.dropout_rate = dropout;
  c.learning_rate = lr;
  c.input_dim = in;
  c.output_dim = out;
  c.output_activation = head;
  return c;
}

constexpr int kDim = static_cast<int>(kFeatureDim);

GanConfig with_nets(int gl, int gn, double gd, double glr, int dl, int dn, double dd, double dlr) {
  GanConfig c;
  c.gen = make_net(gl, gn, gd, glr, c.noise_dim, kDim, nn::Activation::Tanh);
  c.dis = make_net(dl, dn, dd, dlr, kDim, 1, nn::Activation::Sigmoid);
  return c;
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Healthy: return "Healthy";
    case Verdict::ModeCollapse: return "ModeCollapse";
    case Verdict::Diverged: return "Diverged";
  }
  return "unknown";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Completed: return "Completed";
    case Outcome::Collapsed: return "Collapsed";
    case Outcome::Diverged: return "Diverged";
  }
  return "unknown";
}

GanConfig GanConfig::best_observed() { return with_nets(20, 250, 0.5, 1.5e-4, 6, 300, 0.4, 2e-4); }

GanConfig GanConfig::collapse_prone() { return with_nets(20, 300, 0.5, 2e-4, 6, 250, 0.5, 1.75e-4); }

GanConfig GanConfig::desk() {
  GanConfig c = with_nets(4, 256, 0.0, 2e-4, 3, 256, 0.0, 2e-4);
  c.batch_size = 64;
  c.n_epochs = 400;
  return c;
}

void GanConfig::validate() const {
  gen.validate();
  dis.validate();
  if (noise_dim < 1 || batch_size < 1 || n_epochs < 1) {
    throw Error(Errc::InvalidArgument, "noise_dim, batch_size and n_epochs must be >= 1");
  }
  if (gen.input_dim != noise_dim) throw Error(Errc::InvalidArgument, "generator input must equal noise_dim");
  if (gen.output_dim != kDim || dis.input_dim != kDim || dis.output_dim != 1) {
    throw Error(Errc::InvalidArgument, "generator must emit and discriminator must read 22 features");
  }
  if (gen.output_activation != nn::Activation::Tanh || dis.output_activation != nn::Activation::Sigmoid) {
    throw Error(Errc::InvalidArgument, "generator head must be tanh and discriminator head sigmoid");
  }
  if (!(flip_factor >= 0.0 && flip_factor < 0.5)) {
    throw Error(Errc::InvalidArgument, "flip_factor must lie in [0, 0.5)");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw Error(Errc::InvalidArgument, "adam_beta1 must lie in [0, 1)");
  if (n_val < 1 || thresholds.n_bins < 1 || thresholds.patience < 1 || thresholds.warmup_epochs < 0) {
    throw Error(Errc::InvalidArgument, "invalid validation settings");
  }
}

nlohmann::json to_json(const GanConfig& c) {
  const auto& t = c.thresholds;
  return {{"gen", nn::to_json(c.gen)},
          {"dis", nn::to_json(c.dis)},
          {"noise_dim", c.noise_dim},
          {"batch_size", c.batch_size},
          {"n_epochs", c.n_epochs},
          {"flip_factor", c.flip_factor},
          {"adam_beta1", c.adam_beta1},
          {"n_val", c.n_val},
          {"seed", c.seed},
          {"thresholds",
           {{"coverage", t.coverage},
            {"divergence_floor", t.divergence_floor},
            {"warmup_epochs", t.warmup_epochs},
            {"patience", t.patience},
            {"n_bins", t.n_bins},
            {"s_gen_band", {t.s_gen_lo, t.s_gen_hi}},
            {"s_dis_band", {t.s_dis_lo, t.s_dis_hi}}}}};
}

GanConfig gan_config_from_json(const nlohmann::json& doc) {
  GanConfig c = GanConfig::best_observed();
  if (doc.contains("gen")) c.gen = nn::network_config_from_json(doc.at("gen"), c.gen);
  if (doc.contains("dis")) c.dis = nn::network_config_from_json(doc.at("dis"), c.dis);
  c.noise_dim = doc.value("noise_dim", c.noise_dim);
  c.batch_size = doc.value("batch_size", c.batch_size);
  c.n_epochs = doc.value("n_epochs", c.n_epochs);
  c.flip_factor = doc.value("flip_factor", c.flip_factor);
  c.adam_beta1 = doc.value("adam_beta1", c.adam_beta1);
  c.n_val = doc.value("n_val", c.n_val);
  c.seed = doc.value("seed", c.seed);
  if (doc.contains("thresholds")) {
    const auto& j = doc.at("thresholds");
    auto& t = c.thresholds;
    t.coverage = j.value("coverage", t.coverage);
    t.divergence_floor = j.value("divergence_floor", t.divergence_floor);
    t.warmup_epochs = j.value("warmup_epochs", t.warmup_epochs);
    t.patience = j.value("patience", t.patience);
    t.n_bins = j.value("n_bins", t.n_bins);
    if (j.contains("s_gen_band")) {
      t.s_gen_lo = j.at("s_gen_band").at(0);
      t.s_gen_hi = j.at("s_gen_band").at(1);
    }
    if (j.contains("s_dis_band")) {
      t.s_dis_lo = j.at("s_dis_band").at(0);
      t.s_dis_hi = j.at("s_dis_band").at(1);
    }
  }
  return c;
}

Matrix sample_noise(int m, int n, Rng& rng) {
  if (m < 1 || n < 1) throw Error(Errc::InvalidArgument, "noise dimensions must be positive");
  Matrix z(m, n);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = static_cast<Real>(rng.normal());
  return z;
}

std::size_t validation_cadence(std::size_t n_train, std::size_t n_b) {
  if (n_b < 1 || n_train < n_b) throw Error(Errc::InvalidArgument, "need N_train >= N_b >= 1");
  return n_train / n_b;
}

Gan::Gan(const GanConfig& config) : config_(config), rng_(mix_seed(config.seed, 2)) {
  config_.validate();
  Rng gen_init(mix_seed(config.seed, 0));
  Rng dis_init(mix_seed(config.seed, 1));
  gen_ = Net(config_.gen, gen_init);
  dis_ = Net(config_.dis, dis_init);
  gen_opt_.reset(gen_);
  dis_opt_.reset(dis_);
  gen_opt_.beta1 = dis_opt_.beta1 = config_.adam_beta1;
}

Gan::DisStep Gan::discriminator_step(const Matrix& real_batch) {
  if (real_batch.rows() != kDim || real_batch.cols() < 1) {
    throw Error(Errc::DimensionMismatch, "real batch must be 22 x N_b");
  }
  const Eigen::Index nb = real_batch.cols();
  const Matrix fake = gen_.forward(sample_noise(config_.noise_dim, static_cast<int>(nb), rng_),
                                   nn::Mode::Train, &rng_)
                          .output;
  Matrix joint(kDim, 2 * nb);
  joint << real_batch, fake;
  Eigen::RowVectorXd labels(2 * nb);
  labels.head(nb).setOnes();
  labels.tail(nb).setZero();
  const auto n_flip = static_cast<Eigen::Index>(std::lround(config_.flip_factor * static_cast<double>(nb)));
  if (n_flip > 0) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(nb));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    rng_.shuffle(idx.begin(), idx.end());
    for (Eigen::Index i = 0; i < n_flip; ++i) labels(idx[static_cast<std::size_t>(i)]) = 0.0;
  }
  const auto cache = dis_.forward(joint, nn::Mode::Train, &rng_);
  const auto bce = nn::bce_loss(cache.output, labels);
  if (!std::isfinite(bce.loss)) throw Error(Errc::Diverged, "non-finite discriminator loss");
  DisStep out;
  out.loss = bce.loss;
  out.scores = compute_scores(cache.output.leftCols(nb), cache.output.rightCols(nb));
  dis_opt_.step(dis_, dis_.backward(cache, bce.grad.cast<Real>()), config_.dis.learning_rate);
  return out;
}

double Gan::generator_step(Eigen::Index n) {
  const auto gen_cache =
      gen_.forward(sample_noise(config_.noise_dim, static_cast<int>(n), rng_), nn::Mode::Train, &rng_);
  const auto probe = dis_.forward(gen_cache.output, nn::Mode::Train, &rng_);
  const auto bce = nn::bce_loss(probe.output, Eigen::RowVectorXd::Ones(n));
  if (!std::isfinite(bce.loss)) throw Error(Errc::Diverged, "non-finite generator loss");
  const auto through = dis_.backward(probe, bce.grad.cast<Real>(), true);
  gen_opt_.step(gen_, gen_.backward(gen_cache, through.input), config_.gen.learning_rate);
  return bce.loss;
}

StepMetrics Gan::train_step(const Matrix& real_batch) {
  StepMetrics m;
  m.iter = ++iter_;
  const auto dis = discriminator_step(real_batch);
  m.dis_loss = dis.loss;
  m.s_gen = dis.scores.s_gen;
  m.s_dis = dis.scores.s_dis;
  m.gen_loss = generator_step(real_batch.cols());
  return m;
}

Matrix Gan::generate(int n, Rng& rng) const {
  return gen_.predict(sample_noise(config_.noise_dim, n, rng));
}

double validate_epoch(const Net& generator, const classifier::Classifier& clf, int n_val, Rng& rng) {
  if (n_val < 1) throw Error(Errc::InvalidArgument, "n_val must be >= 1");
  const Matrix samples =
      generator.predict(sample_noise(static_cast<int>(generator.input_dim()), n_val, rng));
  return clf.feasible_fraction(samples.cast<double>());
}

RealStats RealStats::from_scaled(const Eigen::MatrixXd& scaled) {
  if (scaled.rows() != kDim || scaled.cols() < 1) {
    throw Error(Errc::DimensionMismatch, "real set must be 22 x N with N >= 1");
  }
  RealStats s;
  for (std::size_t f = 0; f < kFeatureDim; ++f) {
    const auto row = scaled.row(static_cast<Eigen::Index>(f));
    s.sorted[f].assign(row.begin(), row.end());
    std::sort(s.sorted[f].begin(), s.sorted[f].end());
    s.lo[f] = s.sorted[f].front();
    s.hi[f] = s.sorted[f].back();
  }
  return s;
}

nlohmann::json to_json(const CollapseReport& r) {
  nlohmann::json features = nlohmann::json::object();
  for (std::size_t f = 0; f < kFeatureDim; ++f) {
    features[std::string(feature_names()[f])] = {{"coverage", r.coverage[f]}, {"ks", r.ks[f]}};
  }
  return {{"verdict", to_string(r.verdict)},
          {"mean_coverage", r.mean_coverage},
          {"validation_accuracy", r.validation_accuracy},
          {"n_samples", r.n_samples},
          {"features", std::move(features)}};
}

CollapseReport detect_collapse(const Eigen::MatrixXd& generated, const RealStats& real,
                               const Thresholds& thresholds, double validation_accuracy,
                               bool after_warmup) {
  if (generated.rows() != kDim || generated.cols() < 1) {
    throw Error(Errc::DimensionMismatch, "generated set must be 22 x n");
  }
  CollapseReport r;
  r.n_samples = static_cast<std::size_t>(generated.cols());
  r.validation_accuracy = validation_accuracy;
  const auto bins = static_cast<std::size_t>(thresholds.n_bins);
  double total = 0.0;
  for (std::size_t f = 0; f < kFeatureDim; ++f) {
    const auto row = generated.row(static_cast<Eigen::Index>(f));
    std::vector<double> gen(row.begin(), row.end());
    std::sort(gen.begin(), gen.end());
    const auto real_hist = stats::histogram(real.sorted[f], real.lo[f], real.hi[f], bins);
    const auto gen_hist = stats::histogram(gen, real.lo[f], real.hi[f], bins);
    std::size_t occupied = 0, hit = 0;
    for (std::size_t b = 0; b < bins; ++b) {
      if (real_hist[b] == 0) continue;
      ++occupied;
      if (gen_hist[b] > 0) ++hit;
    }
    r.coverage[f] = occupied ? static_cast<double>(hit) / static_cast<double>(occupied) : 0.0;
    r.ks[f] = stats::ks_statistic(gen, real.sorted[f]);
    total += r.coverage[f];
  }
  r.mean_coverage = total / static_cast<double>(kFeatureDim);
  if (after_warmup && validation_accuracy < thresholds.divergence_floor) {
    r.verdict = Verdict::Diverged;
  } else if (r.mean_coverage < thresholds.coverage) {
    r.verdict = Verdict::ModeCollapse;
  }
  return r;
}

TrainResult train(const GanConfig& config, const Eigen::MatrixXd& real_scaled,
                  const classifier::Classifier& clf, const EpochCallback& on_epoch) {
  config.validate();
  if (real_scaled.rows() != kDim) throw Error(Errc::DimensionMismatch, "real set must be 22 x N");
  const auto n_train = static_cast<std::size_t>(real_scaled.cols());
  const auto nb = static_cast<std::size_t>(config.batch_size);
  const std::size_t cadence = validation_cadence(n_train, nb);
  const Matrix real = real_scaled.cast<Real>();
  const RealStats stats = RealStats::from_scaled(real_scaled);

  Gan gan(config);
  Rng shuffle_rng(mix_seed(config.seed, 3));
  Rng val_rng(mix_seed(config.seed, 4));
  TrainResult result;
  result.generator = gan.generator();
  std::vector<std::size_t> order(n_train);
  int collapse_streak = 0;
  Matrix batch(kDim, static_cast<Eigen::Index>(nb));

  for (int epoch = 1; epoch <= config.n_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_rng.shuffle(order.begin(), order.end());
    EpochSummary summary;
    summary.epoch = epoch;
    try {
      for (std::size_t it = 0; it < cadence; ++it) {
        for (std::size_t j = 0; j < nb; ++j) {
          batch.col(static_cast<Eigen::Index>(j)) = real.col(static_cast<Eigen::Index>(order[it * nb + j]));
        }
        auto m = gan.train_step(batch);
        m.epoch = epoch;
        summary.gen_loss += m.gen_loss;
        summary.dis_loss += m.dis_loss;
        summary.s_gen += m.s_gen;
        summary.s_dis += m.s_dis;
        result.history.push_back(m);
      }
    } catch (const Error& err) {
      if (err.code() != Errc::Diverged) throw;
      result.outcome = Outcome::Diverged;
      result.last_report.verdict = Verdict::Diverged;
      break;
    }
    const double k = static_cast<double>(cadence);
    summary.gen_loss /= k;
    summary.dis_loss /= k;
    summary.s_gen /= k;
    summary.s_dis /= k;

    const Matrix samples = gan.generate(config.n_val, val_rng);
    const Eigen::MatrixXd samples_d = samples.cast<double>();
    summary.val_acc = clf.feasible_fraction(samples_d);
    const bool warmed = epoch > config.thresholds.warmup_epochs;
    result.last_report = detect_collapse(samples_d, stats, config.thresholds, summary.val_acc, warmed);
    summary.mean_coverage = result.last_report.mean_coverage;
    summary.verdict = result.last_report.verdict;
    result.history.back().val_acc = summary.val_acc;
    result.epochs.push_back(summary);
    if (on_epoch) on_epoch(summary);

    if (summary.verdict == Verdict::Healthy &&
        (!result.best_epoch || summary.val_acc > result.best_val_acc)) {
      result.best_epoch = epoch;
      result.best_val_acc = summary.val_acc;
      result.generator = gan.generator();
    }
    if (!warmed) continue;
    if (summary.verdict == Verdict::Diverged) {
      result.outcome = Outcome::Diverged;
      break;
    }
    collapse_streak = summary.verdict == Verdict::ModeCollapse ? collapse_streak + 1 : 0;
    if (collapse_streak >= config.thresholds.patience) {
      result.outcome = Outcome::Collapsed;
      break;
    }
  }
  if (!result.best_epoch) result.generator = gan.generator();
  result.discriminator = gan.discriminator();
  return result;
}

std::vector<FeatureVector> sample_transfers(const Net& generator, int n,
                                            const pipeline::ScalingSpec& scaling, Rng& rng) {
  if (generator.output_dim() != kDim) throw Error(Errc::DimensionMismatch, "generator must emit 22 features");
  const Matrix scaled = generator.predict(sample_noise(static_cast<int>(generator.input_dim()), n, rng));
  return pipeline::unscaled_rows(scaling, scaled.cast<double>());
}

std::string format_history_csv(const std::vector<StepMetrics>& history) {
  std::ostringstream out;
  out << "iter,epoch,gen_loss,dis_loss,s_gen,s_dis,val_acc\n";
  for (const auto& m : history) {
    out << m.iter << ',' << m.epoch << ',' << io::format_double(m.gen_loss) << ','
        << io::format_double(m.dis_loss) << ',' << io::format_double(m.s_gen) << ','
        << io::format_double(m.s_dis) << ',';
    if (m.val_acc) out << io::format_double(*m.val_acc);
    out << '\n';
  }
  return out.str();
}

std::string format_epochs_csv(const std::vector<EpochSummary>& epochs) {
  std::ostringstream out;
  out << "epoch,gen_loss,dis_loss,s_gen,s_dis,val_acc,mean_coverage,verdict\n";
  for (const auto& e : epochs) {
    out << e.epoch << ',' << io::format_double(e.gen_loss) << ',' << io::format_double(e.dis_loss)
        << ',' << io::format_double(e.s_gen) << ',' << io::format_double(e.s_dis) << ','
        << io::format_double(e.val_acc) << ',' << io::format_double(e.mean_coverage) << ','
        << to_string(e.verdict) << '\n';
  }
  return out.str();
}

}  // namespace ltgan::gan
