#include "ltgan/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ltgan/io.hpp"

namespace ltgan::search {

std::vector<double> arange(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw Error(Errc::InvalidArgument, "invalid range");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

namespace {

std::vector<int> int_range(int lo, int hi, int step) {
  std::vector<int> out;
  for (int v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

template <typename T>
void require_nonempty(const std::vector<T>& v, const char* name) {
  if (v.empty()) throw Error(Errc::InvalidArgument, std::string("grid axis '") + name + "' is empty");
}

nlohmann::json axis_json(const AxisSpec& a) {
  return {{"layers", a.layers}, {"neurons", a.neurons}, {"dropout", a.dropout}, {"learning_rate", a.learning_rate}};
}

AxisSpec axis_from_json(const nlohmann::json& j, const AxisSpec& fallback) {
  AxisSpec a = fallback;
  if (j.contains("layers")) a.layers = j.at("layers").get<std::vector<int>>();
  if (j.contains("neurons")) a.neurons = j.at("neurons").get<std::vector<int>>();
  if (j.contains("dropout")) a.dropout = j.at("dropout").get<std::vector<double>>();
  if (j.contains("learning_rate")) a.learning_rate = j.at("learning_rate").get<std::vector<double>>();
  return a;
}

}  // namespace

GridSpec GridSpec::full_ranges() {
  GridSpec g;
  g.gen = {int_range(5, 30, 2), int_range(100, 300, 50), arange(0.0, 0.8, 0.1), arange(1e-5, 3e-4, 5e-5)};
  g.dis = {int_range(4, 10, 2), int_range(200, 400, 50), arange(0.0, 0.8, 0.1), arange(1e-5, 3e-4, 5e-5)};
  g.base = GanConfig::desk();
  return g;
}

std::size_t GridSpec::size() const {
  return gen.layers.size() * gen.neurons.size() * gen.dropout.size() * gen.learning_rate.size() *
         dis.layers.size() * dis.neurons.size() * dis.dropout.size() * dis.learning_rate.size();
}

void GridSpec::validate() const {
  require_nonempty(gen.layers, "gen.layers");
  require_nonempty(gen.neurons, "gen.neurons");
  require_nonempty(gen.dropout, "gen.dropout");
  require_nonempty(gen.learning_rate, "gen.learning_rate");
  require_nonempty(dis.layers, "dis.layers");
  require_nonempty(dis.neurons, "dis.neurons");
  require_nonempty(dis.dropout, "dis.dropout");
  require_nonempty(dis.learning_rate, "dis.learning_rate");
  if (budget < 1) throw Error(Errc::InvalidArgument, "budget must be >= 1");
  if (epoch_cap < 1 || n_samples < 1) throw Error(Errc::InvalidArgument, "epoch_cap and n_samples must be >= 1");
  base.validate();
}

GanConfig GridSpec::trial_config(std::size_t index, std::uint64_t master_seed) const {
  if (index >= size()) throw Error(Errc::InvalidArgument, "trial index outside the grid");
  // Last axis varies fastest.
  std::size_t rest = index;
  const auto pick = [&rest](const auto& axis) {
    const auto& v = axis[rest % axis.size()];
    rest /= axis.size();
    return v;
  };
  GanConfig c = base;
  c.dis.learning_rate = pick(dis.learning_rate);
  c.dis.dropout_rate = pick(dis.dropout);
  c.dis.n_neurons = pick(dis.neurons);
  c.dis.n_layers = pick(dis.layers);
  c.gen.learning_rate = pick(gen.learning_rate);
  c.gen.dropout_rate = pick(gen.dropout);
  c.gen.n_neurons = pick(gen.neurons);
  c.gen.n_layers = pick(gen.layers);
  c.n_epochs = std::min(base.n_epochs, epoch_cap);
  c.seed = mix_seed(master_seed, index);
  return c;
}

nlohmann::json to_json(const GridSpec& g) {
  return {{"gen", axis_json(g.gen)},       {"dis", axis_json(g.dis)},
          {"base", gan::to_json(g.base)},  {"budget", g.budget},
          {"epoch_cap", g.epoch_cap},      {"n_samples", g.n_samples}};
}

GridSpec grid_spec_from_json(const nlohmann::json& doc) {
  GridSpec g = GridSpec::full_ranges();
  if (doc.contains("base")) g.base = gan::gan_config_from_json(doc.at("base"));
  if (doc.contains("gen")) g.gen = axis_from_json(doc.at("gen"), g.gen);
  if (doc.contains("dis")) g.dis = axis_from_json(doc.at("dis"), g.dis);
  g.budget = doc.value("budget", g.budget);
  g.epoch_cap = doc.value("epoch_cap", g.epoch_cap);
  g.n_samples = doc.value("n_samples", g.n_samples);
  return g;
}

SearchResult run_grid(const GridSpec& grid, const SearchContext& ctx, std::uint64_t seed,
                      const TrialCallback& on_trial) {
  grid.validate();
  if (!ctx.classifier) throw Error(Errc::InvalidArgument, "grid search needs a classifier");
  SearchResult result;
  const std::size_t n = std::min(grid.budget, grid.size());
  for (std::size_t i = 0; i < n; ++i) {
    TrialResult t;
    t.trial = i;
    t.config = grid.trial_config(i, seed);
    const auto trained = gan::train(t.config, ctx.real_scaled, *ctx.classifier);
    t.outcome = trained.outcome;
    t.epochs_run = static_cast<int>(trained.epochs.size());
    t.verdict = trained.outcome == gan::Outcome::Completed ? (trained.best_epoch ? gan::Verdict::Healthy
                                                                                 : trained.last_report.verdict)
                : trained.outcome == gan::Outcome::Collapsed ? gan::Verdict::ModeCollapse
                                                             : gan::Verdict::Diverged;
    const std::size_t tail = std::min<std::size_t>(10, trained.epochs.size());
    for (std::size_t k = trained.epochs.size() - tail; k < trained.epochs.size(); ++k) {
      t.s_gen += trained.epochs[k].s_gen / static_cast<double>(tail);
      t.s_dis += trained.epochs[k].s_dis / static_cast<double>(tail);
    }
    if (!trained.epochs.empty()) t.mean_coverage = trained.last_report.mean_coverage;
    Rng sample_rng(mix_seed(t.config.seed, 100));
    const auto samples = gan::sample_transfers(trained.generator, grid.n_samples, ctx.scaling, sample_rng);
    const auto rep = eval::evaluate_generated(samples, ctx.scaling, ctx.eval, ctx.classifier);
    t.oracle_rate = rep.oracle_rate;
    t.classifier_rate = rep.classifier_rate.value_or(0.0);
    if (on_trial) on_trial(t);
    result.trials.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    if (result.trials[i].verdict == gan::Verdict::Healthy) result.ranked.push_back(i);
  }
  std::stable_sort(result.ranked.begin(), result.ranked.end(), [&](std::size_t a, std::size_t b) {
    return result.trials[a].oracle_rate > result.trials[b].oracle_rate;
  });
  if (result.ranked.empty()) {
    std::ostringstream diag;
    diag << "no Healthy trial within a budget of " << n << " trials:";
    for (const auto& t : result.trials) diag << " #" << t.trial << '=' << gan::to_string(t.verdict);
    result.diagnostics = diag.str();
  }
  return result;
}

std::string format_trials_csv(const SearchResult& result) {
  std::vector<int> rank(result.trials.size(), 0);
  for (std::size_t r = 0; r < result.ranked.size(); ++r) rank[result.ranked[r]] = static_cast<int>(r + 1);
  std::ostringstream out;
  out << "trial,gen_layers,gen_neurons,gen_dropout,gen_lr,dis_layers,dis_neurons,dis_dropout,dis_lr,"
         "epochs_run,verdict,oracle_rate,classifier_rate,s_gen,s_dis,mean_coverage,rank\n";
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const auto& t = result.trials[i];
    const auto& g = t.config.gen;
    const auto& d = t.config.dis;
    out << t.trial << ',' << g.n_layers << ',' << g.n_neurons << ',' << io::format_double(g.dropout_rate)
        << ',' << io::format_double(g.learning_rate) << ',' << d.n_layers << ',' << d.n_neurons << ','
        << io::format_double(d.dropout_rate) << ',' << io::format_double(d.learning_rate) << ','
        << t.epochs_run << ',' << gan::to_string(t.verdict) << ',' << io::format_double(t.oracle_rate)
        << ',' << io::format_double(t.classifier_rate) << ',' << io::format_double(t.s_gen) << ','
        << io::format_double(t.s_dis) << ',' << io::format_double(t.mean_coverage) << ',';
    if (rank[i] > 0) out << rank[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace ltgan::search
