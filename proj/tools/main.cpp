// ltgan command-line driver. Every command writes manifest.json into its
// output directory. Exit codes: 0 success, 1 usage, 2 validation, 3 training
// aborted.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ltgan/catalog.hpp"
#include "ltgan/classifier.hpp"
#include "ltgan/dataset.hpp"
#include "ltgan/eval.hpp"
#include "ltgan/gan.hpp"
#include "ltgan/io.hpp"
#include "ltgan/search.hpp"

namespace fs = std::filesystem;
using namespace ltgan;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitAborted = 3;

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
};

json load_json(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    return json::parse(io::read_file(path));
  } catch (const json::exception& err) {
    throw Error(Errc::ParseError, path + ": " + err.what());
  }
}

class Output {
 public:
  Output(std::string command, const Common& common, std::vector<std::string> argv)
      : command_(std::move(command)), common_(common), argv_(std::move(argv)) {
    if (common_.out.empty()) throw Error(Errc::InvalidArgument, "--out is required");
    fs::create_directories(common_.out);
  }

  void write(const std::string& name, std::string_view contents) {
    io::write_file(fs::path(common_.out) / name, contents);
    artifacts_[name] = io::hex64(io::fnv1a(contents));
  }
  void write_json(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

  // Timestamps live only here so data files stay byte-identical on rerun.
  void finish(const json& extra = json::object()) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json manifest = {{"command", command_},
                     {"argv", argv_},
                     {"config", common_.config},
                     {"seed", common_.seed},
                     {"out", common_.out},
                     {"artifacts", artifacts_},
                     {"created_at", stamp}};
    manifest.update(extra);
    io::write_file(fs::path(common_.out) / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  Common common_;
  std::vector<std::string> argv_;
  std::map<std::string, std::string> artifacts_;
};

// Accepts the dataset directory or the dataset.csv inside it.
pipeline::Dataset load_dataset_dir(const std::string& path) {
  std::filesystem::path dir(path);
  if (std::filesystem::is_regular_file(dir)) dir = dir.parent_path();
  if (dir.empty()) dir = ".";
  auto ds = pipeline::load_dataset(dir);
  if (!ds.scaling) throw Error(Errc::ParseError, path + ": dataset has no scaling");
  return ds;
}

std::vector<pipeline::FeatureVector> load_features(const std::string& path) {
  return pipeline::parse_features_csv(io::read_file(path));
}

eval::EvalOptions eval_options(const pipeline::Dataset& ds) {
  const auto cfg = pipeline::pipeline_config_from_json(ds.provenance.config);
  eval::EvalOptions opt;
  opt.spacecraft = cfg.spacecraft;
  opt.oracle = cfg.oracle;
  opt.baseline_rate = ds.provenance.convergence_rate;
  return opt;
}

void labelled_matrix(const pipeline::Dataset& ds, Eigen::MatrixXd& x, std::vector<bool>& y) {
  const auto rows = ds.all_features();
  x = pipeline::scaled_matrix(*ds.scaling, rows);
  y.clear();
  for (const auto& r : ds.rows) y.push_back(r.feasible);
}

gan::GanConfig gan_config(const std::string& preset, const json& doc) {
  gan::GanConfig base = preset == "best" ? gan::GanConfig::best_observed()
                        : preset == "collapse" ? gan::GanConfig::collapse_prone()
                                               : gan::GanConfig::desk();
  if (preset != "best" && preset != "collapse" && preset != "desk") {
    throw Error(Errc::InvalidArgument, "unknown preset '" + preset + "'");
  }
  json merged = gan::to_json(base);
  merged.merge_patch(doc);
  return gan::gan_config_from_json(merged);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Low-thrust transfer GAN toolkit"};
  app.require_subcommand(1);
  Common common;
  const auto add_common = [&common](CLI::App* cmd, bool needs_out = true) {
    cmd->add_option("--seed", common.seed, "Master seed");
    cmd->add_option("--config", common.config, "JSON configuration document");
    auto* out = cmd->add_option("--out", common.out, "Output directory");
    if (needs_out) out->required();
  };

  // catalog
  auto* catalog = app.add_subcommand("catalog", "Synthetic asteroid catalogs");
  catalog->require_subcommand(1);
  auto* cat_synth = catalog->add_subcommand("synth", "Generate a synthetic catalog");
  std::size_t cat_n = 500;
  cat_synth->add_option("--n", cat_n, "Number of asteroids");
  add_common(cat_synth);
  auto* cat_validate = catalog->add_subcommand("validate", "Parse and check a catalog CSV");
  std::string cat_path;
  cat_validate->add_option("path", cat_path, "Catalog CSV")->required();

  // dataset
  auto* dataset = app.add_subcommand("dataset", "Conventional data-generation workflow");
  dataset->require_subcommand(1);
  auto* ds_gen = dataset->add_subcommand("generate", "Label transfers with the feasibility oracle");
  std::string ds_catalog;
  std::optional<std::size_t> ds_n;
  std::optional<unsigned> ds_threads;
  ds_gen->add_option("--catalog", ds_catalog, "Catalog CSV")->required();
  ds_gen->add_option("--n", ds_n, "Target count for each label");
  ds_gen->add_option("--threads", ds_threads, "Worker threads (does not change output)");
  add_common(ds_gen);

  // classifier
  auto* clf_cmd = app.add_subcommand("classifier", "Feasibility classifier");
  clf_cmd->require_subcommand(1);
  auto* clf_train = clf_cmd->add_subcommand("train", "Train on a labelled dataset");
  std::string clf_dataset;
  std::optional<int> clf_epochs;
  clf_train->add_option("--dataset", clf_dataset, "Dataset directory")->required();
  clf_train->add_option("--epochs", clf_epochs, "Training epochs");
  add_common(clf_train);

  // gan
  auto* gan_cmd = app.add_subcommand("gan", "Adversarial training and sampling");
  gan_cmd->require_subcommand(1);
  auto* gan_train = gan_cmd->add_subcommand("train", "Train generator and discriminator");
  std::string gan_dataset, gan_classifier, gan_preset = "desk";
  std::optional<int> gan_epochs;
  gan_train->add_option("--dataset", gan_dataset, "Dataset directory")->required();
  gan_train->add_option("--classifier", gan_classifier, "Classifier checkpoint")->required();
  gan_train->add_option("--preset", gan_preset, "best | collapse | desk (config overrides apply on top)");
  gan_train->add_option("--epochs", gan_epochs, "Epoch count");
  add_common(gan_train);
  auto* gan_sample = gan_cmd->add_subcommand("sample", "Draw feature vectors from a trained generator");
  std::string gan_model;
  int sample_n = 1000;
  gan_sample->add_option("--model", gan_model, "Directory written by 'gan train'")->required();
  gan_sample->add_option("--n", sample_n, "Number of samples");
  add_common(gan_sample);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluation and diagnostics");
  eval_cmd->require_subcommand(1);
  std::string ev_samples, ev_dataset, ev_classifier, ev_other;
  std::optional<unsigned> ev_threads;
  auto* ev_conv = eval_cmd->add_subcommand("convergence", "Oracle convergence rate of samples");
  ev_conv->add_option("--samples", ev_samples, "Samples CSV")->required();
  ev_conv->add_option("--dataset", ev_dataset, "Reference dataset directory")->required();
  ev_conv->add_option("--classifier", ev_classifier, "Optional classifier checkpoint");
  ev_conv->add_option("--threads", ev_threads, "Worker threads (does not change output)");
  add_common(ev_conv);
  auto* ev_dist = eval_cmd->add_subcommand("distribution", "Distribution statistics against real data");
  ev_dist->add_option("--samples", ev_samples, "Samples CSV; omit to describe the real set");
  ev_dist->add_option("--dataset", ev_dataset, "Reference dataset directory")->required();
  add_common(ev_dist);
  auto* ev_cmp = eval_cmd->add_subcommand("compare", "Compare two sample sets against real data");
  ev_cmp->add_option("--samples", ev_samples, "First samples CSV (a)")->required();
  ev_cmp->add_option("--other", ev_other, "Second samples CSV (b)")->required();
  ev_cmp->add_option("--dataset", ev_dataset, "Reference dataset directory")->required();
  add_common(ev_cmp);

  // search
  auto* search_cmd = app.add_subcommand("search", "Hyperparameter search");
  search_cmd->require_subcommand(1);
  auto* search_grid = search_cmd->add_subcommand("grid", "Budgeted grid search");
  std::string sg_dataset, sg_classifier;
  std::optional<std::size_t> sg_budget;
  std::optional<int> sg_epochs;
  search_grid->add_option("--dataset", sg_dataset, "Dataset directory")->required();
  search_grid->add_option("--classifier", sg_classifier, "Classifier checkpoint")->required();
  search_grid->add_option("--budget", sg_budget, "Trial budget");
  search_grid->add_option("--epochs", sg_epochs, "Per-trial epoch cap");
  add_common(search_grid);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*cat_validate) {
      const auto cat = pipeline::load_catalog(cat_path);
      std::cout << json{{"path", cat_path}, {"n_asteroids", cat.size()}, {"valid", true}}.dump() << "\n";
      return 0;
    }
    if (*cat_synth) {
      const json cfg = load_json(common.config);
      pipeline::ElementRanges ranges;
      const auto range = [&cfg](const char* key, pipeline::Range& r) {
        if (cfg.contains(key)) r = {cfg.at(key).at(0).get<double>(), cfg.at(key).at(1).get<double>()};
      };
      range("a", ranges.a);
      range("e", ranges.e);
      range("i_deg", ranges.i_deg);
      ranges.epoch = cfg.value("epoch", ranges.epoch);
      Output out("catalog synth", common, args);
      const auto cat = pipeline::synth_catalog(cat_n, ranges, common.seed);
      out.write("catalog.csv", pipeline::format_catalog(cat));
      out.finish({{"n_asteroids", cat.size()}});
      return 0;
    }
    if (*ds_gen) {
      auto cfg = pipeline::pipeline_config_from_json(load_json(common.config));
      if (ds_n) cfg.target_feasible = cfg.target_infeasible = *ds_n;
      if (ds_threads) cfg.threads = *ds_threads;
      const auto cat = pipeline::load_catalog(ds_catalog);
      Output out("dataset generate", common, args);
      const auto ds = pipeline::generate_dataset(cat, cfg, common.seed);
      out.write("dataset.csv", pipeline::format_dataset_csv(ds));
      out.write_json("dataset.meta.json", pipeline::dataset_metadata(ds));
      const json summary = {{"n_attempted", ds.provenance.n_attempted},
                            {"n_feasible", ds.provenance.n_feasible},
                            {"convergence_rate", ds.provenance.convergence_rate},
                            {"n_rows", ds.rows.size()}};
      out.write_json("summary.json", summary);
      out.finish();
      std::cout << summary.dump() << "\n";
      return 0;
    }
    if (*clf_train) {
      auto cfg = classifier::classifier_config_from_json(load_json(common.config));
      if (clf_epochs) cfg.epochs = *clf_epochs;
      const auto ds = load_dataset_dir(clf_dataset);
      Eigen::MatrixXd x;
      std::vector<bool> y;
      labelled_matrix(ds, x, y);
      Output out("classifier train", common, args);
      const auto result = classifier::train_classifier(x, y, cfg, common.seed);
      out.write_json("classifier.json", result.model.to_json(common.seed));
      const json metrics = {{"held_out", to_json(result.held_out)},
                            {"train", to_json(result.train_metrics)},
                            {"n_balanced", result.n_balanced},
                            {"loss_history", result.loss_history},
                            {"config", to_json(cfg)}};
      out.write_json("metrics.json", metrics);
      out.finish();
      std::cout << metrics.at("held_out").dump() << "\n";
      return 0;
    }
    if (*gan_train) {
      auto cfg = gan_config(gan_preset, load_json(common.config));
      cfg.seed = common.seed;
      if (gan_epochs) cfg.n_epochs = *gan_epochs;
      const auto ds = load_dataset_dir(gan_dataset);
      const auto clf = classifier::Classifier::load(gan_classifier);
      const auto feasible = ds.feasible_features();
      Output out("gan train", common, args);
      const auto result = gan::train(cfg, pipeline::scaled_matrix(*ds.scaling, feasible), clf,
                                     [](const gan::EpochSummary& e) {
                                       std::cerr << "epoch " << e.epoch << " s_gen " << e.s_gen << " s_dis "
                                                 << e.s_dis << " val " << e.val_acc << " coverage "
                                                 << e.mean_coverage << " " << gan::to_string(e.verdict) << "\n";
                                     });
      out.write_json("generator.json", result.generator.to_json(cfg.seed));
      out.write_json("discriminator.json", result.discriminator.to_json(cfg.seed));
      out.write_json("scaling.json", pipeline::to_json(*ds.scaling));
      out.write_json("gan_config.json", gan::to_json(cfg));
      out.write("history.csv", gan::format_history_csv(result.history));
      out.write("epochs.csv", gan::format_epochs_csv(result.epochs));
      json report = gan::to_json(result.last_report);
      report["outcome"] = gan::to_string(result.outcome);
      report["best_epoch"] = result.best_epoch ? json(*result.best_epoch) : json();
      report["best_val_acc"] = result.best_val_acc;
      report["epochs_run"] = result.epochs.size();
      out.write_json("collapse_report.json", report);
      out.finish();
      std::cout << json{{"outcome", report["outcome"]}, {"best_epoch", report["best_epoch"]},
                        {"best_val_acc", result.best_val_acc}}.dump()
                << "\n";
      return result.outcome == gan::Outcome::Completed ? 0 : kExitAborted;
    }
    if (*gan_sample) {
      const auto gen = gan::Net::from_json(load_json((fs::path(gan_model) / "generator.json").string()));
      const auto scaling = pipeline::scaling_from_json(load_json((fs::path(gan_model) / "scaling.json").string()));
      Output out("gan sample", common, args);
      Rng rng(common.seed);
      const auto samples = gan::sample_transfers(gen, sample_n, scaling, rng);
      out.write("samples.csv", pipeline::format_features_csv(samples));
      out.finish({{"n", sample_n}, {"model", gan_model}});
      return 0;
    }
    if (*ev_conv) {
      const auto ds = load_dataset_dir(ev_dataset);
      const auto samples = load_features(ev_samples);
      auto opt = eval_options(ds);
      if (ev_threads) opt.threads = *ev_threads;
      std::optional<classifier::Classifier> clf;
      if (!ev_classifier.empty()) clf = classifier::Classifier::load(ev_classifier);
      Output out("eval convergence", common, args);
      const auto rep = eval::evaluate_generated(samples, *ds.scaling, opt, clf ? &*clf : nullptr);
      out.write_json("convergence.json", eval::to_json(rep));
      out.finish();
      std::cout << eval::to_json(rep).dump() << "\n";
      return 0;
    }
    if (*ev_dist) {
      const auto ds = load_dataset_dir(ev_dataset);
      const auto reference = ds.feasible_features();
      const auto samples = ev_samples.empty() ? reference : load_features(ev_samples);
      Output out("eval distribution", common, args);
      const auto rep = eval::distribution_report(samples, reference);
      out.write_json("distribution.json", eval::to_json(rep));
      out.write("overview.csv", eval::format_overview_csv(rep));
      out.write("box.csv", eval::format_box_csv(rep));
      out.write("histogram.csv", eval::format_histogram_csv(rep));
      out.write("scatter.csv", eval::format_scatter_csv(samples, *ds.scaling));
      out.write("scatter_reference.csv", eval::format_scatter_csv(reference, *ds.scaling));
      out.finish();
      std::cout << eval::format_overview_csv(rep);
      return 0;
    }
    if (*ev_cmp) {
      const auto ds = load_dataset_dir(ev_dataset);
      const auto reference = ds.feasible_features();
      Output out("eval compare", common, args);
      const auto a = eval::distribution_report(load_features(ev_samples), reference);
      const auto b = eval::distribution_report(load_features(ev_other), reference);
      const auto cmp = eval::compare_runs(a, b);
      out.write_json("compare.json", eval::to_json(cmp));
      out.finish();
      std::cout << eval::to_json(cmp).dump() << "\n";
      return 0;
    }
    if (*search_grid) {
      auto grid = search::grid_spec_from_json(load_json(common.config));
      if (sg_budget) grid.budget = *sg_budget;
      if (sg_epochs) grid.epoch_cap = *sg_epochs;
      const auto ds = load_dataset_dir(sg_dataset);
      const auto clf = classifier::Classifier::load(sg_classifier);
      search::SearchContext ctx;
      ctx.real_scaled = pipeline::scaled_matrix(*ds.scaling, ds.feasible_features());
      ctx.scaling = *ds.scaling;
      ctx.classifier = &clf;
      ctx.eval = eval_options(ds);
      Output out("search grid", common, args);
      const auto result = search::run_grid(grid, ctx, common.seed, [](const search::TrialResult& t) {
        std::cerr << "trial " << t.trial << " " << gan::to_string(t.verdict) << " oracle " << t.oracle_rate
                  << "\n";
      });
      out.write("trials.csv", search::format_trials_csv(result));
      out.write_json("grid.json", search::to_json(grid));
      out.finish({{"diagnostics", result.diagnostics}, {"n_ranked", result.ranked.size()}});
      if (!result.diagnostics.empty()) std::cerr << result.diagnostics << "\n";
      return 0;
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return err.code() == Errc::Diverged ? kExitAborted : kExitValidation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
