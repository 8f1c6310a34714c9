// Command-line front end: run, compare and synth subcommands.

#include "ssfs/ssfs.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct RunOptions {
  ssfs::RunConfig cfg;
  std::string label_column = "last";
  std::string strategy = "odesfs";
  std::vector<std::string> classifiers;
  int k_neighbors = 3;
  int n_trees = 6;
  int max_depth = 10;
  std::string output;
  std::string plot_data;
  std::string mask_out;
  std::string dump_lfa;
  std::string de_history;
  bool timing = false;

  ssfs::RunConfig resolve() const {
    ssfs::RunConfig out = cfg;
    out.label_column = ssfs::LabelColumn::parse(label_column);
    out.strategy = ssfs::parse_strategy(strategy);
    if (!classifiers.empty()) {
      out.classifiers.clear();
      for (const auto& name : classifiers) {
        ssfs::ClassifierConfig c;
        c.kind = ssfs::parse_classifier_kind(name);
        out.classifiers.push_back(c);
      }
    }
    for (auto& c : out.classifiers) {
      c.k_neighbors = k_neighbors;
      c.n_trees = n_trees;
      c.max_depth = max_depth;
    }
    out.validate();
    return out;
  }
};

void add_run_options(CLI::App* app, RunOptions& o) {
  auto& c = o.cfg;
  app->add_option("--data", c.data_path, "Input CSV (comma-separated, optional header)")->required()->check(CLI::ExistingFile);
  app->add_option("--label-column", o.label_column, "Label column index or 'last'")->capture_default_str();
  app->add_option("--dataset-name", c.dataset_name, "Name used in reports (default: file stem)");
  app->add_option("--missing-rate", c.missing_rate, "Fraction of cells to mask, in [0, 1)")->capture_default_str();
  app->add_option("--seed", c.master_seed, "Master seed")->capture_default_str();
  app->add_option("--window-size", c.window_size, "Features per stream window")->capture_default_str();
  app->add_option("--rank", c.lfa.rank, "Latent rank")->capture_default_str();
  app->add_option("--lambda", c.lfa.lambda, "LFA regularization")->capture_default_str();
  app->add_option("--eta", c.lfa.eta, "LFA learning rate")->capture_default_str();
  app->add_option("--epochs", c.lfa.max_epochs, "Maximum LFA epochs per window")->capture_default_str();
  app->add_option("--tol", c.lfa.tol, "Relative loss-change stopping threshold")->capture_default_str();
  app->add_option("--init-scale", c.lfa.init_scale, "Upper bound of the uniform factor init")->capture_default_str();
  app->add_flag("--keep-observed", c.lfa.keep_observed, "Pass observed cells through the completion");
  app->add_option("--pop-size", c.de.pop_size, "DE population size")->capture_default_str();
  app->add_option("--mu", c.de.mu, "DE scaling factor in [0, 2]")->capture_default_str();
  app->add_option("--cr", c.de.cr, "DE crossover rate in [0, 1]")->capture_default_str();
  app->add_option("--generations", c.de.generations, "DE generations per window")->capture_default_str();
  app->add_option("--threshold", c.de.threshold, "Gene binarization threshold")->capture_default_str();
  app->add_flag("--context-free-de", c.context_free_de, "Score DE masks without the selected set");
  app->add_option("--alpha", c.ci.alpha, "Fisher z significance level")->capture_default_str();
  app->add_option("--max-cond", c.ci.max_cond_size, "Largest conditioning subset")->capture_default_str();
  app->add_option("--classifier", o.classifiers, "Evaluation classifier (repeatable): knn|cart|forest");
  app->add_option("--k-neighbors", o.k_neighbors, "k for the knn evaluation classifier")->capture_default_str();
  app->add_option("--n-trees", o.n_trees, "Trees in the forest evaluation classifier")->capture_default_str();
  app->add_option("--max-depth", o.max_depth, "Depth limit for cart/forest")->capture_default_str();
  app->add_option("--eval-folds", c.eval_folds, "Folds for the final evaluation")->capture_default_str();
  app->add_option("--fitness-folds", c.fitness_folds, "Folds for DE fitness")->capture_default_str();
  app->add_option("--strategy", o.strategy, "odesfs or zero-fill")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads for DE fitness evaluation")->capture_default_str();
  app->add_option("--output", o.output, "Report path (default: stdout)");
  app->add_option("--plot-data", o.plot_data, "Write long-format plot CSV here");
  app->add_flag("--timing", o.timing, "Include wall-clock timings in the report");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ssfs::Error("cannot write '" + path + "'");
  out << text;
}

class DebugSink : public ssfs::RunObserver {
 public:
  DebugSink(std::string mask_out, std::string lfa_dir) : mask_out_(std::move(mask_out)), lfa_dir_(std::move(lfa_dir)) {
    if (!lfa_dir_.empty()) std::filesystem::create_directories(lfa_dir_);
  }
  void on_mask(const ssfs::ObservationMask& mask) override {
    if (!mask_out_.empty()) ssfs::write_mask_csv(mask_out_, mask);
  }
  void on_lfa(int window, const ssfs::TrainResult& result) override {
    if (lfa_dir_.empty()) return;
    const auto base = std::filesystem::path(lfa_dir_) / ("window_" + std::to_string(window));
    ssfs::write_factors_csv(base.string() + "_factors.csv", result.factors);
    ssfs::write_trace_csv(base.string() + "_loss.csv", result);
  }

 private:
  std::string mask_out_;
  std::string lfa_dir_;
};

std::vector<std::uint64_t> parse_seed_list(const std::vector<std::string>& raw) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : raw) seeds.push_back(std::stoull(item));
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online feature selection over sparse streaming features"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Stream a dataset through imputation, DE search and CI filtering");
  add_run_options(run_cmd, run_opts);
  run_cmd->add_option("--mask-out", run_opts.mask_out, "Write the observation mask (0/1 CSV)");
  run_cmd->add_option("--dump-lfa", run_opts.dump_lfa, "Directory for per-window factor and loss CSVs");
  run_cmd->add_option("--de-history", run_opts.de_history, "Write per-generation DE history CSV");

  RunOptions cmp_opts;
  std::string strategy_b = "zero-fill";
  std::vector<std::string> seed_list{"1", "2", "3", "4", "5"};
  std::string cmp_classifier = "knn";
  auto* cmp_cmd = app.add_subcommand("compare", "Pair two strategies over several seeds with a Wilcoxon test");
  add_run_options(cmp_cmd, cmp_opts);
  cmp_cmd->add_option("--strategy-b", strategy_b, "Strategy of the second arm")->capture_default_str();
  cmp_cmd->add_option("--seeds", seed_list, "Master seeds (comma-separated)")->delimiter(',')->capture_default_str();
  cmp_cmd->add_option("--compare-classifier", cmp_classifier, "Classifier whose accuracy is paired")->capture_default_str();

  ssfs::SynthConfig synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-informative-feature dataset");
  synth_cmd->add_option("--samples", synth.samples, "Instances")->capture_default_str();
  synth_cmd->add_option("--features", synth.features, "Features")->capture_default_str();
  synth_cmd->add_option("--informative", synth.informative, "Planted feature ids (comma-separated)")->delimiter(',');
  synth_cmd->add_option("--n-informative", synth.n_informative, "Evenly spaced planted ids when --informative is absent")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise, "Per-cell noise standard deviation")->capture_default_str();
  synth_cmd->add_option("--label-factor", synth.label_factor, "Loading of the factor shared by the planted columns")->capture_default_str();
  synth_cmd->add_option("--latent-rank", synth.latent_rank, "Rank of the shared latent structure")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--output", synth_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto cfg = run_opts.resolve();
      DebugSink sink(run_opts.mask_out, run_opts.dump_lfa);
      const auto report = ssfs::run(cfg, &sink);
      write_text(run_opts.output, ssfs::dump(ssfs::report_to_json(report, run_opts.timing)));
      if (!run_opts.plot_data.empty()) write_text(run_opts.plot_data, ssfs::emit_plot_data({report}));
      if (!run_opts.de_history.empty()) write_text(run_opts.de_history, ssfs::de_history_csv(report));
    } else if (*cmp_cmd) {
      const auto cfg_a = cmp_opts.resolve();
      auto cfg_b = cfg_a;
      cfg_b.strategy = ssfs::parse_strategy(strategy_b);
      const auto result = ssfs::compare(cfg_a, cfg_b, parse_seed_list(seed_list), cmp_classifier);
      write_text(cmp_opts.output, ssfs::dump(ssfs::comparison_to_json(result)));
      if (!cmp_opts.plot_data.empty()) write_text(cmp_opts.plot_data, ssfs::emit_plot_data(result.reports));
    } else if (*synth_cmd) {
      ssfs::write_csv(synth_out, ssfs::make_planted_dataset(synth));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
