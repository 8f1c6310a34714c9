#include "ssfs/pipeline.hpp"

#include "ssfs/random.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace ssfs {

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(v);
}

}  // namespace

std::string to_string(Strategy s) { return s == Strategy::odesfs ? "odesfs" : "zero-fill"; }

Strategy parse_strategy(const std::string& name) {
  if (name == "odesfs") return Strategy::odesfs;
  if (name == "zero-fill" || name == "zero_fill") return Strategy::zero_fill;
  throw ConfigError("unknown strategy '" + name + "' (expected odesfs or zero-fill)");
}

RunConfig::RunConfig() {
  ClassifierConfig knn;
  ClassifierConfig cart;
  cart.kind = ClassifierKind::cart;
  ClassifierConfig forest;
  forest.kind = ClassifierKind::forest;
  classifiers = {knn, cart, forest};
}

void RunConfig::validate() const {
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw ConfigError("missing rate must lie in [0, 1)");
  if (window_size < 1) throw ConfigError("window size must be at least 1");
  lfa.validate();
  de.validate();
  ci.validate();
  if (classifiers.empty()) throw ConfigError("at least one evaluation classifier is required");
  for (const auto& c : classifiers) c.validate();
  if (fitness_folds < 2 || eval_folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

double RunReport::accuracy(const std::string& classifier) const {
  for (const auto& a : accuracies)
    if (a.classifier == classifier) return a.accuracy;
  throw std::out_of_range("no accuracy recorded for classifier '" + classifier + "'");
}

RunReport run(const Dataset& data, const RunConfig& cfg, RunObserver* observer) {
  cfg.validate();
  validate(data);
  Stopwatch total;
  Stopwatch phase;

  RunReport report;
  report.config = cfg;
  report.dataset = cfg.dataset_name.empty() ? std::filesystem::path(cfg.data_path).stem().string() : cfg.dataset_name;
  report.instances = static_cast<std::size_t>(data.rows());
  report.features = static_cast<std::size_t>(data.cols());
  report.seeds.mask = derive_seed(cfg.master_seed, seed_tag::mask);
  report.seeds.evaluation_folds = derive_seed(cfg.master_seed, seed_tag::evaluation_folds);
  report.seeds.classifier = derive_seed(cfg.master_seed, seed_tag::classifier);

  const ObservationMask mask = apply_mask(data, cfg.missing_rate, report.seeds.mask);
  report.missing_cells = mask.missing_count();
  if (observer) observer->on_mask(mask);
  const Matrix standardized = standardize_observed(data.values, mask.observed);
  const Index m = data.rows();

  ClassifierConfig fitness_classifier;  // k-NN, k = 3
  fitness_classifier.seed = report.seeds.classifier;

  SelectedSet selected;
  for (const SparseWindow& window : windows(standardized, mask, cfg.window_size)) {
    WindowTrace trace;
    trace.window = window.index();
    trace.first_feature = window.feature_ids().front();
    trace.width = static_cast<std::size_t>(window.width());
    trace.observed_cells = window.observed_count();
    const auto w = static_cast<std::uint64_t>(window.index());
    try {
      phase.lap();
      Matrix completed;
      if (cfg.strategy == Strategy::odesfs) {
        LfaConfig lfa = cfg.lfa;
        lfa.seed = trace.lfa_seed = derive_seed(cfg.master_seed, seed_tag::lfa, w);
        const TrainResult trained = train(window, lfa);
        if (observer) observer->on_lfa(window.index(), trained);
        trace.lfa_epochs = trained.epochs();
        trace.lfa_final_loss = trained.trace.empty() ? trained.initial_loss : trained.trace.back();
        completed = complete_window(trained.factors, window, lfa.keep_observed).values;
      } else {
        completed = window.filled(0.0);
      }
      if (observer) observer->on_completed(window.index(), completed);
      report.timing.impute_s += phase.lap();

      EvalContext ctx(completed, cfg.context_free_de ? Matrix(m, 0) : selected.columns(m), data.labels, fitness_classifier,
                      cfg.fitness_folds, derive_seed(cfg.master_seed, seed_tag::fitness_folds, w));
      DeConfig de = cfg.de;
      de.seed = trace.de_seed = derive_seed(cfg.master_seed, seed_tag::evolve, w);
      const EvolveResult evolved = evolve_window(ctx, de, cfg.threads);
      trace.de_best_fitness = evolved.best_fitness;
      trace.de_history = evolved.history;
      report.timing.evolve_s += phase.lap();

      for (std::size_t l : evolved.best_mask.indices()) {
        const std::size_t id = window.feature_ids()[l];
        trace.de_selected.push_back(id);
        const Vector column = completed.col(static_cast<Index>(l));
        if (relevance_check(column, selected, data.labels, cfg.ci)) {
          selected.add(id, column, window.index());
          trace.admitted.push_back(id);
        }
      }
      PruneResult pruned = prune_redundant(selected, data.labels, cfg.ci);
      selected = std::move(pruned.kept);
      trace.pruned = std::move(pruned.removed);
      report.timing.filter_s += phase.lap();
    } catch (const std::exception& e) {
      throw Error("window " + std::to_string(window.index()) + ": " + e.what());
    }
    report.trace.push_back(std::move(trace));
  }

  report.selected = selected.ids();
  const Matrix final_x = selected.columns(m);
  phase.lap();
  for (const auto& c : cfg.classifiers) {
    ClassifierConfig eval = c;
    eval.seed = report.seeds.classifier;
    report.accuracies.push_back(
        {to_string(c.kind), cross_val_accuracy(final_x, data.labels, eval, cfg.eval_folds, report.seeds.evaluation_folds)});
  }
  report.timing.evaluate_s = phase.lap();
  report.timing.total_s = total.lap();
  return report;
}

RunReport run(const RunConfig& cfg, RunObserver* observer) {
  if (cfg.data_path.empty()) throw ConfigError("no data path given");
  const Dataset data = load_csv(cfg.data_path, cfg.label_column);
  return run(data, cfg, observer);
}

ComparisonReport compare(const std::vector<NamedDataset>& datasets, const RunConfig& a, const RunConfig& b,
                         const std::vector<std::uint64_t>& seeds, const std::string& classifier) {
  if (datasets.empty()) throw ConfigError("compare needs at least one dataset");
  if (seeds.empty()) throw ConfigError("compare needs at least one seed");
  ComparisonReport out;
  out.classifier = classifier;
  out.label_a = to_string(a.strategy);
  out.label_b = to_string(b.strategy);
  if (out.label_a == out.label_b) {
    out.label_a += "/a";
    out.label_b += "/b";
  }

  std::vector<double> per_seed_diffs;
  std::vector<double> per_dataset_diffs;
  for (const auto& named : datasets) {
    std::vector<double> acc_a, acc_b;
    for (std::uint64_t seed : seeds) {
      RunConfig ca = a, cb = b;
      ca.master_seed = cb.master_seed = seed;
      ca.dataset_name = cb.dataset_name = named.name;
      RunReport ra = run(named.data, ca);
      RunReport rb = run(named.data, cb);
      ComparisonRow row{named.name, seed, ra.accuracy(classifier), rb.accuracy(classifier)};
      acc_a.push_back(row.accuracy_a);
      acc_b.push_back(row.accuracy_b);
      per_seed_diffs.push_back(row.accuracy_a - row.accuracy_b);
      out.rows.push_back(row);
      out.reports.push_back(std::move(ra));
      out.reports.push_back(std::move(rb));
    }
    out.datasets.push_back(named.name);
    out.median_a.push_back(median(acc_a));
    out.median_b.push_back(median(acc_b));
    per_dataset_diffs.push_back(out.median_a.back() - out.median_b.back());
  }

  try {
    out.test = wilcoxon_signed_rank(datasets.size() > 1 ? per_dataset_diffs : per_seed_diffs);
    if (out.test->r_plus > out.test->r_minus) out.verdict = out.label_a + " better";
    else if (out.test->r_plus < out.test->r_minus) out.verdict = out.label_b + " better";
    else out.verdict = "tie";
  } catch (const AllZeroDifferences&) {
    out.verdict = "no difference";
  }
  return out;
}

ComparisonReport compare(const RunConfig& a, const RunConfig& b, const std::vector<std::uint64_t>& seeds,
                         const std::string& classifier) {
  if (a.data_path.empty()) throw ConfigError("no data path given");
  NamedDataset named{a.dataset_name.empty() ? std::filesystem::path(a.data_path).stem().string() : a.dataset_name,
                     load_csv(a.data_path, a.label_column)};
  return compare({named}, a, b, seeds, classifier);
}

std::string emit_plot_data(const std::vector<RunReport>& reports) {
  std::ostringstream out;
  out << "dataset,strategy,missing_rate,classifier,accuracy,n_selected,seed\n";
  for (const auto& r : reports) {
    for (const auto& acc : r.accuracies) {
      out << r.dataset << ',' << to_string(r.config.strategy) << ',' << format_real(r.config.missing_rate) << ','
          << acc.classifier << ',' << format_real(acc.accuracy) << ',' << r.selected.size() << ',' << r.config.master_seed
          << '\n';
    }
  }
  return out.str();
}

}  // namespace ssfs
