#include "ssfs/report.hpp"

#include <charconv>
#include <sstream>

namespace ssfs {

namespace {

Json classifier_to_json(const ClassifierConfig& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  switch (c.kind) {
    case ClassifierKind::knn:
      j["k_neighbors"] = c.k_neighbors;
      break;
    case ClassifierKind::forest:
      j["n_trees"] = c.n_trees;
      j["bootstrap"] = c.bootstrap;
      j["subsample_features"] = c.subsample_features;
      [[fallthrough]];
    case ClassifierKind::cart:
      j["max_depth"] = c.max_depth;
      j["min_samples_split"] = c.min_samples_split;
      break;
  }
  return j;
}

Json history_to_json(const std::vector<GenerationStats>& history) {
  Json best = Json::array();
  for (const auto& g : history) best.push_back(g.best_fitness);
  return best;
}

}  // namespace

Json config_to_json(const RunConfig& cfg) {
  Json j;
  j["data_path"] = cfg.data_path;
  j["dataset_name"] = cfg.dataset_name;
  j["label_column"] = cfg.label_column.to_string();
  j["missing_rate"] = cfg.missing_rate;
  j["window_size"] = cfg.window_size;
  j["strategy"] = to_string(cfg.strategy);
  j["master_seed"] = cfg.master_seed;
  j["lfa"] = {{"rank", cfg.lfa.rank},
              {"lambda", cfg.lfa.lambda},
              {"eta", cfg.lfa.eta},
              {"max_epochs", cfg.lfa.max_epochs},
              {"tol", cfg.lfa.tol},
              {"init_scale", cfg.lfa.init_scale},
              {"keep_observed", cfg.lfa.keep_observed}};
  j["de"] = {{"pop_size", cfg.de.pop_size},
             {"mu", cfg.de.mu},
             {"cr", cfg.de.cr},
             {"generations", cfg.de.generations},
             {"threshold", cfg.de.threshold},
             {"context_free", cfg.context_free_de},
             {"fitness_classifier", classifier_to_json(ClassifierConfig{})},
             {"fitness_folds", cfg.fitness_folds}};
  j["ci"] = {{"test", "fisher-z"}, {"alpha", cfg.ci.alpha}, {"max_cond_size", cfg.ci.max_cond_size}};
  Json classifiers = Json::array();
  for (const auto& c : cfg.classifiers) classifiers.push_back(classifier_to_json(c));
  j["classifiers"] = classifiers;
  j["eval_folds"] = cfg.eval_folds;
  return j;
}

Json report_to_json(const RunReport& report, bool include_timing) {
  Json j;
  j["spec_version"] = kReportVersion;
  j["dataset"] = report.dataset;
  j["instances"] = report.instances;
  j["features"] = report.features;
  j["missing_cells"] = report.missing_cells;
  j["config"] = config_to_json(report.config);
  j["seeds"] = {{"master", report.config.master_seed},
                {"mask", report.seeds.mask},
                {"evaluation_folds", report.seeds.evaluation_folds},
                {"classifier", report.seeds.classifier}};
  j["selected"] = report.selected;
  j["n_selected"] = report.selected.size();
  Json acc = Json::object();
  for (const auto& a : report.accuracies) acc[a.classifier] = a.accuracy;
  j["accuracy"] = acc;
  Json trace = Json::array();
  for (const auto& t : report.trace) {
    trace.push_back({{"window", t.window},
                     {"first_feature", t.first_feature},
                     {"width", t.width},
                     {"observed_cells", t.observed_cells},
                     {"lfa_seed", t.lfa_seed},
                     {"lfa_epochs", t.lfa_epochs},
                     {"lfa_final_loss", t.lfa_final_loss},
                     {"de_seed", t.de_seed},
                     {"de_best_fitness", t.de_best_fitness},
                     {"de_best_history", history_to_json(t.de_history)},
                     {"de_selected", t.de_selected},
                     {"admitted", t.admitted},
                     {"pruned", t.pruned}});
  }
  j["trace"] = trace;
  if (include_timing) {
    j["timing_s"] = {{"impute", report.timing.impute_s},
                     {"evolve", report.timing.evolve_s},
                     {"filter", report.timing.filter_s},
                     {"evaluate", report.timing.evaluate_s},
                     {"total", report.timing.total_s}};
  }
  return j;
}

Json comparison_to_json(const ComparisonReport& report) {
  Json j;
  j["spec_version"] = kReportVersion;
  j["classifier"] = report.classifier;
  j["a"] = report.label_a;
  j["b"] = report.label_b;
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"dataset", r.dataset},
                    {"seed", r.seed},
                    {"accuracy_a", r.accuracy_a},
                    {"accuracy_b", r.accuracy_b},
                    {"diff", r.accuracy_a - r.accuracy_b}});
  }
  j["rows"] = rows;
  Json medians = Json::array();
  for (std::size_t i = 0; i < report.datasets.size(); ++i) {
    medians.push_back({{"dataset", report.datasets[i]}, {"median_a", report.median_a[i]}, {"median_b", report.median_b[i]}});
  }
  j["medians"] = medians;
  if (report.test) {
    j["wilcoxon"] = {{"r_plus", report.test->r_plus},
                     {"r_minus", report.test->r_minus},
                     {"n_effective", report.test->n_effective},
                     {"p_value", report.test->p_value},
                     {"exact", report.test->exact}};
  } else {
    j["wilcoxon"] = nullptr;
  }
  j["verdict"] = report.verdict;
  return j;
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

std::string de_history_csv(const RunReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "window,generation,best_fitness,mean_fitness\n";
  for (const auto& t : report.trace) {
    for (const auto& g : t.de_history) {
      out << t.window << ',' << g.generation << ',' << g.best_fitness << ',' << g.mean_fitness << '\n';
    }
  }
  return out.str();
}

}  // namespace ssfs
