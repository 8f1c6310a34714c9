#include "ssfs/ssfs.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

ssfs::SparseWindow make_window(const ssfs::Matrix& values, const ssfs::BoolMatrix& observed, int index) {
  std::vector<std::size_t> ids(static_cast<std::size_t>(values.cols()));
  for (std::size_t j = 0; j < ids.size(); ++j) ids[j] = j;
  return ssfs::SparseWindow(index, std::move(ids), values, observed);
}

py::object to_python(const ssfs::Json& json) {
  return py::module_::import("json").attr("loads")(json.dump());
}

void bind_configs(py::module_& m) {
  py::class_<ssfs::LfaConfig>(m, "LfaConfig")
      .def(py::init<>())
      .def_readwrite("rank", &ssfs::LfaConfig::rank)
      .def_readwrite("lambda_", &ssfs::LfaConfig::lambda)
      .def_readwrite("eta", &ssfs::LfaConfig::eta)
      .def_readwrite("max_epochs", &ssfs::LfaConfig::max_epochs)
      .def_readwrite("tol", &ssfs::LfaConfig::tol)
      .def_readwrite("init_scale", &ssfs::LfaConfig::init_scale)
      .def_readwrite("seed", &ssfs::LfaConfig::seed)
      .def_readwrite("keep_observed", &ssfs::LfaConfig::keep_observed);

  py::class_<ssfs::DeConfig>(m, "DeConfig")
      .def(py::init<>())
      .def_readwrite("pop_size", &ssfs::DeConfig::pop_size)
      .def_readwrite("mu", &ssfs::DeConfig::mu)
      .def_readwrite("cr", &ssfs::DeConfig::cr)
      .def_readwrite("generations", &ssfs::DeConfig::generations)
      .def_readwrite("threshold", &ssfs::DeConfig::threshold)
      .def_readwrite("seed", &ssfs::DeConfig::seed);

  py::class_<ssfs::CiConfig>(m, "CiConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &ssfs::CiConfig::alpha)
      .def_readwrite("max_cond_size", &ssfs::CiConfig::max_cond_size);

  py::class_<ssfs::ClassifierConfig>(m, "ClassifierConfig")
      .def(py::init([](const std::string& kind) {
             ssfs::ClassifierConfig c;
             c.kind = ssfs::parse_classifier_kind(kind);
             return c;
           }),
           "kind"_a = "knn")
      .def_property(
          "kind", [](const ssfs::ClassifierConfig& c) { return ssfs::to_string(c.kind); },
          [](ssfs::ClassifierConfig& c, const std::string& k) { c.kind = ssfs::parse_classifier_kind(k); })
      .def_readwrite("k_neighbors", &ssfs::ClassifierConfig::k_neighbors)
      .def_readwrite("n_trees", &ssfs::ClassifierConfig::n_trees)
      .def_readwrite("max_depth", &ssfs::ClassifierConfig::max_depth)
      .def_readwrite("min_samples_split", &ssfs::ClassifierConfig::min_samples_split)
      .def_readwrite("bootstrap", &ssfs::ClassifierConfig::bootstrap)
      .def_readwrite("subsample_features", &ssfs::ClassifierConfig::subsample_features)
      .def_readwrite("seed", &ssfs::ClassifierConfig::seed);

  py::class_<ssfs::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("data_path", &ssfs::RunConfig::data_path)
      .def_readwrite("dataset_name", &ssfs::RunConfig::dataset_name)
      .def_property(
          "label_column", [](const ssfs::RunConfig& c) { return c.label_column.to_string(); },
          [](ssfs::RunConfig& c, const std::string& s) { c.label_column = ssfs::LabelColumn::parse(s); })
      .def_readwrite("missing_rate", &ssfs::RunConfig::missing_rate)
      .def_readwrite("window_size", &ssfs::RunConfig::window_size)
      .def_readwrite("lfa", &ssfs::RunConfig::lfa)
      .def_readwrite("de", &ssfs::RunConfig::de)
      .def_readwrite("ci", &ssfs::RunConfig::ci)
      .def_readwrite("classifiers", &ssfs::RunConfig::classifiers)
      .def_property(
          "strategy", [](const ssfs::RunConfig& c) { return ssfs::to_string(c.strategy); },
          [](ssfs::RunConfig& c, const std::string& s) { c.strategy = ssfs::parse_strategy(s); })
      .def_readwrite("master_seed", &ssfs::RunConfig::master_seed)
      .def_readwrite("fitness_folds", &ssfs::RunConfig::fitness_folds)
      .def_readwrite("eval_folds", &ssfs::RunConfig::eval_folds)
      .def_readwrite("context_free_de", &ssfs::RunConfig::context_free_de)
      .def_readwrite("threads", &ssfs::RunConfig::threads)
      .def("validate", &ssfs::RunConfig::validate);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Online feature selection over sparse streaming features";
  m.attr("__version__") = SSFS_VERSION;

  py::register_exception<ssfs::Error>(m, "Error");
  py::register_exception<ssfs::AllZeroDifferences>(m, "AllZeroDifferences");

  py::class_<ssfs::Dataset>(m, "Dataset")
      .def(py::init([](const ssfs::Matrix& values, std::vector<int> labels) {
             ssfs::Dataset d;
             d.values = values;
             d.labels = std::move(labels);
             ssfs::validate(d);
             return d;
           }),
           "values"_a, "labels"_a)
      .def_readonly("values", &ssfs::Dataset::values)
      .def_readonly("labels", &ssfs::Dataset::labels)
      .def_readonly("feature_names", &ssfs::Dataset::feature_names)
      .def_readonly("class_names", &ssfs::Dataset::class_names)
      .def_property_readonly("n_classes", &ssfs::Dataset::n_classes)
      .def_property_readonly("shape", [](const ssfs::Dataset& d) { return py::make_tuple(d.rows(), d.cols()); });

  m.def(
      "load_csv",
      [](const std::filesystem::path& path, const std::string& label_column) {
        return ssfs::load_csv(path, ssfs::LabelColumn::parse(label_column));
      },
      "path"_a, "label_column"_a = "last");
  m.def("write_csv", &ssfs::write_csv, "path"_a, "data"_a);

  m.def(
      "make_planted_dataset",
      [](std::size_t samples, std::size_t features, std::vector<std::size_t> informative, std::size_t n_informative,
         double noise, double label_factor, std::size_t latent_rank, std::uint64_t seed) {
        ssfs::SynthConfig cfg;
        cfg.samples = samples;
        cfg.features = features;
        cfg.informative = std::move(informative);
        cfg.n_informative = n_informative;
        cfg.noise = noise;
        cfg.label_factor = label_factor;
        cfg.latent_rank = latent_rank;
        cfg.seed = seed;
        return ssfs::make_planted_dataset(cfg);
      },
      "samples"_a = 300, "features"_a = 60, "informative"_a = std::vector<std::size_t>{}, "n_informative"_a = 5,
      "noise"_a = 0.5, "label_factor"_a = 1.0, "latent_rank"_a = 3, "seed"_a = 0);

  m.def(
      "make_mask",
      [](ssfs::Index rows, ssfs::Index cols, double rate, std::uint64_t seed) {
        return ssfs::BoolMatrix(ssfs::make_mask(rows, cols, rate, seed).observed);
      },
      "rows"_a, "cols"_a, "missing_rate"_a, "seed"_a, "Observation mask (True = observed).");
  m.def("standardize_observed", &ssfs::standardize_observed, "values"_a, "observed"_a);

  bind_configs(m);

  m.def(
      "element_loss",
      [](double f, std::vector<double> x, std::vector<double> y, double lambda) {
        return ssfs::element_loss(f, x, y, lambda);
      },
      "f"_a, "x"_a, "y"_a, "lambda_"_a);
  m.def(
      "lfa_train",
      [](const ssfs::Matrix& values, const ssfs::BoolMatrix& observed, const ssfs::LfaConfig& cfg) {
        auto result = ssfs::train(make_window(values, observed, 1), cfg);
        return py::make_tuple(ssfs::RowMatrix(result.factors.x), ssfs::RowMatrix(result.factors.y), result.trace);
      },
      "values"_a, "observed"_a, "config"_a = ssfs::LfaConfig{}, "Returns (X, Y, per-epoch losses).");
  m.def(
      "lfa_complete",
      [](const ssfs::Matrix& values, const ssfs::BoolMatrix& observed, const ssfs::LfaConfig& cfg) {
        const auto window = make_window(values, observed, 1);
        const auto trained = ssfs::train(window, cfg);
        return ssfs::complete_window(trained.factors, window, cfg.keep_observed).values;
      },
      "values"_a, "observed"_a, "config"_a = ssfs::LfaConfig{});

  m.def("mutate", py::overload_cast<const ssfs::Genes&, const ssfs::Genes&, const ssfs::Genes&, double>(&ssfs::mutate),
        "a"_a, "b"_a, "c"_a, "mu"_a);
  m.def(
      "binarize", [](const ssfs::Genes& genes, double threshold) { return ssfs::binarize(genes, threshold).bits; },
      "genes"_a, "threshold"_a = 0.5);
  m.def(
      "evolve_window",
      [](const ssfs::Matrix& window, std::vector<int> labels, const ssfs::DeConfig& cfg, const std::optional<ssfs::Matrix>& selected,
         int folds, std::uint64_t fold_seed) {
        ssfs::EvalContext ctx(window, selected ? *selected : ssfs::Matrix(window.rows(), 0), std::move(labels),
                              ssfs::ClassifierConfig{}, folds, fold_seed);
        const auto result = ssfs::evolve_window(ctx, cfg);
        std::vector<double> best;
        for (const auto& g : result.history) best.push_back(g.best_fitness);
        return py::dict("mask"_a = result.best_mask.bits, "fitness"_a = result.best_fitness, "history"_a = best);
      },
      "window"_a, "labels"_a, "config"_a = ssfs::DeConfig{}, "selected"_a = py::none(), "folds"_a = 3, "fold_seed"_a = 0);

  m.def(
      "cross_val_accuracy",
      [](const ssfs::Matrix& x, const std::vector<int>& y, const ssfs::ClassifierConfig& cfg, int folds,
         std::uint64_t seed) { return ssfs::cross_val_accuracy(x, y, cfg, folds, seed); },
      "x"_a, "y"_a, "config"_a = ssfs::ClassifierConfig{}, "folds"_a = 3, "seed"_a = 0);

  m.def(
      "partial_correlation",
      [](const ssfs::Matrix& data, ssfs::Index i, ssfs::Index j, const std::vector<ssfs::Index>& cond) {
        return ssfs::partial_correlation(data, i, j, cond).r;
      },
      "data"_a, "i"_a, "j"_a, "cond"_a = std::vector<ssfs::Index>{});
  m.def(
      "fisher_z_test",
      [](double r, std::size_t n, std::size_t cond_size, double alpha) {
        const auto t = ssfs::fisher_z_test(r, n, cond_size, alpha);
        return py::make_tuple(t.p_value, t.independent);
      },
      "r"_a, "n_samples"_a, "cond_size"_a = 0, "alpha"_a = 0.05, "Returns (p_value, independent).");

  m.def(
      "wilcoxon_signed_rank",
      [](const std::vector<double>& diffs) {
        const auto r = ssfs::wilcoxon_signed_rank(diffs);
        return py::dict("r_plus"_a = r.r_plus, "r_minus"_a = r.r_minus, "n_effective"_a = r.n_effective,
                        "p_value"_a = r.p_value, "exact"_a = r.exact);
      },
      "diffs"_a);

  m.def(
      "run",
      [](const ssfs::Dataset& data, const ssfs::RunConfig& cfg) {
        ssfs::RunReport report;
        {
          py::gil_scoped_release release;
          report = ssfs::run(data, cfg);
        }
        return to_python(ssfs::report_to_json(report));
      },
      "data"_a, "config"_a, "Run the full pipeline; returns the report as a dict.");
  m.def(
      "run_file",
      [](const ssfs::RunConfig& cfg) {
        ssfs::RunReport report;
        {
          py::gil_scoped_release release;
          report = ssfs::run(cfg);
        }
        return to_python(ssfs::report_to_json(report));
      },
      "config"_a);
  m.def(
      "compare",
      [](const std::vector<std::pair<std::string, ssfs::Dataset>>& datasets, const ssfs::RunConfig& a,
         const ssfs::RunConfig& b, const std::vector<std::uint64_t>& seeds, const std::string& classifier) {
        std::vector<ssfs::NamedDataset> named;
        for (const auto& [name, data] : datasets) named.push_back({name, data});
        ssfs::ComparisonReport report;
        {
          py::gil_scoped_release release;
          report = ssfs::compare(named, a, b, seeds, classifier);
        }
        return to_python(ssfs::comparison_to_json(report));
      },
      "datasets"_a, "a"_a, "b"_a, "seeds"_a, "classifier"_a = "knn");
}
