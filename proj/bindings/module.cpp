#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "autocore/autocoreset.hpp"
#include "autocore/csv.hpp"
#include "autocore/experiment.hpp"
#include "autocore/metrics.hpp"
#include "autocore/synthetic.hpp"

namespace py = pybind11;
using namespace autocore;

namespace {

Dataset dataset_from_arrays(const Eigen::MatrixXd& points,
                            std::optional<Eigen::VectorXd> labels,
                            const std::string& name) {
  return make_dataset(points, std::move(labels), name);
}

LossMatrix matrix_from_array(const RowMatrix& entries) {
  // column queries are unknown for a raw matrix; keep placeholders
  std::vector<Query> queries(static_cast<std::size_t>(entries.cols()));
  return make_loss_matrix(entries, std::move(queries));
}

AutoConfig config_from_kwargs(Eigen::Index tau, int m, int patience,
                              int max_iterations, const std::string& backend,
                              const std::string& mode, const std::string& error_mode,
                              std::uint64_t seed, double lambda, int k,
                              int solver_max_iterations) {
  AutoConfig config;
  config.tau = tau;
  config.m = m;
  config.patience = patience;
  config.max_iterations = max_iterations;
  config.backend = backend_from_name(backend);
  config.mode = mode == "last" ? CoresetMode::Last : CoresetMode::Optimal;
  config.error_mode =
      error_mode == "multiplicative" ? ErrorMode::Multiplicative : ErrorMode::Additive;
  config.seed = seed;
  config.solver.lambda = lambda;
  config.solver.k = k;
  config.solver.max_iterations = solver_max_iterations;
  return config;
}

}  // namespace

PYBIND11_MODULE(_autocore, module) {
  module.doc() = "Automatic coreset construction over discovered-query loss matrices";

  py::class_<Dataset>(module, "Dataset")
      .def(py::init(&dataset_from_arrays), py::arg("points"),
           py::arg("labels") = std::nullopt, py::arg("name") = "")
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("dim", &Dataset::dim)
      .def_readonly("points", &Dataset::points)
      .def_property_readonly("labels",
                             [](const Dataset& d) { return d.labels; })
      .def_readonly("name", &Dataset::name);

  py::class_<Query>(module, "Query")
      .def_property_readonly("kind", [](const Query& q) { return task_name(q.kind); })
      .def_readonly("params", &Query::params)
      .def_readonly("centers", &Query::centers);

  py::class_<Coreset>(module, "Coreset")
      .def_readonly("indices", &Coreset::indices)
      .def_readonly("weights", &Coreset::weights)
      .def_readonly("source", &Coreset::source)
      .def_readonly("vsum_error", &Coreset::vsum_error)
      .def_readonly("degenerate", &Coreset::degenerate)
      .def("__len__", &Coreset::size);

  py::class_<LossMatrix>(module, "LossMatrix")
      .def(py::init(&matrix_from_array), py::arg("entries"))
      .def_readonly("entries", &LossMatrix::entries)
      .def_property_readonly("shape", [](const LossMatrix& m) {
        return py::make_tuple(m.rows(), m.cols());
      });

  py::class_<IterationRecord>(module, "IterationRecord")
      .def_readonly("column_sum", &IterationRecord::column_sum)
      .def_readonly("vsum_error", &IterationRecord::vsum_error)
      .def_readonly("coreset_size", &IterationRecord::coreset_size)
      .def_readonly("patience_counter", &IterationRecord::patience_counter);

  py::class_<RunTrace>(module, "RunTrace")
      .def_readonly("records", &RunTrace::records)
      .def_readonly("best_iteration", &RunTrace::best_iteration);

  py::class_<AutoResult>(module, "AutoResult")
      .def_readonly("coreset", &AutoResult::coreset)
      .def_readonly("query", &AutoResult::query)
      .def_readonly("trace", &AutoResult::trace)
      .def_readonly("matrix", &AutoResult::matrix)
      .def_readonly("built_on_columns", &AutoResult::built_on_columns)
      .def_readonly("raw_column_sums", &AutoResult::raw_column_sums);

  module.def(
      "generate_synthetic",
      [](const std::string& generator, Eigen::Index n, Eigen::Index d, double noise,
         int k, double balance, double separation, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.generator = generator;
        spec.n = n;
        spec.d = d;
        spec.noise = noise;
        spec.k = k;
        spec.balance = balance;
        spec.separation = separation;
        return generate_synthetic(spec, seed);
      },
      py::arg("generator"), py::arg("n") = 100, py::arg("d") = 2,
      py::arg("noise") = 1.0, py::arg("k") = 3, py::arg("balance") = 0.5,
      py::arg("separation") = 8.0, py::arg("seed") = 0);

  module.def("load_csv",
             [](const std::string& path, const std::string& label_column,
                const std::string& task) {
               return load_csv(path, label_column, task_from_name(task));
             },
             py::arg("path"), py::arg("label_column"), py::arg("task"));

  module.def("eval_loss_column",
             [](const std::string& task, const Dataset& data, const Query& query) {
               return eval_loss_column(builtin_loss(task_from_name(task)), data, query);
             },
             py::arg("task"), py::arg("data"), py::arg("query"));

  module.def("multiplicative_transform", &multiplicative_transform, py::arg("column"));

  module.def("vsum_error", &vsum_error, py::arg("matrix"), py::arg("coreset"));
  module.def("caratheodory", &caratheodory, py::arg("matrix"), py::arg("seed") = 0);
  module.def("frank_wolfe", &frank_wolfe, py::arg("matrix"), py::arg("tau"),
             py::arg("seed") = 0);
  module.def("median_of_means",
             [](const LossMatrix& matrix, Eigen::Index tau, double delta,
                std::uint64_t seed) { return median_of_means(matrix, tau, delta, seed); },
             py::arg("matrix"), py::arg("tau"), py::arg("delta") = 0.1,
             py::arg("seed") = 0);
  module.def("sensitivity_sampling", &sensitivity_sampling, py::arg("matrix"),
             py::arg("tau"), py::arg("delta") = 0.1, py::arg("seed") = 0);
  module.def("uniform_sampling", &uniform_sampling, py::arg("matrix"), py::arg("tau"),
             py::arg("seed") = 0);
  module.def("one_mean_sensitivities", [](const LossMatrix& matrix) {
    const Sensitivities s = one_mean_sensitivities(matrix);
    return py::make_tuple(s.scores, s.total);
  });

  module.def(
      "autocoreset",
      [](const Dataset& data, const std::string& task, Eigen::Index tau, int m,
         int patience, int max_iterations, const std::string& backend,
         const std::string& mode, const std::string& error_mode, std::uint64_t seed,
         double lambda, int k, int solver_max_iterations) {
        const Task t = task_from_name(task);
        return autocoreset(data, builtin_loss(t), t,
                           config_from_kwargs(tau, m, patience, max_iterations,
                                              backend, mode, error_mode, seed, lambda,
                                              k, solver_max_iterations));
      },
      py::arg("data"), py::arg("task"), py::arg("tau"), py::arg("m") = 10,
      py::arg("patience") = 7, py::arg("max_iterations") = 200,
      py::arg("backend") = "caratheodory", py::arg("mode") = "optimal",
      py::arg("error_mode") = "additive", py::arg("seed") = 0,
      py::arg("lambda_") = 1.0, py::arg("k") = 2,
      py::arg("solver_max_iterations") = 1000);

  module.def(
      "approximation_error",
      [](const Dataset& data, const std::string& task, const Coreset& coreset,
         double lambda, int k, int solver_max_iterations, std::uint64_t seed) {
        const Task t = task_from_name(task);
        SolverConfig config;
        config.lambda = lambda;
        config.k = k;
        config.max_iterations = solver_max_iterations;
        config.seed = seed;
        return approximation_error(data, builtin_loss(t), t, coreset, config);
      },
      py::arg("data"), py::arg("task"), py::arg("coreset"), py::arg("lambda_") = 1.0,
      py::arg("k") = 2, py::arg("solver_max_iterations") = 1000, py::arg("seed") = 0);

  module.def(
      "convex_witness_check",
      [](const LossMatrix& matrix, const Coreset& coreset,
         const std::vector<double>& alpha, int trials, std::uint64_t seed) {
        const WitnessReport report =
            convex_witness_check(matrix, coreset, make_convex_weights(alpha), trials, seed);
        return py::make_tuple(report.ok(), report.checked, report.failed,
                              report.max_violation);
      },
      py::arg("matrix"), py::arg("coreset"), py::arg("alpha"), py::arg("trials") = 100,
      py::arg("seed") = 13);

  module.def(
      "run_experiment_json",
      [](const std::string& config_json, const std::string& output_dir, int threads) {
        ExperimentConfig config = config_from_json(nlohmann::json::parse(config_json));
        config.output_dir = output_dir;
        config.threads = threads;
        const ExperimentOutcome outcome = run_experiment(config);
        return py::make_tuple(outcome.report.dump(2), outcome.json_path,
                              outcome.csv_path, outcome.failed_trials);
      },
      py::arg("config_json"), py::arg("output_dir") = "reports", py::arg("threads") = 0);
}
