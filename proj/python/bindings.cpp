#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "facade_bn/json_io.hpp"
#include "facade_bn/pipeline.hpp"

namespace py = pybind11;
namespace fbn = facade_bn;

namespace {

py::object to_py(const fbn::Json& j) {
  switch (j.type()) {
    case fbn::Json::value_t::null: return py::none();
    case fbn::Json::value_t::boolean: return py::bool_(j.get<bool>());
    case fbn::Json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case fbn::Json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case fbn::Json::value_t::number_float: return py::float_(j.get<double>());
    case fbn::Json::value_t::string: return py::str(j.get<std::string>());
    case fbn::Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(to_py(item));
      return out;
    }
    case fbn::Json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = to_py(value);
      return out;
    }
    default: return py::none();
  }
}

fbn::Schema schema_from_list(const std::vector<std::pair<std::string, std::vector<std::string>>>& vars) {
  std::vector<fbn::VariableSpec> specs;
  for (const auto& [name, levels] : vars) specs.push_back({name, levels});
  return fbn::Schema(std::move(specs));
}

fbn::DagConstraints make_constraints(const std::string& sink, std::size_t min_arcs, std::size_t sink_in_degree) {
  fbn::DagConstraints c;
  c.sink_variable = sink;
  c.min_arcs = min_arcs;
  c.require_sink_in_degree = sink_in_degree;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Discrete Bayesian-network toolkit: scoring, CI tests, search, exact inference, MCMC diagnostics";
  m.attr("__version__") = FACADE_BN_VERSION;
  m.attr("INITIAL_FACADE_MODEL") = fbn::kInitialFacadeModel;

  py::register_exception<fbn::Error>(m, "Error", PyExc_ValueError);

  py::class_<fbn::Schema>(m, "Schema")
      .def(py::init(&schema_from_list), py::arg("variables"),
           "Build from [(name, [level, ...]), ...].")
      .def_property_readonly("names", &fbn::Schema::names)
      .def("levels", [](const fbn::Schema& s, const std::string& name) {
        return s.variable(s.index_of(name)).levels;
      })
      .def("__len__", &fbn::Schema::size)
      .def("joint_state_count", &fbn::Schema::joint_state_count)
      .def("to_dict", [](const fbn::Schema& s) { return to_py(fbn::to_json(s)); });

  m.def("default_facade_schema", &fbn::default_facade_schema);

  py::class_<fbn::Dataset>(m, "Dataset")
      .def_property_readonly("schema", &fbn::Dataset::schema)
      .def_property_readonly("rows", &fbn::Dataset::rows)
      .def_readonly("warnings", &fbn::Dataset::warnings)
      .def("__len__", &fbn::Dataset::rows)
      .def("to_csv", [](const fbn::Dataset& d) { return fbn::to_csv(d); });

  m.def(
      "load_dataset",
      [](const std::string& csv_text, const fbn::Schema& schema, bool drop_missing) {
        return fbn::load_dataset(csv_text, schema,
                                 drop_missing ? fbn::MissingPolicy::DropRow : fbn::MissingPolicy::Reject);
      },
      py::arg("csv_text"), py::arg("schema"), py::arg("drop_missing") = false);
  m.def(
      "load_dataset_file",
      [](const std::string& path, const fbn::Schema& schema, bool drop_missing) {
        return fbn::load_dataset_file(path, schema,
                                      drop_missing ? fbn::MissingPolicy::DropRow : fbn::MissingPolicy::Reject);
      },
      py::arg("path"), py::arg("schema"), py::arg("drop_missing") = false);

  py::class_<fbn::Dag>(m, "Dag")
      .def_property_readonly("nodes", &fbn::Dag::nodes)
      .def_property_readonly("arc_count", &fbn::Dag::arc_count)
      .def("arcs", [](const fbn::Dag& d) {
        std::vector<std::pair<std::string, std::string>> out;
        for (auto [f, t] : d.arcs()) out.emplace_back(d.name(f), d.name(t));
        return out;
      })
      .def("set_arc", [](const fbn::Dag& d, const std::string& from, const std::string& to) {
        return fbn::set_arc(d, from, to);
      })
      .def("__eq__", [](const fbn::Dag& a, const fbn::Dag& b) { return a == b; })
      .def("__str__", &fbn::to_model_string);

  m.def("empty_dag", &fbn::Dag::empty, py::arg("schema"));
  m.def(
      "parse_model_string",
      [](const std::string& text, const fbn::Schema& schema, bool lenient) {
        return fbn::parse_model_string(text, schema, fbn::ParseOptions{.lenient = lenient});
      },
      py::arg("text"), py::arg("schema"), py::arg("lenient") = false);
  m.def("to_model_string", &fbn::to_model_string);
  m.def(
      "check_constraints",
      [](const fbn::Dag& d, const std::string& sink, std::size_t min_arcs, std::size_t sink_in_degree) {
        const auto check = fbn::check_constraints(d, make_constraints(sink, min_arcs, sink_in_degree));
        return py::make_tuple(check.ok, check.violations);
      },
      py::arg("dag"), py::arg("sink") = "CE", py::arg("min_arcs") = 5, py::arg("sink_in_degree") = 1);
  m.def(
      "random_dag",
      [](const fbn::Schema& schema, std::uint64_t seed, const std::string& sink, std::size_t min_arcs, double p) {
        return fbn::random_dag(schema, make_constraints(sink, min_arcs, 1), seed, {p, 10000});
      },
      py::arg("schema"), py::arg("seed"), py::arg("sink") = "CE", py::arg("min_arcs") = 5, py::arg("p") = 0.25);

  m.def("param_count", &fbn::param_count);
  m.def(
      "score",
      [](const fbn::Dag& d, const fbn::Dataset& data, const std::string& type, double iss) {
        return to_py(fbn::to_json(fbn::score(d, data, fbn::parse_score_type(type), iss)));
      },
      py::arg("dag"), py::arg("data"), py::arg("type") = "bic", py::arg("iss") = 1.0);

  m.def("chi2_sf", &fbn::chi2_sf, py::arg("statistic"), py::arg("df"));
  m.def(
      "ci_test",
      [](const fbn::Dataset& data, const std::string& x, const std::string& y,
         const std::vector<std::string>& given, const std::string& test) {
        return to_py(fbn::to_json(fbn::ci_test(data, x, y, given, fbn::parse_ci_test_kind(test))));
      },
      py::arg("data"), py::arg("x"), py::arg("y"), py::arg("given") = std::vector<std::string>{},
      py::arg("test") = "mi");
  m.def(
      "arc_strength",
      [](const fbn::Dag& d, const fbn::Dataset& data, const std::string& criterion) {
        return to_py(fbn::to_json(fbn::arc_strength(d, data, fbn::parse_ci_test_kind(criterion))));
      },
      py::arg("dag"), py::arg("data"), py::arg("criterion") = "x2");

  py::class_<fbn::FittedNetwork>(m, "FittedNetwork")
      .def_readonly("dag", &fbn::FittedNetwork::dag)
      .def_readonly("n", &fbn::FittedNetwork::n)
      .def("to_dict", [](const fbn::FittedNetwork& f) { return to_py(fbn::to_json(f)); })
      .def("to_json", [](const fbn::FittedNetwork& f) { return fbn::to_json(f).dump(); })
      .def_static("from_json", [](const std::string& text) { return fbn::fitted_from_json(fbn::Json::parse(text)); });

  m.def("fit_mle", &fbn::fit_mle, py::arg("dag"), py::arg("data"));
  m.def(
      "query",
      [](const fbn::FittedNetwork& f, const std::string& target, const fbn::Evidence& evidence) {
        return to_py(fbn::to_json(fbn::query(f, target, evidence)));
      },
      py::arg("fitted"), py::arg("target"), py::arg("evidence") = fbn::Evidence{});
  m.def(
      "joint_probability",
      [](const fbn::FittedNetwork& f, const fbn::Evidence& assignment) {
        return fbn::joint_probability(f, assignment).value;
      },
      py::arg("fitted"), py::arg("assignment"));
  m.def("forward_sample", &fbn::forward_sample, py::arg("fitted"), py::arg("n"), py::arg("seed"),
        py::arg("allow_unsupported") = false);

  m.def(
      "search",
      [](const fbn::Dataset& data, std::size_t n, std::size_t top, std::uint64_t seed, const std::string& sink,
         std::size_t min_arcs, const std::string& score_type) {
        fbn::SearchConfig config;
        config.pool_size = n;
        config.top = top;
        config.seed = seed;
        config.constraints = make_constraints(sink, min_arcs, 1);
        config.score_type = fbn::parse_score_type(score_type);
        fbn::SearchResult result;
        {
          py::gil_scoped_release release;
          result = fbn::run_search(data, config);
        }
        return to_py(fbn::to_json(result));
      },
      py::arg("data"), py::arg("n") = 200, py::arg("top") = 5, py::arg("seed") = 1, py::arg("sink") = "CE",
      py::arg("min_arcs") = 5, py::arg("score") = "bic");
  m.def(
      "top_networks",
      [](const std::vector<std::pair<std::string, double>>& scored, std::size_t k) {
        std::vector<fbn::ScoredEntry> entries;
        for (const auto& [model, s] : scored) entries.push_back({model, s});
        std::vector<std::pair<std::string, double>> out;
        for (const auto& m : fbn::top_networks(entries, k)) out.emplace_back(m.model_string, m.score);
        return out;
      },
      py::arg("scored"), py::arg("k"));

  m.def("ess", [](const std::vector<double>& t) { return fbn::ess(t); });
  m.def("mcse", [](const std::vector<double>& t) { return fbn::mcse(t); });
  m.def("acf", [](const std::vector<double>& t, std::size_t max_lag) { return fbn::acf(t, max_lag); });
  m.def("psrf", &fbn::psrf);
  m.def(
      "mcmc",
      [](const fbn::Dag& d, const fbn::Dataset& data, std::size_t chains, std::size_t iters, std::size_t warmup,
         std::uint64_t seed, double iss) {
        fbn::McmcConfig config{iss, chains, iters, warmup, seed, false};
        std::vector<fbn::CoefficientReport> reports;
        {
          py::gil_scoped_release release;
          reports = fbn::diagnostics_report(fbn::sample_posterior(d, data, config).coefficients);
        }
        return to_py(fbn::to_json(reports));
      },
      py::arg("dag"), py::arg("data"), py::arg("chains") = 4, py::arg("iters") = 5000, py::arg("warmup") = 1000,
      py::arg("seed") = 1, py::arg("iss") = 1.0);

  m.def(
      "pipeline",
      [](const fbn::Dataset& data, std::uint64_t seed, std::size_t n, std::size_t top, std::size_t mcmc_iters) {
        fbn::PipelineConfig config;
        config.search.seed = seed;
        config.search.pool_size = n;
        config.search.top = top;
        config.mcmc.seed = seed;
        config.mcmc.iters = mcmc_iters;
        fbn::Json report;
        {
          py::gil_scoped_release release;
          report = fbn::run_pipeline(data, config);
        }
        return to_py(report);
      },
      py::arg("data"), py::arg("seed") = 1, py::arg("n") = 200, py::arg("top") = 5, py::arg("mcmc_iters") = 5000);
}
