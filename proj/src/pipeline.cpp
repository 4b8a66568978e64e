#include "facade_bn/pipeline.hpp"

#include <algorithm>
#include <set>

namespace facade_bn {

namespace {

template <typename F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

}  // namespace

std::vector<std::string> sink_test_conditioning(const Dag& dag, std::size_t parent, std::size_t sink) {
  std::set<std::size_t> given;
  for (auto p : dag.parents(parent)) given.insert(p);
  for (auto p : dag.parents(sink)) {
    if (p != parent) given.insert(p);
  }
  given.erase(sink);
  std::vector<std::string> names;
  for (auto g : given) names.push_back(dag.name(g));
  return names;
}

Json run_pipeline(const Dataset& data, const PipelineConfig& config) {
  const auto& schema = data.schema();
  Json report;
  report["n"] = data.rows();
  report["seed"] = config.search.seed;

  const Dag initial = stage("initial_model", [&] {
    return parse_model_string(config.initial_model, schema, ParseOptions{.lenient = true});
  });
  report["initial_model"] = stage("initial_model", [&] {
    return Json{{"model", to_model_string(initial)},
                {"bic", to_json(bic_score(initial, data))},
                {"bdeu", to_json(bdeu_score(initial, data, config.search.iss))},
                {"constraints_ok", check_constraints(initial, config.search.constraints).ok}};
  });
  report["arc_strength"] = stage("arc_strength", [&] {
    return Json{{"x2", to_json(arc_strength(initial, data, CITestKind::PearsonX2))},
                {"mi", to_json(arc_strength(initial, data, CITestKind::MutualInformation))}};
  });

  const auto result = stage("search", [&] { return run_search(data, config.search); });
  report["search"] = to_json(result);

  const auto& sink_name = config.search.constraints.sink_variable;
  report["ci_tests"] = stage("ci_tests", [&] {
    Json blocks = Json::array();
    for (const auto& model : result.top) {
      const Dag dag = parse_model_string(model.model_string, schema);
      const auto sink = dag.index_of(sink_name);
      Json tests = Json::array();
      for (auto parent : dag.parents(sink)) {
        const auto given = sink_test_conditioning(dag, parent, sink);
        tests.push_back({{"mi", to_json(mi_test(data, sink_name, dag.name(parent), given))},
                         {"x2", to_json(x2_test(data, sink_name, dag.name(parent), given))}});
      }
      blocks.push_back({{"rank", model.rank}, {"model", model.model_string}, {"tests", tests}});
    }
    return blocks;
  });

  if (result.top.empty()) return report;
  const Dag best = parse_model_string(result.top.front().model_string, schema);
  report["queries"] = stage("queries", [&] {
    const auto fitted = fit_mle(best, data);
    Json queries = Json::array();
    for (const auto& var : config.query_variables) {
      if (!schema.find(var) || var == sink_name) continue;
      for (const auto& level : schema.variable(schema.index_of(var)).levels) {
        Json entry = {{"evidence", {{var, level}}}};
        try {
          entry["posterior"] = to_json(query(fitted, sink_name, {{var, level}}));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::ZeroProbabilityEvidence) throw;
          entry["posterior"] = nullptr;
          entry["error"] = e.what();
        }
        queries.push_back(std::move(entry));
      }
    }
    return queries;
  });

  report["mcmc"] = stage("mcmc", [&] {
    const auto run = sample_posterior(best, data, config.mcmc);
    return Json{{"model", result.top.front().model_string},
                {"chains", config.mcmc.chains},
                {"iters", config.mcmc.iters},
                {"warmup", config.mcmc.warmup},
                {"seed", config.mcmc.seed},
                {"acceptance", run.acceptance},
                {"coefficients", to_json(diagnostics_report(run.coefficients))}};
  });
  return report;
}

}  // namespace facade_bn
