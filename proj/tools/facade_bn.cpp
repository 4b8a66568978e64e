// facade-bn: batch front end for the discrete Bayesian-network toolkit.
//
// Exit codes: 0 success, 2 input/data error, 3 constraint or statistical
// error, 64 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "facade_bn/json_io.hpp"
#include "facade_bn/pipeline.hpp"
#include "facade_bn/trace_io.hpp"

namespace fbn = facade_bn;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitStatistical = 3;
constexpr int kExitUsage = 64;
constexpr std::uint64_t kDefaultSeed = 1;

struct Common {
  std::string data;
  std::string schema;
  std::string missing = "reject";
  std::string model;
  bool lenient = false;
};

fbn::Schema load_schema(const Common& c) {
  return c.schema.empty() ? fbn::default_facade_schema() : fbn::load_schema_file(c.schema);
}

fbn::Dataset load_data(const Common& c) {
  const auto policy = c.missing == "drop" ? fbn::MissingPolicy::DropRow : fbn::MissingPolicy::Reject;
  return fbn::load_dataset_file(c.data, load_schema(c), policy);
}

fbn::Dag load_model(const Common& c, const fbn::Schema& schema) {
  return fbn::parse_model_string(c.model, schema, fbn::ParseOptions{.lenient = c.lenient});
}

// Explicit flag, else FACADE_BN_SEED, else the default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FACADE_BN_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw fbn::Error(fbn::ErrorKind::DomainError, std::string("FACADE_BN_SEED is not an integer: ") + env);
    }
  }
  return kDefaultSeed;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

fbn::Evidence parse_evidence(const std::string& text) {
  fbn::Evidence ev;
  for (const auto& item : split_list(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw fbn::Error(fbn::ErrorKind::DomainError, "evidence item '" + item + "' is not VAR=LEVEL");
    }
    if (!ev.emplace(item.substr(0, eq), item.substr(eq + 1)).second) {
      throw fbn::Error(fbn::ErrorKind::DomainError, "variable repeated in evidence: " + item.substr(0, eq));
    }
  }
  return ev;
}

void emit(const fbn::Json& j) { std::cout << j.dump(2) << '\n'; }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw fbn::Error(fbn::ErrorKind::Io, "cannot write '" + path + "'");
  out << content;
}

void add_data_options(CLI::App* cmd, Common& c, bool required = true) {
  auto* opt = cmd->add_option("--data", c.data, "CSV observation file");
  if (required) opt->required();
  cmd->add_option("--schema", c.schema, "schema JSON (default: facade schema)");
  cmd->add_option("--missing", c.missing, "missing-cell policy")
      ->check(CLI::IsMember({"reject", "drop"}));
}

void add_model_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--model", c.model, "model string, e.g. [A][B|A]")->required();
  cmd->add_flag("--lenient", c.lenient, "accept MOD as an alias for MD");
}

void add_constraint_options(CLI::App* cmd, fbn::DagConstraints& k) {
  cmd->add_option("--min-arcs", k.min_arcs, "minimum number of arcs")->capture_default_str();
  cmd->add_option("--sink", k.sink_variable, "variable that receives but never emits arcs")
      ->capture_default_str();
  cmd->add_option("--sink-in-degree", k.require_sink_in_degree, "minimum in-degree of the sink")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Bayesian-network toolkit: scoring, CI tests, search, inference, MCMC"};
  app.name("facade-bn");
  app.require_subcommand(1);
  app.set_version_flag("--version", FACADE_BN_VERSION);

  Common common;
  std::optional<std::uint64_t> seed;
  std::string out_path;

  auto* validate = app.add_subcommand("validate", "load and validate a dataset");
  add_data_options(validate, common);

  auto* schema_cmd = app.add_subcommand("schema", "print a schema as JSON");
  std::string schema_action = "dump";
  schema_cmd->add_option("action", schema_action, "dump")->check(CLI::IsMember({"dump"}));
  schema_cmd->add_option("--schema", common.schema, "schema JSON (default: facade schema)");

  auto* dag = app.add_subcommand("dag", "parse, print or generate DAGs");
  dag->require_subcommand(1);
  auto* dag_parse = dag->add_subcommand("parse", "parse a model string");
  auto* dag_print = dag->add_subcommand("print", "print the canonical model string");
  auto* dag_random = dag->add_subcommand("random", "draw a constrained random DAG");
  fbn::DagConstraints constraints;
  fbn::RandomDagOptions dag_options;
  std::size_t dag_count = 1;
  for (auto* cmd : {dag_parse, dag_print}) {
    add_model_options(cmd, common);
    cmd->add_option("--schema", common.schema, "schema JSON (default: facade schema)");
  }
  add_constraint_options(dag_parse, constraints);
  add_constraint_options(dag_random, constraints);
  dag_random->add_option("--schema", common.schema, "schema JSON (default: facade schema)");
  dag_random->add_option("--seed", seed, "random seed");
  dag_random->add_option("--p", dag_options.arc_probability, "forward-arc probability")->capture_default_str();
  dag_random->add_option("--max-tries", dag_options.max_tries, "rejection budget")->capture_default_str();
  dag_random->add_option("--count", dag_count, "number of distinct DAGs")->capture_default_str();

  auto* score_cmd = app.add_subcommand("score", "score a DAG against data");
  add_data_options(score_cmd, common);
  add_model_options(score_cmd, common);
  std::string score_type = "bic";
  double iss = 1.0;
  score_cmd->add_option("--type", score_type, "score type")->check(CLI::IsMember({"bic", "bdeu", "loglik"}));
  score_cmd->add_option("--iss", iss, "BDeu imaginary sample size")->capture_default_str();

  auto* fit_cmd = app.add_subcommand("fit", "fit CPTs by maximum likelihood and write them as JSON");
  add_data_options(fit_cmd, common);
  add_model_options(fit_cmd, common);
  fit_cmd->add_option("--out", out_path, "output JSON (default: stdout)");

  auto* citest = app.add_subcommand("citest", "conditional independence test X _|_ Y | Z");
  add_data_options(citest, common);
  std::string ci_x, ci_y, ci_given, ci_test = "mi";
  citest->add_option("X", ci_x)->required();
  citest->add_option("Y", ci_y)->required();
  citest->add_option("--given", ci_given, "comma-separated conditioning variables");
  citest->add_option("--test", ci_test, "mi or x2")->check(CLI::IsMember({"mi", "x2"}));

  auto* strength = app.add_subcommand("arc-strength", "p-value of every arc given the child's other parents");
  add_data_options(strength, common);
  add_model_options(strength, common);
  std::string criterion = "x2";
  strength->add_option("--criterion", criterion, "mi or x2")->check(CLI::IsMember({"mi", "x2"}));

  auto* search = app.add_subcommand("search", "constrained random structure search with top-k selection");
  add_data_options(search, common);
  fbn::SearchConfig search_config;
  std::string search_score = "bic";
  std::string emit_pool;
  search->add_option("--n", search_config.pool_size, "candidate pool size")->capture_default_str();
  search->add_option("--top", search_config.top, "models to report")->capture_default_str();
  search->add_option("--seed", seed, "random seed");
  search->add_option("--score", search_score, "score type")->check(CLI::IsMember({"bic", "bdeu", "loglik"}));
  search->add_option("--iss", search_config.iss, "BDeu imaginary sample size")->capture_default_str();
  search->add_option("--p", search_config.dag_options.arc_probability, "forward-arc probability")
      ->capture_default_str();
  search->add_option("--emit-pool", emit_pool, "write every candidate with its score as CSV");
  add_constraint_options(search, search_config.constraints);

  auto* query_cmd = app.add_subcommand("query", "exact posterior of a target given evidence");
  add_data_options(query_cmd, common);
  add_model_options(query_cmd, common);
  std::string target = "CE", evidence;
  query_cmd->add_option("--target", target, "query variable")->capture_default_str();
  query_cmd->add_option("--evidence", evidence, "VAR=LEVEL[,VAR=LEVEL...]");

  auto* simulate = app.add_subcommand("simulate", "forward-sample rows from a fitted network");
  std::string params;
  std::size_t sim_n = 1000;
  bool allow_unsupported = false;
  simulate->add_option("--model", common.model, "model string (must match --params)");
  simulate->add_flag("--lenient", common.lenient, "accept MOD as an alias for MD");
  simulate->add_option("--params", params, "fitted network JSON")->required();
  simulate->add_option("--n", sim_n, "rows to draw")->capture_default_str();
  simulate->add_option("--seed", seed, "random seed");
  simulate->add_option("--out", out_path, "output CSV (default: stdout)");
  simulate->add_flag("--allow-unsupported", allow_unsupported, "sample placeholder rows instead of failing");

  auto* mcmc = app.add_subcommand("mcmc", "posterior sampling of CPT coefficients with diagnostics");
  add_data_options(mcmc, common);
  add_model_options(mcmc, common);
  fbn::McmcConfig mcmc_config;
  std::string out_dir;
  mcmc->add_option("--chains", mcmc_config.chains)->capture_default_str();
  mcmc->add_option("--iters", mcmc_config.iters, "post-warmup draws per chain")->capture_default_str();
  mcmc->add_option("--warmup", mcmc_config.warmup, "adaptation draws per chain")->capture_default_str();
  mcmc->add_option("--iss", mcmc_config.prior_iss, "Dirichlet prior sample size")->capture_default_str();
  mcmc->add_option("--seed", seed, "random seed");
  mcmc->add_flag("--cells", mcmc_config.include_cells, "also trace every CPT cell");
  mcmc->add_option("--out-dir", out_dir, "directory for traces and diagnostics")->required();

  auto* mcmc_diag = app.add_subcommand("mcmc-diag", "recompute diagnostics from stored traces");
  std::string traces_dir;
  mcmc_diag->add_option("--traces", traces_dir, "directory written by mcmc")->required();

  auto* pipeline = app.add_subcommand("pipeline", "run the full analysis and emit one JSON report");
  add_data_options(pipeline, common);
  fbn::PipelineConfig pipeline_config;
  pipeline->add_option("--seed", seed, "random seed");
  pipeline->add_option("--n", pipeline_config.search.pool_size, "candidate pool size")->capture_default_str();
  pipeline->add_option("--top", pipeline_config.search.top, "models to report")->capture_default_str();
  pipeline->add_option("--initial-model", pipeline_config.initial_model, "starting model string")
      ->capture_default_str();
  pipeline->add_option("--iss", pipeline_config.search.iss, "BDeu imaginary sample size")->capture_default_str();
  pipeline->add_option("--mcmc-iters", pipeline_config.mcmc.iters)->capture_default_str();
  pipeline->add_option("--mcmc-warmup", pipeline_config.mcmc.warmup)->capture_default_str();
  pipeline->add_option("--mcmc-chains", pipeline_config.mcmc.chains)->capture_default_str();
  pipeline->add_option("--out", out_path, "report path (default: stdout)");
  add_constraint_options(pipeline, pipeline_config.search.constraints);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (e.get_exit_code() != 0) std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*validate) {
      const auto data = load_data(common);
      emit({{"ok", true}, {"n", data.rows()}, {"variables", data.schema().names()},
            {"warnings", data.warnings}});
    } else if (*schema_cmd) {
      emit(fbn::to_json(load_schema(common)));
    } else if (*dag_parse) {
      const auto d = load_model(common, load_schema(common));
      fbn::Json arcs = fbn::Json::array();
      for (auto [f, t] : d.arcs()) arcs.push_back({d.name(f), d.name(t)});
      const auto check = fbn::check_constraints(d, constraints);
      emit({{"model", fbn::to_model_string(d)}, {"arc_count", d.arc_count()}, {"arcs", arcs},
            {"constraints_ok", check.ok}, {"violations", check.violations}});
    } else if (*dag_print) {
      std::cout << fbn::to_model_string(load_model(common, load_schema(common))) << '\n';
    } else if (*dag_random) {
      const auto s = resolve_seed(seed);
      const auto dags = fbn::generate_candidates(load_schema(common), constraints, dag_count, s, dag_options);
      fbn::Json models = fbn::Json::array();
      for (const auto& d : dags) models.push_back(fbn::to_model_string(d));
      emit({{"seed", s}, {"constraints", fbn::to_json(constraints)}, {"arc_probability", dag_options.arc_probability},
            {"models", models}});
    } else if (*score_cmd) {
      const auto data = load_data(common);
      const auto d = load_model(common, data.schema());
      auto j = fbn::to_json(fbn::score(d, data, fbn::parse_score_type(score_type), iss));
      j["model"] = fbn::to_model_string(d);
      emit(j);
    } else if (*fit_cmd) {
      const auto data = load_data(common);
      const auto text = fbn::to_json(fbn::fit_mle(load_model(common, data.schema()), data)).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_file(out_path, text);
      }
    } else if (*citest) {
      const auto data = load_data(common);
      emit(fbn::to_json(fbn::ci_test(data, ci_x, ci_y, split_list(ci_given), fbn::parse_ci_test_kind(ci_test))));
    } else if (*strength) {
      const auto data = load_data(common);
      emit(fbn::to_json(fbn::arc_strength(load_model(common, data.schema()), data, fbn::parse_ci_test_kind(criterion))));
    } else if (*search) {
      const auto data = load_data(common);
      search_config.seed = resolve_seed(seed);
      search_config.score_type = fbn::parse_score_type(search_score);
      const auto result = fbn::run_search(data, search_config);
      if (!emit_pool.empty()) {
        std::ostringstream csv;
        csv.precision(17);
        csv << "index,model,score\n";
        for (std::size_t i = 0; i < result.pool.size(); ++i) {
          csv << i + 1 << ',' << result.pool[i].model_string << ',' << result.pool[i].score << '\n';
        }
        write_file(emit_pool, csv.str());
      }
      emit(fbn::to_json(result));
    } else if (*query_cmd) {
      const auto data = load_data(common);
      const auto fitted = fbn::fit_mle(load_model(common, data.schema()), data);
      auto j = fbn::to_json(fbn::query(fitted, target, parse_evidence(evidence)));
      j["evidence"] = parse_evidence(evidence);
      emit(j);
    } else if (*simulate) {
      std::ifstream in(params);
      if (!in) throw fbn::Error(fbn::ErrorKind::Io, "cannot open '" + params + "'");
      fbn::Json j;
      try {
        j = fbn::Json::parse(in);
      } catch (const fbn::Json::parse_error& e) {
        throw fbn::Error(fbn::ErrorKind::Io, std::string("bad params JSON: ") + e.what());
      }
      const auto fitted = fbn::fitted_from_json(j);
      if (!common.model.empty()) {
        const auto d = fbn::parse_model_string(common.model, fitted.schema, fbn::ParseOptions{.lenient = common.lenient});
        if (!(d == fitted.dag)) {
          throw fbn::Error(fbn::ErrorKind::SchemaMismatch, "--model does not match the fitted network");
        }
      }
      const auto s = resolve_seed(seed);
      const auto csv = fbn::to_csv(fbn::forward_sample(fitted, sim_n, s, allow_unsupported));
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        write_file(out_path, csv);
        emit({{"seed", s}, {"n", sim_n}, {"out", out_path}});
      }
    } else if (*mcmc) {
      const auto data = load_data(common);
      const auto d = load_model(common, data.schema());
      mcmc_config.seed = resolve_seed(seed);
      const auto run = fbn::sample_posterior(d, data, mcmc_config);
      const fbn::Json info = {{"model", fbn::to_model_string(d)}, {"seed", mcmc_config.seed},
                              {"chains", mcmc_config.chains}, {"iters", mcmc_config.iters},
                              {"warmup", mcmc_config.warmup}, {"prior_iss", mcmc_config.prior_iss}};
      fbn::write_traces(out_dir, run.coefficients, info);
      fbn::Json report = info;
      report["acceptance"] = run.acceptance;
      report["coefficients"] = fbn::to_json(fbn::diagnostics_report(run.coefficients));
      const auto text = report.dump(2) + "\n";
      write_file(out_dir + "/diagnostics.json", text);
      std::cout << text;
    } else if (*mcmc_diag) {
      emit({{"traces", traces_dir}, {"coefficients", fbn::to_json(fbn::diagnostics_report(fbn::read_traces(traces_dir)))}});
    } else if (*pipeline) {
      std::optional<fbn::Dataset> data;
      try {
        data = load_data(common);
      } catch (const fbn::Error& e) {
        throw fbn::StageError("load", e);
      }
      pipeline_config.search.seed = resolve_seed(seed);
      pipeline_config.mcmc.seed = pipeline_config.search.seed;
      const auto text = fbn::run_pipeline(*data, pipeline_config).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_file(out_path, text);
      }
    }
  } catch (const fbn::StageError& e) {
    std::cerr << fbn::Json{{"error", fbn::to_string(e.kind())}, {"stage", e.stage()}, {"message", e.what()}}.dump()
              << '\n';
    return fbn::is_input_error(e.kind()) ? kExitInput : kExitStatistical;
  } catch (const fbn::Error& e) {
    std::cerr << fbn::Json{{"error", fbn::to_string(e.kind())}, {"message", e.what()}}.dump() << '\n';
    return fbn::is_input_error(e.kind()) ? kExitInput : kExitStatistical;
  }
  return 0;
}
