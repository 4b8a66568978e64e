#include "facade_bn/json_io.hpp"

#include <cmath>
#include <fstream>

#include "facade_bn/error.hpp"

namespace facade_bn {

Json to_json(const Schema& schema) {
  Json vars = Json::array();
  for (const auto& v : schema.variables()) vars.push_back({{"name", v.name}, {"levels", v.levels}});
  return {{"variables", vars}};
}

Schema schema_from_json(const Json& j) {
  try {
    std::vector<VariableSpec> vars;
    for (const auto& v : j.at("variables")) {
      vars.push_back({v.at("name").get<std::string>(), v.at("levels").get<std::vector<std::string>>()});
    }
    return Schema(std::move(vars));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, std::string("bad schema JSON: ") + e.what());
  }
}

Schema load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return schema_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::SchemaMismatch, std::string("bad schema JSON: ") + e.what());
  }
}

Json to_json(const DagConstraints& c) {
  return {{"sink", c.sink_variable},
          {"min_arcs", c.min_arcs},
          {"require_sink_in_degree", c.require_sink_in_degree},
          {"forbid_sink_out_arcs", c.forbid_sink_out_arcs}};
}

Json to_json(const ScoreReport& report) {
  Json per_node = Json::object();
  for (const auto& [node, value] : report.per_node) per_node[node] = value;
  Json j = {{"type", to_string(report.type)}, {"total", report.total}, {"per_node", per_node},
            {"d", report.d}, {"n", report.n}};
  if (report.type == ScoreType::Bdeu) j["iss"] = report.iss;
  return j;
}

Json to_json(const CITestResult& r) {
  return {{"x", r.x}, {"y", r.y}, {"given", r.given}, {"test", to_string(r.kind)},
          {"statistic", r.statistic}, {"df", r.df}, {"p_value", r.p_value}};
}

Json to_json(const ArcStrengthReport& report) {
  Json list = Json::array();
  for (const auto& e : report.entries) {
    list.push_back({{"from", e.from}, {"to", e.to}, {"strength", e.p_value}});
  }
  return list;
}

Json to_json(const Posterior& p) {
  Json dist = Json::object();
  for (const auto& [level, prob] : p.distribution) dist[level] = prob;
  return {{"target", p.target}, {"distribution", dist},
          {"evidence_probability", p.evidence_probability}, {"degenerate", p.degenerate}};
}

Json to_json(const SearchResult& result) {
  Json top = Json::array();
  for (const auto& m : result.top) {
    top.push_back({{"rank", m.rank}, {"model", m.model_string}, {"score", m.score}});
  }
  return {{"pool_size", result.pool_size},
          {"constraints", to_json(result.config.constraints)},
          {"seed", result.config.seed},
          {"score", to_string(result.config.score_type)},
          {"candidates_satisfying", result.candidates_satisfying},
          {"top", top}};
}

Json to_json(const Diagnostics& d) {
  return {{"mean", d.mean}, {"sd", d.sd}, {"ess", d.ess}, {"psrf", d.psrf}, {"mcse", d.mcse},
          {"acf", d.acf}, {"running_mean_stride", d.running_mean_stride}, {"running_mean", d.running_mean}};
}

Json to_json(const std::vector<CoefficientReport>& reports) {
  Json list = Json::array();
  for (const auto& r : reports) {
    Json entry = {{"child", r.coefficient.child}, {"label", r.coefficient.label}, {"pass", r.pass},
                  {"failures", r.failures}};
    entry["diagnostics"] = r.diagnostics ? to_json(*r.diagnostics) : Json(nullptr);
    list.push_back(std::move(entry));
  }
  return list;
}

Json to_json(const FittedNetwork& fitted) {
  Json cpts = Json::object();
  for (std::size_t node = 0; node < fitted.cpts.size(); ++node) {
    const auto& cpt = fitted.cpts[node];
    const auto parents = fitted.dag.parents(node);
    Json order = Json::array();
    Json rows = Json::array();
    for (std::size_t j = 0; j < cpt.configs(); ++j) {
      const auto levels = cpt.config_levels(j);
      Json config = Json::array();
      for (std::size_t i = 0; i < levels.size(); ++i) {
        config.push_back(fitted.schema.variable(parents[i]).levels[levels[i]]);
      }
      order.push_back(config);
      rows.push_back(std::vector<double>(cpt.row(j).begin(), cpt.row(j).end()));
    }
    cpts[cpt.node] = {{"levels", fitted.schema.variable(node).levels},
                      {"parents", cpt.parents},
                      {"parent_config_order", order},
                      {"rows", rows},
                      {"support", cpt.support}};
  }
  return {{"model_string", to_model_string(fitted.dag)},
          {"n", fitted.n},
          {"nodes", fitted.dag.nodes()},
          {"cpts", cpts}};
}

FittedNetwork fitted_from_json(const Json& j) {
  try {
    const auto nodes = j.at("nodes").get<std::vector<std::string>>();
    const auto& cpts = j.at("cpts");
    std::vector<VariableSpec> vars;
    for (const auto& name : nodes) {
      vars.push_back({name, cpts.at(name).at("levels").get<std::vector<std::string>>()});
    }
    Schema schema(std::move(vars));
    Dag dag = parse_model_string(j.at("model_string").get<std::string>(), nodes);
    FittedNetwork fitted{dag, schema, {}, j.at("n").get<std::size_t>()};
    for (std::size_t node = 0; node < nodes.size(); ++node) {
      const auto& c = cpts.at(nodes[node]);
      Cpt cpt;
      cpt.node = nodes[node];
      cpt.cardinality = schema.cardinality(node);
      for (auto p : dag.parents(node)) {
        cpt.parents.push_back(nodes[p]);
        cpt.parent_cardinalities.push_back(schema.cardinality(p));
      }
      if (c.at("parents").get<std::vector<std::string>>() != cpt.parents) {
        throw Error(ErrorKind::SchemaMismatch, "parents of '" + cpt.node + "' disagree with the model string");
      }
      std::size_t q = 1;
      for (auto pc : cpt.parent_cardinalities) q *= pc;
      const auto& rows = c.at("rows");
      if (rows.size() != q) throw Error(ErrorKind::SchemaMismatch, "wrong row count for '" + cpt.node + "'");
      for (const auto& row : rows) {
        auto probs = row.get<std::vector<double>>();
        if (probs.size() != cpt.cardinality) {
          throw Error(ErrorKind::SchemaMismatch, "wrong row width for '" + cpt.node + "'");
        }
        double sum = 0.0;
        for (double p : probs) {
          if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::DomainError, "probability outside [0, 1]");
          sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9) throw Error(ErrorKind::DomainError, "row of '" + cpt.node + "' does not sum to 1");
        cpt.table.insert(cpt.table.end(), probs.begin(), probs.end());
      }
      if (c.contains("support")) {
        cpt.support = c.at("support").get<std::vector<std::int64_t>>();
        if (cpt.support.size() != q) throw Error(ErrorKind::SchemaMismatch, "wrong support length");
      } else {
        cpt.support.assign(q, 1);
      }
      fitted.cpts.push_back(std::move(cpt));
    }
    return fitted;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, std::string("bad fitted-network JSON: ") + e.what());
  }
}

}  // namespace facade_bn
