#pragma once

#include <json.hpp>

#include "facade_bn/data_model.hpp"
#include "facade_bn/estimation.hpp"
#include "facade_bn/graph.hpp"
#include "facade_bn/independence.hpp"
#include "facade_bn/inference.hpp"
#include "facade_bn/mcmc.hpp"
#include "facade_bn/search.hpp"

namespace facade_bn {

using Json = nlohmann::ordered_json;

Json to_json(const Schema& schema);
/// {"variables": [{"name": ..., "levels": [...]}, ...]}
Schema schema_from_json(const Json& j);
Schema load_schema_file(const std::string& path);

Json to_json(const DagConstraints& c);
Json to_json(const ScoreReport& report);
Json to_json(const CITestResult& result);
Json to_json(const ArcStrengthReport& report);
Json to_json(const Posterior& posterior);
Json to_json(const SearchResult& result);
Json to_json(const Diagnostics& d);
Json to_json(const std::vector<CoefficientReport>& reports);

/// {"model_string", "n", "nodes", "cpts": {node: {"levels", "parents",
///  "parent_config_order", "rows", "support"}}}
Json to_json(const FittedNetwork& fitted);
FittedNetwork fitted_from_json(const Json& j);

}  // namespace facade_bn
