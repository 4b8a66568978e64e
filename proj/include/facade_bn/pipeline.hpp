#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "facade_bn/error.hpp"
#include "facade_bn/json_io.hpp"

namespace facade_bn {

/// The hand-built starting model over the façade schema.
inline constexpr const char* kInitialFacadeModel =
    "[B][T][C][RF][DO][PL][DC|B:T:C][MD|DC:RF:DO:PL][TR|DC][CE|MD:TR]";

struct PipelineConfig {
  std::string initial_model = kInitialFacadeModel;
  SearchConfig search;
  /// Variables whose levels are used as evidence when querying the sink.
  std::vector<std::string> query_variables = {"DC", "RF"};
  McmcConfig mcmc;
};

/// Raised by run_pipeline; carries the name of the failing stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), "stage '" + stage + "': " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Initial-model scores and arc strengths, constrained random search, CI tests
/// on the sink-adjacent arcs of every top model, sink queries on the best
/// model and MCMC diagnostics for it.
Json run_pipeline(const Dataset& data, const PipelineConfig& config);

/// For arc u -> sink: sink ⟂ u given the parents of u and the sink's other parents.
std::vector<std::string> sink_test_conditioning(const Dag& dag, std::size_t parent, std::size_t sink);

}  // namespace facade_bn
