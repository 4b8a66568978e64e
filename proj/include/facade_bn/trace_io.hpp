#pragma once

#include <filesystem>
#include <vector>

#include "facade_bn/json_io.hpp"
#include "facade_bn/mcmc.hpp"

namespace facade_bn {

/// Writes one CSV per coefficient (header "iteration,chain_1,...,chain_C")
/// plus manifest.json listing the files in coefficient order.
void write_traces(const std::filesystem::path& dir, const std::vector<ChainSet>& sets,
                  const Json& run_info = Json::object());

/// Reads back what write_traces produced.
std::vector<ChainSet> read_traces(const std::filesystem::path& dir);

}  // namespace facade_bn
