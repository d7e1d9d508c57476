#pragma once

#include <cstdint>
#include <filesystem>

#include "radloc/bench.hpp"
#include "radloc/io.hpp"
#include "radloc/simulator.hpp"

namespace radloc {

/// Everything a run needs, read from one JSON file. Unknown keys anywhere are
/// rejected; the top-level "seed" seeds every stream not given its own seed.
struct RunConfig {
  std::uint64_t seed = 0;
  DatasetSpec dataset;
  BenchConfig bench;
};

RunConfig run_config_from_json(const json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies a --seed override to every seeded stream.
void override_seed(RunConfig& config, std::uint64_t seed);

}  // namespace radloc
