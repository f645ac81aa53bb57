#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfcs/baselines.hpp"
#include "pfcs/cache.hpp"
#include "pfcs/workloads.hpp"

namespace pfcs::cli {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string> kKnownPolicies{"pfcs", "lru", "arc", "lirs", "semantic"};

// Everything a `run` needs. Repetition r uses seed + r for the workload
// generator and for the rho constant stream.
struct RunConfig {
  std::array<LevelConfig, kNumLevels> levels = default_level_configs();
  std::vector<std::string> policies{"pfcs", "lru", "arc", "lirs"};
  std::optional<WorkloadSpec> workload = WorkloadSpec{};  // ignored when trace is set
  std::optional<std::string> trace;
  std::size_t prefetch_cap = 8;
  std::size_t arity_cap = kDefaultArityCap;
  double ewma_alpha = 0.8;
  double f_hot = 4.0;
  double f_warm = 1.0;
  double recycle_fraction = 0.1;
  std::size_t factor_cache_capacity = kDefaultFactorCacheCapacity;
  double lirs_hir_fraction = kDefaultLirsHirFraction;
  std::uint64_t segment_size = kDefaultSegmentSize;
  std::uint64_t repetitions = 1;
  std::uint64_t seed = 42;
  // Where the report goes. An invocation detail: not echoed into the report.
  std::optional<std::string> out;

  std::size_t baseline_capacity() const { return levels[index_of(Level::L3)].capacity; }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Missing fields keep their defaults; unknown fields are rejected. Throws ConfigError.
RunConfig parse_run_config(const Json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// Echo used in reports. parse_run_config(to_json(c)) == c for any valid c
// whose `out` is unset.
Json to_json(const RunConfig& config);
Json to_json(const WorkloadSpec& spec);
WorkloadSpec parse_workload(const Json& doc);

// Throws ConfigError.
void validate(const RunConfig& config);

std::vector<std::string> split_policies(const std::string& csv);

PfcsConfig pfcs_config(const RunConfig& config, std::uint64_t seed);

}  // namespace pfcs::cli
