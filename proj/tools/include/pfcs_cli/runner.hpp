#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pfcs/cache.hpp"
#include "pfcs/policy.hpp"
#include "pfcs/workloads.hpp"
#include "pfcs_cli/run_config.hpp"

namespace pfcs::cli {

std::string_view tool_version() noexcept;

struct RepetitionInfo {
  std::uint64_t seed = 0;
  std::uint64_t access_events = 0;
  std::uint64_t relate_events = 0;
};

struct PolicyResult {
  std::string name;
  bool implemented = true;
  std::vector<SimStats> per_rep;
  // PFCS only.
  std::vector<std::array<std::uint64_t, kNumCacheLevels>> level_hits;
  std::vector<std::uint64_t> rejected_groups;

  SimStats total() const;
  double mean_hit_rate() const;
};

struct RunReport {
  RunConfig config;
  std::vector<RepetitionInfo> repetitions;
  std::vector<PolicyResult> policies;

  const PolicyResult* find(std::string_view policy) const;
};

// Called on the worker thread right before a PFCS replay starts.
using PfcsReplayHook = std::function<void(PfcsCache& cache, std::uint64_t repetition)>;

struct RunOptions {
  unsigned jobs = 1;
  PfcsReplayHook on_pfcs_replay;
};

// The event sequence of repetition r: the trace file, or the workload
// generated with seed + r.
std::vector<TraceEvent> load_events(const RunConfig& config, std::uint64_t repetition);

// Replays events against one policy. Hit/miss outcomes are appended to
// `outcomes` when non-null.
void replay(ReplacementPolicy& policy, const std::vector<TraceEvent>& events,
            std::vector<AccessOutcome>* outcomes = nullptr);

std::unique_ptr<ReplacementPolicy> make_policy(const RunConfig& config, const std::string& name,
                                               std::uint64_t repetition);

// Validates the config, replays every (repetition, policy) pair on up to
// `jobs` threads and assembles the report in a fixed order.
RunReport run(const RunConfig& config, const RunOptions& options = {});

Json to_json(const RunReport& report);
// Pretty-printed report text with a trailing newline.
std::string render(const RunReport& report);

}  // namespace pfcs::cli
