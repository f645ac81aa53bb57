#include "pfcs_cli/runner.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "pfcs/baselines.hpp"

#ifndef PFCS_VERSION
#define PFCS_VERSION "0.0.0"
#endif

namespace pfcs::cli {

std::string_view tool_version() noexcept { return PFCS_VERSION; }

SimStats PolicyResult::total() const {
  SimStats sum;
  for (const auto& s : per_rep) sum += s;
  return sum;
}

double PolicyResult::mean_hit_rate() const {
  if (per_rep.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : per_rep) sum += s.hit_rate();
  return sum / static_cast<double>(per_rep.size());
}

const PolicyResult* RunReport::find(std::string_view policy) const {
  for (const auto& p : policies) {
    if (p.name == policy) return &p;
  }
  return nullptr;
}

std::vector<TraceEvent> load_events(const RunConfig& config, std::uint64_t repetition) {
  if (config.trace) return read_trace(*config.trace);
  WorkloadSpec spec = *config.workload;
  spec.seed = config.seed + repetition;
  return generate(spec);
}

void replay(ReplacementPolicy& policy, const std::vector<TraceEvent>& events,
            std::vector<AccessOutcome>* outcomes) {
  for (const TraceEvent& e : events) {
    if (e.kind == EventKind::Relate) {
      policy.relate(e.keys);
      continue;
    }
    const AccessOutcome o = policy.access(e.key);
    if (outcomes) outcomes->push_back(o);
  }
}

std::unique_ptr<ReplacementPolicy> make_policy(const RunConfig& config, const std::string& name,
                                               std::uint64_t repetition) {
  if (name == "pfcs") {
    return std::make_unique<PfcsCache>(pfcs_config(config, config.seed + repetition));
  }
  return make_baseline(name, config.baseline_capacity(), config.lirs_hir_fraction);
}

namespace {

struct Task {
  std::size_t policy;
  std::uint64_t rep;
};

struct TaskResult {
  SimStats stats;
  std::array<std::uint64_t, kNumCacheLevels> level_hits{};
  std::uint64_t rejected_groups = 0;
};

}  // namespace

RunReport run(const RunConfig& config, const RunOptions& options) {
  validate(config);
  RunReport report;
  report.config = config;
  report.config.out.reset();

  std::vector<std::vector<TraceEvent>> events;
  if (config.trace) {
    // One shared copy; every repetition replays the same file.
    events.push_back(load_events(config, 0));
  } else {
    for (std::uint64_t r = 0; r < config.repetitions; ++r) events.push_back(load_events(config, r));
  }
  auto events_of = [&](std::uint64_t r) -> const std::vector<TraceEvent>& {
    return events[config.trace ? 0 : r];
  };

  for (std::uint64_t r = 0; r < config.repetitions; ++r) {
    RepetitionInfo info{config.seed + r, 0, 0};
    for (const auto& e : events_of(r)) {
      ++(e.kind == EventKind::Access ? info.access_events : info.relate_events);
    }
    report.repetitions.push_back(info);
  }

  std::vector<Task> tasks;
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    report.policies.push_back(PolicyResult{config.policies[p], config.policies[p] != kSemanticPolicyName,
                                           {}, {}, {}});
    if (!report.policies.back().implemented) continue;
    for (std::uint64_t r = 0; r < config.repetitions; ++r) tasks.push_back({p, r});
  }

  std::vector<TaskResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const Task& t = tasks[i];
        auto policy = make_policy(config, config.policies[t.policy], t.rep);
        auto* pfcs = dynamic_cast<PfcsCache*>(policy.get());
        if (pfcs && options.on_pfcs_replay) options.on_pfcs_replay(*pfcs, t.rep);
        replay(*policy, events_of(t.rep));
        results[i].stats = policy->stats();
        if (pfcs) {
          results[i].level_hits = pfcs->level_hits();
          results[i].rejected_groups = pfcs->rejected_groups();
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(tasks.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    PolicyResult& pr = report.policies[tasks[i].policy];
    pr.per_rep.push_back(results[i].stats);
    if (pr.name == "pfcs") {
      pr.level_hits.push_back(results[i].level_hits);
      pr.rejected_groups.push_back(results[i].rejected_groups);
    }
  }
  return report;
}

namespace {

Json stats_json(const SimStats& s) {
  Json j;
  j["accesses"] = s.accesses;
  j["hits"] = s.hits;
  j["misses"] = s.misses;
  j["prefetch_issued"] = s.prefetch_issued;
  j["prefetch_used"] = s.prefetch_used;
  j["evictions"] = s.evictions;
  j["factorizations"] = s.factorizations;
  j["budget_exhaustions"] = s.budget_exhaustions;
  return j;
}

}  // namespace

Json to_json(const RunReport& report) {
  Json out;
  out["tool"] = "pfcs";
  out["version"] = tool_version();
  out["seed"] = report.config.seed;
  out["config"] = to_json(report.config);

  Json reps = Json::array();
  for (const auto& r : report.repetitions) {
    reps.push_back(Json{{"seed", r.seed},
                        {"access_events", r.access_events},
                        {"relate_events", r.relate_events}});
  }
  out["repetitions"] = std::move(reps);

  Json policies = Json::array();
  for (const auto& p : report.policies) {
    Json j;
    j["name"] = p.name;
    j["implemented"] = p.implemented;
    if (!p.implemented) {
      j["hit_rate"] = nullptr;
      j["mean_hit_rate"] = nullptr;
      j["stats"] = nullptr;
      j["per_repetition"] = nullptr;
      policies.push_back(std::move(j));
      continue;
    }
    const SimStats total = p.total();
    j["hit_rate"] = total.hit_rate();
    j["mean_hit_rate"] = p.mean_hit_rate();
    j["stats"] = stats_json(total);
    Json per = Json::array();
    for (std::size_t r = 0; r < p.per_rep.size(); ++r) {
      Json rep;
      rep["hit_rate"] = p.per_rep[r].hit_rate();
      rep["stats"] = stats_json(p.per_rep[r]);
      if (r < p.level_hits.size()) {
        Json levels;
        for (std::size_t l = 0; l < kNumCacheLevels; ++l) {
          levels[std::string(level_name(kAllLevels[l]))] = p.level_hits[r][l];
        }
        rep["level_hits"] = std::move(levels);
        rep["rejected_groups"] = p.rejected_groups[r];
      }
      per.push_back(std::move(rep));
    }
    j["per_repetition"] = std::move(per);
    policies.push_back(std::move(j));
  }
  out["policies"] = std::move(policies);
  return out;
}

std::string render(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

}  // namespace pfcs::cli
