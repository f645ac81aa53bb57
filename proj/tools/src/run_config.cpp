#include "pfcs_cli/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pfcs/primes.hpp"

namespace pfcs::cli {
namespace {

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown field \"" + key + "\"");
    }
  }
}

const Json* field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::uint64_t as_u64(const Json& v, const std::string& what) {
  if (!v.is_number_unsigned()) throw ConfigError(what + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

double as_double(const Json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  return v.get<double>();
}

std::string as_string(const Json& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError(what + " must be a string");
  return v.get<std::string>();
}

template <typename T, typename Get>
void read_into(const Json& obj, const char* key, T& dst, Get get) {
  if (const Json* v = field(obj, key)) dst = static_cast<T>(get(*v, std::string(key)));
}

}  // namespace

WorkloadSpec parse_workload(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("workload must be an object");
  check_keys(doc, {"kind", "elements", "events", "theta", "fanout", "follow_prob"}, "workload");
  WorkloadSpec spec;
  if (const Json* kind = field(doc, "kind")) {
    const auto name = as_string(*kind, "workload.kind");
    const auto g = parse_generator(name);
    if (!g) throw ConfigError("workload.kind: unknown generator \"" + name + "\"");
    spec.generator = *g;
  }
  read_into(doc, "elements", spec.n_elements, as_u64);
  read_into(doc, "events", spec.n_events, as_u64);
  read_into(doc, "theta", spec.zipf_theta, as_double);
  read_into(doc, "fanout", spec.join_fanout, as_u64);
  read_into(doc, "follow_prob", spec.join_follow_prob, as_double);
  return spec;
}

Json to_json(const WorkloadSpec& spec) {
  Json out;
  out["kind"] = generator_name(spec.generator);
  out["elements"] = spec.n_elements;
  out["events"] = spec.n_events;
  out["theta"] = spec.zipf_theta;
  out["fanout"] = spec.join_fanout;
  out["follow_prob"] = spec.join_follow_prob;
  return out;
}

RunConfig parse_run_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(doc,
             {"levels", "policies", "workload", "trace", "prefetch_cap", "arity_cap", "ewma_alpha",
              "f_hot", "f_warm", "recycle_fraction", "factor_cache_capacity", "lirs_hir_fraction",
              "segment_size", "repetitions", "seed", "out"},
             "config");
  RunConfig c;

  if (const Json* levels = field(doc, "levels")) {
    if (!levels->is_array()) throw ConfigError("levels must be an array");
    for (const Json& lv : *levels) {
      if (!lv.is_object()) throw ConfigError("levels entries must be objects");
      check_keys(lv, {"name", "capacity", "prime_lo", "prime_hi", "budget"}, "levels[]");
      const Json* name = field(lv, "name");
      if (!name) throw ConfigError("levels[]: missing \"name\"");
      const auto level_str = as_string(*name, "levels[].name");
      const auto level = parse_level(level_str);
      if (!level) throw ConfigError("levels[]: unknown level \"" + level_str + "\"");
      LevelConfig& dst = c.levels[index_of(*level)];
      const std::string where = "levels[" + level_str + "]";
      if (const Json* cap = field(lv, "capacity"); cap && !cap->is_null()) {
        dst.capacity = as_u64(*cap, where + ".capacity");
      }
      read_into(lv, "prime_lo", dst.range.lo, as_u64);
      if (const Json* hi = field(lv, "prime_hi")) {
        dst.range.hi = hi->is_null() ? std::nullopt
                                     : std::optional<std::uint64_t>(as_u64(*hi, where + ".prime_hi"));
      }
      if (const Json* b = field(lv, "budget")) dst.budget = StepBudget{as_u64(*b, where + ".budget")};
    }
    c.levels[index_of(Level::Memory)].capacity = 0;
  }

  if (const Json* policies = field(doc, "policies")) {
    if (!policies->is_array()) throw ConfigError("policies must be an array of names");
    c.policies.clear();
    for (const Json& p : *policies) c.policies.push_back(as_string(p, "policies[]"));
  }

  if (const Json* w = field(doc, "workload")) {
    c.workload = w->is_null() ? std::nullopt : std::optional<WorkloadSpec>(parse_workload(*w));
  }
  if (const Json* t = field(doc, "trace")) {
    c.trace = t->is_null() ? std::nullopt : std::optional<std::string>(as_string(*t, "trace"));
  }
  if (const Json* o = field(doc, "out")) {
    c.out = o->is_null() ? std::nullopt : std::optional<std::string>(as_string(*o, "out"));
  }

  read_into(doc, "prefetch_cap", c.prefetch_cap, as_u64);
  read_into(doc, "arity_cap", c.arity_cap, as_u64);
  read_into(doc, "ewma_alpha", c.ewma_alpha, as_double);
  read_into(doc, "f_hot", c.f_hot, as_double);
  read_into(doc, "f_warm", c.f_warm, as_double);
  read_into(doc, "recycle_fraction", c.recycle_fraction, as_double);
  read_into(doc, "factor_cache_capacity", c.factor_cache_capacity, as_u64);
  read_into(doc, "lirs_hir_fraction", c.lirs_hir_fraction, as_double);
  read_into(doc, "segment_size", c.segment_size, as_u64);
  read_into(doc, "repetitions", c.repetitions, as_u64);
  read_into(doc, "seed", c.seed, as_u64);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

Json to_json(const RunConfig& c) {
  Json out;
  Json levels = Json::array();
  for (const LevelConfig& lv : c.levels) {
    Json j;
    j["name"] = level_name(lv.level);
    if (lv.level == Level::Memory) {
      j["capacity"] = nullptr;
    } else {
      j["capacity"] = lv.capacity;
    }
    j["prime_lo"] = lv.range.lo;
    if (lv.range.hi) {
      j["prime_hi"] = *lv.range.hi;
    } else {
      j["prime_hi"] = nullptr;
    }
    j["budget"] = lv.budget.max_steps;
    levels.push_back(std::move(j));
  }
  out["levels"] = std::move(levels);
  out["policies"] = c.policies;
  out["workload"] = c.workload ? to_json(*c.workload) : Json(nullptr);
  out["trace"] = c.trace ? Json(*c.trace) : Json(nullptr);
  out["prefetch_cap"] = c.prefetch_cap;
  out["arity_cap"] = c.arity_cap;
  out["ewma_alpha"] = c.ewma_alpha;
  out["f_hot"] = c.f_hot;
  out["f_warm"] = c.f_warm;
  out["recycle_fraction"] = c.recycle_fraction;
  out["factor_cache_capacity"] = c.factor_cache_capacity;
  out["lirs_hir_fraction"] = c.lirs_hir_fraction;
  out["segment_size"] = c.segment_size;
  out["repetitions"] = c.repetitions;
  out["seed"] = c.seed;
  return out;
}

void validate(const RunConfig& c) {
  if (c.policies.empty()) throw ConfigError("at least one policy is required");
  std::set<std::string> seen;
  for (const auto& p : c.policies) {
    if (std::find(kKnownPolicies.begin(), kKnownPolicies.end(), p) == kKnownPolicies.end()) {
      throw ConfigError("unknown policy \"" + p + "\"");
    }
    if (!seen.insert(p).second) throw ConfigError("policy \"" + p + "\" listed twice");
  }

  for (std::size_t i = 0; i < kNumLevels; ++i) {
    const LevelConfig& lv = c.levels[i];
    const std::string name(level_name(lv.level));
    if (lv.level != kAllLevels[i]) throw ConfigError("levels out of order at " + name);
    if (lv.level != Level::Memory && lv.capacity == 0) {
      throw ConfigError(name + ": capacity must be >= 1");
    }
    if (lv.range.lo < 2 || lv.range.lo > lv.range.upper()) {
      throw ConfigError(name + ": prime range must satisfy 2 <= prime_lo <= prime_hi");
    }
    bool has_prime = !lv.range.hi.has_value();
    for (std::uint64_t v = lv.range.lo; !has_prime && v <= lv.range.upper(); ++v) {
      has_prime = is_prime(v);
      if (v == lv.range.upper()) break;
    }
    if (!has_prime) throw ConfigError(name + ": prime range contains no prime");
    for (std::size_t j = 0; j < i; ++j) {
      if (lv.range.overlaps(c.levels[j].range)) {
        throw ConfigError(name + " and " + std::string(level_name(c.levels[j].level)) +
                          " prime ranges overlap");
      }
    }
  }

  if (!c.trace && !c.workload) throw ConfigError("either workload or trace is required");
  if (!c.trace) {
    try {
      pfcs::validate(*c.workload);
    } catch (const InvalidSpec& e) {
      throw ConfigError(e.what());
    }
  }
  if (c.arity_cap < 2) throw ConfigError("arity_cap must be >= 2");
  if (!(c.ewma_alpha > 0.0 && c.ewma_alpha <= 1.0)) throw ConfigError("ewma_alpha must lie in (0, 1]");
  if (!(c.f_warm >= 0.0 && c.f_hot > c.f_warm) || !std::isfinite(c.f_hot)) {
    throw ConfigError("thresholds must satisfy 0 <= f_warm < f_hot");
  }
  if (!(c.recycle_fraction > 0.0 && c.recycle_fraction <= 1.0)) {
    throw ConfigError("recycle_fraction must lie in (0, 1]");
  }
  if (c.factor_cache_capacity == 0) throw ConfigError("factor_cache_capacity must be >= 1");
  if (!(c.lirs_hir_fraction > 0.0 && c.lirs_hir_fraction < 1.0)) {
    throw ConfigError("lirs_hir_fraction must lie in (0, 1)");
  }
  if (c.segment_size == 0) throw ConfigError("segment_size must be >= 1");
  if (c.repetitions == 0) throw ConfigError("repetitions must be >= 1");
}

std::vector<std::string> split_policies(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

PfcsConfig pfcs_config(const RunConfig& c, std::uint64_t seed) {
  PfcsConfig p;
  p.levels = c.levels;
  p.prefetch_cap = c.prefetch_cap;
  p.arity_cap = c.arity_cap;
  p.alpha = c.ewma_alpha;
  p.thresholds = RangeThresholds{c.f_hot, c.f_warm};
  p.recycle_fraction = c.recycle_fraction;
  p.factor_cache_capacity = c.factor_cache_capacity;
  p.seed = seed;
  p.segment_size = c.segment_size;
  return p;
}

}  // namespace pfcs::cli
