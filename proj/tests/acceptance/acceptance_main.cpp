// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Reference answers come from the naive oracles in support/ and from GMP directly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <gmpxx.h>

#include "pfcs/baselines.hpp"
#include "pfcs/cache.hpp"
#include "pfcs/factorizer.hpp"
#include "pfcs/relations.hpp"
#include "pfcs/workloads.hpp"
#include "pfcs_cli/runner.hpp"
#include "support/oracles.hpp"

using namespace pfcs;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

Outcome pass(std::string detail) { return {true, std::move(detail)}; }
Outcome fail(std::string detail) { return {false, std::move(detail)}; }

template <typename... Parts>
std::string cat(const Parts&... parts) {
  std::ostringstream out;
  (out << ... << parts);
  return out.str();
}

constexpr StepBudget kGenerous{10'000'000};

std::vector<ElementId> sorted_members(std::vector<ElementId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Primality by GMP's own test, independent of the library's Miller-Rabin.
bool gmp_prime(const BigInt& n) { return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0; }

// 1. Every registered group is recovered exactly from its composite.
Outcome zero_false_positives() {
  AssignmentTable table;
  Factorizer factorizer;
  RelationRegistry registry(table, factorizer);
  const std::uint64_t n = 10'000;
  for (std::uint64_t k = 0; k < n; ++k) registry.assign(element(k), Level::L3, 0, 1);
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto p = table.prime_of(element(k));
    if (!p || !oracle::is_prime(*p) || *p < 100'003) return fail(cat("bad L3 prime for element ", k));
  }
  std::mt19937_64 rng(2024);
  const int groups = 100'000;
  for (int g = 0; g < groups; ++g) {
    std::set<std::uint64_t> keys;
    const std::size_t arity = 2 + rng() % 7;
    while (keys.size() < arity) keys.insert(rng() % n);
    std::vector<ElementId> members;
    BigInt expected = 1;
    for (auto k : keys) {
      members.push_back(element(k));
      expected *= from_u64(*table.prime_of(element(k)));
    }
    const BigInt c = registry.register_group(members);
    if (c != expected) return fail(cat("group ", g, ": composite is not the product of member primes"));
    const Discovery found = registry.discover(c, kGenerous);
    if (!found.complete) return fail(cat("group ", g, ": factorization incomplete"));
    if (!found.dangling.empty()) return fail(cat("group ", g, ": dangling factors"));
    if (sorted_members(found.elements) != sorted_members(members)) {
      return fail(cat("group ", g, ": discovered set differs from registered members"));
    }
  }
  return pass(cat(groups, " groups of arity 2..8 over ", n, " elements, no false positives"));
}

// 2. Table factorization of every n < 10^6 matches trial division.
Outcome spf_oracle_sweep() {
  Factorizer factorizer;
  const std::uint64_t limit = 1'000'000;
  for (std::uint64_t n = 2; n < limit; ++n) {
    const Factorization f = factorizer.factorize(from_u64(n), StepBudget{0});
    if (!f.complete || f.steps != 0) return fail(cat(n, ": not served by the table"));
    std::vector<std::uint64_t> got;
    for (const auto& p : f.factors) got.push_back(to_u64(p));
    std::sort(got.begin(), got.end());
    if (got != oracle::factor(n)) return fail(cat(n, ": factors differ from trial division"));
  }
  return pass(cat("2 <= n < ", limit, " agree with trial division"));
}

// 3. Worked examples.
Outcome golden_values() {
  AssignmentTable table;
  Factorizer factorizer;
  RelationRegistry registry(table, factorizer);
  struct Case {
    std::uint64_t a_prime, b_prime, composite;
  };
  for (const Case& c : {Case{11, 13, 143}, Case{2, 3, 6}, Case{3, 1009, 3027}}) {
    // One element per prime; 3 is shared by two groups.
    const ElementId ea = element(c.a_prime);
    const ElementId eb = element(c.b_prime);
    if (!table.prime_of(ea)) table.bind(ea, c.a_prime);
    if (!table.prime_of(eb)) table.bind(eb, c.b_prime);
    const BigInt composite = registry.register_group(std::vector{ea, eb});
    if (composite != c.composite) return fail(cat("expected composite ", c.composite));
    const Discovery d = registry.discover(composite, StepBudget{0});
    if (!d.complete || sorted_members(d.elements) != sorted_members({ea, eb})) {
      return fail(cat(c.composite, ": wrong discovery"));
    }
  }
  return pass("143 -> {11, 13}, 6 -> {2, 3}, 3027 -> {3, 1009}");
}

// 4. product(factors) * remainder == c with prime factors, for any budget.
Outcome product_invariant() {
  Factorizer factorizer;
  gmp_randclass gen(gmp_randinit_default);
  gen.seed(4242);
  std::mt19937_64 rng(4242);
  const int cases = 100'000;
  int wide = 0;
  int squareful = 0;
  for (int i = 0; i < cases; ++i) {
    BigInt c = gen.get_z_bits(2 + rng() % 126) + 2;
    switch (rng() % 4) {
      case 0:
        c *= c;
        ++squareful;
        break;
      case 1: {
        const BigInt p = gen.get_z_bits(4 + rng() % 28) + 2;
        c *= p * p;
        ++squareful;
        break;
      }
      default: break;
    }
    if (mpz_sizeinbase(c.get_mpz_t(), 2) > 64) ++wide;
    const StepBudget budget{rng() % 4 == 0 ? rng() % 50 : rng() % 20'000};
    const Factorization f = factorizer.factorize(c, budget);
    BigInt product = 1;
    for (const auto& p : f.factors) {
      if (!gmp_prime(p)) return fail(cat("non-prime factor ", p.get_str(), " of ", c.get_str()));
      product *= p;
    }
    if (product * f.remainder != c) return fail(cat("product mismatch for ", c.get_str()));
    if (f.complete != (f.remainder == 1)) return fail(cat("complete flag wrong for ", c.get_str()));
  }
  return pass(cat(cases, " inputs (", wide, " wider than 64 bits, ", squareful,
                  " with repeated factors)"));
}

PfcsConfig pfcs_with_l3(std::size_t l3) {
  PfcsConfig c;
  c.levels[index_of(Level::L1)].capacity = std::max<std::size_t>(1, l3 / 8);
  c.levels[index_of(Level::L2)].capacity = std::max<std::size_t>(1, l3 / 2);
  c.levels[index_of(Level::L3)].capacity = l3;
  return c;
}

// 5. Without relationships PFCS makes the same hit/miss decisions as LRU.
Outcome degenerate_equivalence() {
  std::mt19937_64 rng(55);
  const int traces = 100;
  for (int t = 0; t < traces; ++t) {
    const std::size_t capacity = 1 + rng() % 64;
    PfcsCache cache(pfcs_with_l3(capacity));
    oracle::NaiveLru lru(capacity);
    WorkloadSpec spec;
    spec.generator = t % 3 == 0 ? Generator::Sequential : Generator::Zipf;
    spec.n_elements = capacity + 1 + rng() % (capacity * 4);
    spec.n_events = 1000;
    spec.zipf_theta = 0.6 + 0.1 * static_cast<double>(t % 8);
    spec.seed = 1000 + static_cast<std::uint64_t>(t);
    std::uint64_t i = 0;
    std::string mismatch;
    generate(spec, [&](const TraceEvent& ev) {
      const bool hit = cache.access(ev.key) == AccessOutcome::Hit;
      if (hit != lru.access(key_of(ev.key)) && mismatch.empty()) {
        mismatch = cat("trace ", t, " event ", i);
      }
      ++i;
    });
    if (!mismatch.empty()) return fail(mismatch);
    if (cache.stats().prefetch_issued != 0) return fail(cat("trace ", t, ": prefetch without groups"));
  }
  return pass(cat(traces, " traces of 1000 events, identical outcomes"));
}

cli::RunConfig join_run(std::uint64_t seed) {
  cli::RunConfig c;
  WorkloadSpec w;
  w.generator = Generator::Join;
  w.n_elements = 3000;
  w.n_events = 30'000;
  w.join_fanout = 2;
  w.join_follow_prob = 1.0;
  c.workload = w;
  const std::size_t l3 = 750;  // 25% of the working set
  c.levels[index_of(Level::L1)].capacity = l3 / 8;
  c.levels[index_of(Level::L2)].capacity = l3 / 2;
  c.levels[index_of(Level::L3)].capacity = l3;
  c.policies = {"pfcs", "lru"};
  c.repetitions = 3;
  c.seed = seed;
  return c;
}

// 6. On the join workload PFCS beats LRU by at least 10 points.
Outcome join_advantage() {
  const auto report = cli::run(join_run(42));
  const double pfcs = report.find("pfcs")->mean_hit_rate();
  const double lru = report.find("lru")->mean_hit_rate();
  const double gap = (pfcs - lru) * 100.0;
  const auto detail = cat("pfcs ", pfcs, " lru ", lru, " gap ", gap, "pp over ",
                          report.repetitions.size(), " repetitions");
  return gap >= 10.0 ? pass(detail) : fail(detail);
}

using PairSet = std::unordered_set<std::uint64_t>;

std::uint64_t pair_key(std::uint64_t a, std::uint64_t b) { return (a << 32) ^ b; }

void add_group(PairSet& pairs, const std::vector<ElementId>& members) {
  for (auto a : members) {
    for (auto b : members) {
      if (a != b) pairs.insert(pair_key(key_of(a), key_of(b)));
    }
  }
}

// 7. Every prefetched element shares a declared group with its trigger.
Outcome prefetch_soundness() {
  std::uint64_t observed = 0;
  std::uint64_t violations = 0;
  std::string first;

  // Join workload through the runner.
  const cli::RunConfig config = join_run(7);
  std::vector<PairSet> declared(config.repetitions);
  for (std::uint64_t r = 0; r < config.repetitions; ++r) {
    for (const auto& ev : cli::load_events(config, r)) {
      if (ev.kind == EventKind::Relate) add_group(declared[r], ev.keys);
    }
  }
  cli::RunOptions options;
  options.on_pfcs_replay = [&](PfcsCache& cache, std::uint64_t rep) {
    cache.set_prefetch_observer([&, rep](ElementId trigger, ElementId fetched) {
      ++observed;
      if (!declared[rep].contains(pair_key(key_of(trigger), key_of(fetched)))) {
        if (first.empty()) first = cat(key_of(trigger), " -> ", key_of(fetched));
        ++violations;
      }
    });
  };
  cli::run(config, options);

  // Random overlapping groups interleaved with accesses, with recycling pressure.
  PfcsConfig pc = pfcs_with_l3(64);
  pc.levels[index_of(Level::L3)].range = PrimeRange::bounded(100'003, 101'000);
  PfcsCache cache(pc);
  PairSet pairs;
  cache.set_prefetch_observer([&](ElementId trigger, ElementId fetched) {
    ++observed;
    if (!pairs.contains(pair_key(key_of(trigger), key_of(fetched)))) {
      if (first.empty()) first = cat(key_of(trigger), " -> ", key_of(fetched));
      ++violations;
    }
  });
  std::mt19937_64 rng(77);
  for (int step = 0; step < 50'000; ++step) {
    if (rng() % 5 == 0) {
      std::set<std::uint64_t> keys;
      while (keys.size() < 2 + rng() % 4) keys.insert(rng() % 500);
      std::vector<ElementId> members;
      for (auto k : keys) members.push_back(element(k));
      add_group(pairs, members);
      cache.relate(members);
    } else {
      cache.access(element(rng() % 500));
    }
  }
  if (observed == 0) return fail("no prefetches observed");
  if (violations != 0) return fail(cat(violations, " of ", observed, " prefetches unsound, first ", first));
  return pass(cat(observed, " prefetches, all within a declared group"));
}

// 8. ARC and LIRS structural invariants hold after every access.
Outcome baseline_invariants() {
  std::uint64_t checks = 0;
  for (std::size_t capacity : {1u, 2u, 5u, 50u, 500u}) {
    for (Generator g : {Generator::Zipf, Generator::Join, Generator::Sequential}) {
      WorkloadSpec spec;
      spec.generator = g;
      spec.n_elements = capacity * 4 + 3;
      spec.n_events = 20'000;
      spec.seed = capacity;
      ArcPolicy arc(capacity);
      LirsPolicy lirs(capacity);
      std::string error;
      generate(spec, [&](const TraceEvent& ev) {
        if (ev.kind != EventKind::Access || !error.empty()) return;
        arc.access(ev.key);
        lirs.access(ev.key);
        ++checks;
        if (auto e = arc.check_invariants()) error = "arc: " + *e;
        else if (auto e2 = lirs.check_invariants()) error = "lirs: " + *e2;
        else if (arc.resident_count() > capacity) error = "arc over capacity";
        else if (lirs.resident_count() > capacity) error = "lirs over capacity";
        else if (arc.target() < 0.0 || arc.target() > static_cast<double>(capacity)) error = "arc p out of range";
        else if (arc.t1_size() + arc.b1_size() > capacity) error = "arc |T1|+|B1| > c";
        else if (arc.t1_size() + arc.t2_size() + arc.b1_size() + arc.b2_size() > 2 * capacity) error = "arc directory > 2c";
      });
      if (!error.empty()) return fail(cat("capacity ", capacity, " ", generator_name(g), ": ", error));
    }
  }
  return pass(cat(checks, " accesses checked"));
}

// 9. Recycling keeps the bijection and never resurrects a recycled element.
Outcome recycling_consistency() {
  AssignmentConfig config;
  config.ranges[index_of(Level::L3)] = PrimeRange::bounded(100'003, 100'700);  // ~55 primes
  AssignmentTable table(config);
  Factorizer factorizer;
  RelationRegistry registry(table, factorizer);
  std::mt19937_64 rng(99);
  std::uint64_t cycles = 0;
  std::uint64_t now = 0;
  std::vector<BigInt> live;
  while (cycles < 1000) {
    if (++now > 1'000'000) return fail(cat("only ", cycles, " recycle cycles"));
    std::set<std::uint64_t> keys;
    while (keys.size() < 2 + rng() % 3) keys.insert(rng() % 400);
    std::vector<std::pair<ElementId, Prime>> recycled;
    for (auto k : keys) {
      const Assignment a = registry.assign(element(k), Level::L3, now, 1);
      // Checked right away: a recycled element may legitimately win its old
      // prime back on a later assignment.
      for (const auto& [d, p] : a.recycled) {
        if (table.prime_of(d) == p) return fail(cat("cycle ", cycles, ": element kept its recycled prime"));
        for (const auto& c : registry.related_composites(p)) {
          const RelationGroup* g = registry.find(c);
          if (!g || std::find(g->members.begin(), g->members.end(), d) != g->members.end()) {
            return fail(cat("cycle ", cycles, ": group of a recycled prime survives"));
          }
        }
      }
      recycled.insert(recycled.end(), a.recycled.begin(), a.recycled.end());
    }
    std::vector<ElementId> members;
    for (auto k : keys) {
      if (table.prime_of(element(k))) members.push_back(element(k));
    }
    if (recycled.empty()) {
      if (members.size() >= 2) live.push_back(registry.register_group(members, now));
      continue;
    }
    ++cycles;
    if (auto e = table.audit()) return fail(cat("cycle ", cycles, " table: ", *e));
    if (auto e = registry.audit()) return fail(cat("cycle ", cycles, " registry: ", *e));
    // Surviving groups discover exactly their members. Purged composites never
    // lead back to the element whose prime was recycled.
    std::vector<BigInt> still_live;
    for (const auto& c : live) {
      const RelationGroup* g = registry.find(c);
      const Discovery found = registry.discover(c, kGenerous);
      if (!found.complete) return fail(cat("cycle ", cycles, ": incomplete factorization"));
      if (g) {
        if (sorted_members(found.elements) != sorted_members(g->members)) {
          return fail(cat("cycle ", cycles, ": discovery disagrees with the registered group"));
        }
        still_live.push_back(c);
        continue;
      }
      // Each returned element must own a factor now; a recycled element can
      // only come back through a prime it was given afterwards.
      for (auto e : found.elements) {
        const auto q = table.prime_of(e);
        if (!q || c % from_u64(*q) != 0) {
          return fail(cat("cycle ", cycles, ": recycled element returned"));
        }
      }
    }
    live = std::move(still_live);
    if (members.size() >= 2) live.push_back(registry.register_group(members, now));
  }

  // Same pressure through the cache, with its own invariant checks.
  PfcsConfig pc = pfcs_with_l3(32);
  pc.levels[index_of(Level::L3)].range = PrimeRange::bounded(100'003, 100'400);
  pc.levels[index_of(Level::Memory)].range = PrimeRange::bounded(10'000'019, 10'000'400);
  PfcsCache cache(pc);
  for (int step = 0; step < 20'000; ++step) {
    if (rng() % 4 == 0) {
      std::set<std::uint64_t> keys;
      while (keys.size() < 2 + rng() % 3) keys.insert(rng() % 300);
      std::vector<ElementId> members;
      for (auto k : keys) members.push_back(element(k));
      cache.relate(members);
    } else {
      cache.access(element(rng() % 300));
    }
    if (step % 20 == 0) {
      if (auto e = cache.check_invariants()) return fail(cat("cache step ", step, ": ", *e));
    }
  }
  if (auto e = cache.registry().audit()) return fail("cache registry: " + *e);
  return pass(cat(cycles, " recycle cycles, bijection and index consistent"));
}

// 10. Reports are byte-identical across runs and thread counts.
Outcome determinism() {
  cli::RunConfig c = join_run(11);
  c.workload->n_events = 10'000;
  c.policies = {"pfcs", "lru", "arc", "lirs", "semantic"};
  const std::string a = cli::render(cli::run(c, cli::RunOptions{1, {}}));
  const std::string b = cli::render(cli::run(c, cli::RunOptions{1, {}}));
  const std::string d = cli::render(cli::run(c, cli::RunOptions{8, {}}));
  if (a != b) return fail("two runs with jobs 1 differ");
  if (a != d) return fail("jobs 1 and jobs 8 differ");
  if (cli::load_events(c, 0) != cli::load_events(c, 0)) return fail("workload generation differs");
  return pass(cat(a.size(), "-byte report identical across runs and jobs 1/8"));
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"zero-false-positives", zero_false_positives},
      {"spf-oracle-sweep", spf_oracle_sweep},
      {"golden-values", golden_values},
      {"product-invariant", product_invariant},
      {"degenerate-lru-equivalence", degenerate_equivalence},
      {"join-advantage", join_advantage},
      {"prefetch-soundness", prefetch_soundness},
      {"arc-lirs-invariants", baseline_invariants},
      {"recycling-consistency", recycling_consistency},
      {"determinism", determinism},
  };
  bool all = true;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.passed ? "PASS" : "FAIL") << " [" << index << "] " << c.name << ": " << o.detail
              << " (" << secs << "s)" << std::endl;
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
