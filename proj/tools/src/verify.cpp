#include "pfcs_cli/verify.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <set>

#include "pfcs/assignment.hpp"
#include "pfcs/factorizer.hpp"
#include "pfcs/relations.hpp"

namespace pfcs::cli {
namespace {

constexpr StepBudget kGenerousBudget{1'000'000'000};

// Plain trial division, deliberately unrelated to the factorizer's code paths.
std::vector<std::uint64_t> trial_division(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    while (n % d == 0) {
      out.push_back(d);
      n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::vector<Prime> primes_of(const AssignmentTable& table, const std::vector<ElementId>& elements) {
  std::vector<Prime> out;
  for (ElementId d : elements) out.push_back(table.prime_of(d).value_or(0));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

CheckResult check_zero_false_positives(const VerifyOptions& options) {
  CheckResult result{"zero-false-positives", true, ""};
  AssignmentTable table;
  Factorizer factorizer;
  RelationRegistry registry(table, factorizer);
  for (std::uint64_t k = 0; k < options.elements; ++k) registry.assign(element(k), Level::L3, 0, 1);

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, options.elements - 1);
  std::uniform_int_distribution<std::size_t> arity(2, std::min<std::size_t>(8, options.elements));
  std::uint64_t failures = 0;
  for (std::uint64_t g = 0; g < options.groups; ++g) {
    std::set<std::uint64_t> keys;
    const std::size_t want = arity(rng);
    while (keys.size() < want) keys.insert(pick(rng));
    std::vector<ElementId> members;
    for (auto k : keys) members.push_back(element(k));

    const BigInt c = registry.register_group(members, g);
    const Discovery found = registry.discover(c, kGenerousBudget);
    std::vector<ElementId> got = found.elements;
    std::sort(got.begin(), got.end());
    if (!found.complete || !found.dangling.empty() || got != members) {
      if (failures++ == 0) result.detail = "first mismatch at composite " + c.get_str();
    }
  }
  result.passed = failures == 0;
  result.detail = std::to_string(options.groups) + " groups, " + std::to_string(failures) +
                  " mismatches" + (result.detail.empty() ? "" : "; " + result.detail);
  return result;
}

CheckResult check_spf_oracle(const VerifyOptions& options) {
  CheckResult result{"spf-oracle", true, ""};
  Factorizer factorizer;
  std::uint64_t failures = 0;
  std::uint64_t first_bad = 0;
  for (std::uint64_t c = 2; c < options.spf_limit; ++c) {
    const Factorization f = factorizer.factorize(from_u64(c), StepBudget{0});
    std::vector<std::uint64_t> got;
    for (const auto& p : f.factors) got.push_back(to_u64(p));
    std::sort(got.begin(), got.end());
    if (!f.complete || f.remainder != 1 || got != trial_division(c)) {
      if (failures++ == 0) first_bad = c;
    }
  }
  result.passed = failures == 0;
  result.detail = "2 <= c < " + std::to_string(options.spf_limit) + ", " +
                  std::to_string(failures) + " mismatches" +
                  (failures ? "; first at " + std::to_string(first_bad) : "");
  return result;
}

std::vector<CheckResult> check_golden_examples() {
  struct Golden {
    std::uint64_t composite;
    std::vector<Prime> primes;
  };
  const std::vector<Golden> cases{{143, {11, 13}}, {6, {2, 3}}, {3027, {3, 1009}}};

  std::vector<CheckResult> out;
  for (const auto& g : cases) {
    CheckResult r{"golden-" + std::to_string(g.composite), false, ""};
    AssignmentTable table;
    Factorizer factorizer;
    RelationRegistry registry(table, factorizer);
    std::vector<ElementId> members;
    for (std::size_t i = 0; i < g.primes.size(); ++i) {
      members.push_back(element(i));
      table.bind(element(i), g.primes[i]);
    }
    const BigInt c = registry.register_group(members);
    const Discovery found = registry.discover(from_u64(g.composite), StepBudget{0});
    const auto primes = primes_of(table, found.elements);
    r.passed = c == from_u64(g.composite) && found.complete && primes == g.primes;
    r.detail = "discover(" + std::to_string(g.composite) + ") -> {";
    for (std::size_t i = 0; i < primes.size(); ++i) {
      r.detail += (i ? "," : "") + std::to_string(primes[i]);
    }
    r.detail += "}";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> run_verify(const VerifyOptions& options) {
  std::vector<CheckResult> out;
  out.push_back(check_zero_false_positives(options));
  out.push_back(check_spf_oracle(options));
  for (auto& r : check_golden_examples()) out.push_back(std::move(r));
  return out;
}

bool print_results(const std::vector<CheckResult>& results, std::ostream& out) {
  bool ok = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  out << (ok ? "all checks passed" : "verification FAILED") << '\n';
  return ok;
}

}  // namespace pfcs::cli
