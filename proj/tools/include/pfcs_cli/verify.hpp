#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pfcs::cli {

struct VerifyOptions {
  std::uint64_t groups = 10'000;      // zero-false-positive sweep size
  std::uint64_t elements = 10'000;
  std::uint64_t spf_limit = 1'000'000;  // exhaustive factorization sweep bound (exclusive)
  std::uint64_t seed = 42;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

CheckResult check_zero_false_positives(const VerifyOptions& options);
CheckResult check_spf_oracle(const VerifyOptions& options);
// 143 -> {11, 13}, 6 -> {2, 3}, 3027 -> {3, 1009}.
std::vector<CheckResult> check_golden_examples();

std::vector<CheckResult> run_verify(const VerifyOptions& options);
// One line per check; returns true when all passed.
bool print_results(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace pfcs::cli
