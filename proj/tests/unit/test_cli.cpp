#include <gtest/gtest.h>

#include <sstream>

#include "pfcs_cli/run_config.hpp"
#include "pfcs_cli/runner.hpp"
#include "pfcs_cli/verify.hpp"

using namespace pfcs;
using namespace pfcs::cli;

namespace {

RunConfig small_run(Generator g, std::uint64_t elements, std::uint64_t events) {
  RunConfig c;
  WorkloadSpec w;
  w.generator = g;
  w.n_elements = elements;
  w.n_events = events;
  c.workload = w;
  c.levels[index_of(Level::L1)].capacity = 8;
  c.levels[index_of(Level::L2)].capacity = 32;
  c.levels[index_of(Level::L3)].capacity = 128;
  return c;
}

}  // namespace

TEST(RunConfigParse, EmptyObjectGivesDefaults) {
  EXPECT_EQ(parse_run_config(Json::object()), RunConfig{});
}

TEST(RunConfigParse, PartialOverrides) {
  const auto c = parse_run_config(Json::parse(R"({
    "levels": [{"name": "L1", "capacity": 16}],
    "policies": ["pfcs", "lru"],
    "workload": {"kind": "join", "elements": 300, "fanout": 3},
    "seed": 7
  })"));
  EXPECT_EQ(c.levels[0].capacity, 16u);
  EXPECT_EQ(c.levels[1], default_level_configs()[1]);
  EXPECT_EQ(c.policies, (std::vector<std::string>{"pfcs", "lru"}));
  ASSERT_TRUE(c.workload);
  EXPECT_EQ(c.workload->generator, Generator::Join);
  EXPECT_EQ(c.workload->join_fanout, 3u);
  EXPECT_EQ(c.workload->n_events, WorkloadSpec{}.n_events);
  EXPECT_EQ(c.seed, 7u);
}

TEST(RunConfigParse, RejectsBadDocuments) {
  for (const char* bad : {R"([])", R"({"bogus": 1})", R"({"levels": [{"capacity": 3}]})",
                          R"({"levels": [{"name": "L9"}]})", R"({"seed": -1})",
                          R"({"policies": "pfcs"})", R"({"workload": {"kind": "pareto"}})",
                          R"({"workload": {"elements": 1.5}})", R"({"ewma_alpha": "high"})"}) {
    EXPECT_THROW(parse_run_config(Json::parse(bad)), ConfigError) << bad;
  }
}

TEST(RunConfigValidate, RejectsInconsistentValues) {
  auto expect_invalid = [](auto mutate, const char* what) {
    RunConfig c;
    mutate(c);
    EXPECT_THROW(validate(c), ConfigError) << what;
  };
  EXPECT_NO_THROW(validate(RunConfig{}));
  expect_invalid([](RunConfig& c) { c.policies.clear(); }, "no policies");
  expect_invalid([](RunConfig& c) { c.policies = {"lru", "lru"}; }, "duplicate");
  expect_invalid([](RunConfig& c) { c.policies = {"fifo"}; }, "unknown policy");
  expect_invalid([](RunConfig& c) { c.levels[0].capacity = 0; }, "zero capacity");
  expect_invalid([](RunConfig& c) { c.levels[1].range = PrimeRange::bounded(50, 2000); },
                 "overlapping ranges");
  expect_invalid([](RunConfig& c) { c.levels[1].range = PrimeRange::bounded(1010, 1012); },
                 "range without primes");
  expect_invalid([](RunConfig& c) { c.workload.reset(); }, "no input");
  expect_invalid([](RunConfig& c) { c.workload->zipf_theta = 0.0; }, "theta");
  expect_invalid([](RunConfig& c) { c.arity_cap = 1; }, "arity");
  expect_invalid([](RunConfig& c) { c.ewma_alpha = 0.0; }, "alpha");
  expect_invalid([](RunConfig& c) { c.f_warm = c.f_hot; }, "thresholds");
  expect_invalid([](RunConfig& c) { c.recycle_fraction = 0.0; }, "recycle");
  expect_invalid([](RunConfig& c) { c.lirs_hir_fraction = 1.0; }, "hir");
  expect_invalid([](RunConfig& c) { c.repetitions = 0; }, "repetitions");
}

TEST(RunConfigEcho, RoundTrips) {
  RunConfig c = small_run(Generator::Join, 600, 1234);
  c.policies = {"lirs", "pfcs", "semantic"};
  c.trace = "trace.jsonl";
  c.ewma_alpha = 0.65;
  c.repetitions = 3;
  c.levels[2].budget = StepBudget{777};
  EXPECT_EQ(parse_run_config(to_json(c)), c);
  c.out = "report.json";
  EXPECT_FALSE(to_json(c).contains("out"));
}

TEST(SplitPolicies, Csv) {
  EXPECT_EQ(split_policies("pfcs,lru, arc"), (std::vector<std::string>{"pfcs", "lru", "arc"}));
}

TEST(Run, DegenerateTraceMatchesLru) {
  RunConfig c = small_run(Generator::Zipf, 2000, 20'000);
  c.policies = {"pfcs", "lru"};
  const auto report = run(c);
  const auto* pfcs = report.find("pfcs");
  const auto* lru = report.find("lru");
  ASSERT_TRUE(pfcs && lru);
  EXPECT_EQ(pfcs->total().hits, lru->total().hits);
  EXPECT_EQ(pfcs->total().accesses, 20'000u);
  EXPECT_EQ(pfcs->total().prefetch_issued, 0u);
}

TEST(Run, JoinWorkloadFavoursPfcs) {
  RunConfig c = small_run(Generator::Join, 3000, 30'000);
  c.levels[index_of(Level::L1)].capacity = 94;
  c.levels[index_of(Level::L2)].capacity = 375;
  c.levels[index_of(Level::L3)].capacity = 750;
  c.policies = {"pfcs", "lru"};
  const auto report = run(c);
  EXPECT_GT(report.find("pfcs")->mean_hit_rate(), report.find("lru")->mean_hit_rate());
}

TEST(Run, ReportIndependentOfJobs) {
  RunConfig c = small_run(Generator::Join, 900, 5000);
  c.policies = {"pfcs", "lru", "arc", "lirs", "semantic"};
  c.repetitions = 3;
  const auto one = render(run(c, RunOptions{1, {}}));
  const auto eight = render(run(c, RunOptions{8, {}}));
  EXPECT_EQ(one, eight);
  EXPECT_EQ(one, render(run(c, RunOptions{1, {}})));
}

TEST(Run, RepetitionsUseShiftedSeeds) {
  RunConfig c = small_run(Generator::Zipf, 500, 1000);
  c.repetitions = 2;
  c.seed = 10;
  const auto report = run(c);
  ASSERT_EQ(report.repetitions.size(), 2u);
  EXPECT_EQ(report.repetitions[0].seed, 10u);
  EXPECT_EQ(report.repetitions[1].seed, 11u);
  EXPECT_NE(load_events(c, 0), load_events(c, 1));
}

TEST(Run, SemanticIsReportedAsNull) {
  RunConfig c = small_run(Generator::Zipf, 100, 200);
  c.policies = {"semantic"};
  const Json j = to_json(run(c));
  const Json& p = j.at("policies").at(0);
  EXPECT_EQ(p.at("name"), "semantic");
  EXPECT_EQ(p.at("implemented"), false);
  EXPECT_TRUE(p.at("hit_rate").is_null());
  EXPECT_TRUE(p.at("stats").is_null());
}

TEST(Run, ReportEchoesConfig) {
  RunConfig c = small_run(Generator::Sequential, 50, 100);
  c.out = "somewhere.json";
  const Json j = to_json(run(c));
  EXPECT_EQ(j.at("tool"), "pfcs");
  EXPECT_EQ(j.at("seed"), c.seed);
  RunConfig echoed = parse_run_config(j.at("config"));
  c.out.reset();
  EXPECT_EQ(echoed, c);
}

TEST(Verify, GoldenExamplesPass) {
  const auto results = check_golden_examples();
  ASSERT_EQ(results.size(), 3u);
  for (const auto& r : results) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
}

TEST(Verify, SmallSweepsPass) {
  VerifyOptions o;
  o.groups = 500;
  o.elements = 1000;
  o.spf_limit = 20'000;
  std::ostringstream out;
  EXPECT_TRUE(print_results(run_verify(o), out));
  EXPECT_EQ(out.str().find("FAIL"), std::string::npos);
  EXPECT_NE(out.str().find("PASS"), std::string::npos);
}
