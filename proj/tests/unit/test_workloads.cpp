#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pfcs/workloads.hpp"
#include "support/oracles.hpp"

using namespace pfcs;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pfcs_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Current resident set size in kB (Linux).
long current_rss_kb() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmRSS:", 0) == 0) return std::stol(line.substr(6));
  }
  return -1;
}

WorkloadSpec join_spec(std::uint64_t elements, std::uint64_t events, double follow) {
  WorkloadSpec s;
  s.generator = Generator::Join;
  s.n_elements = elements;
  s.n_events = events;
  s.join_fanout = 2;
  s.join_follow_prob = follow;
  return s;
}

}  // namespace

TEST(Generate, SequentialWraps) {
  WorkloadSpec s;
  s.generator = Generator::Sequential;
  s.n_elements = 3;
  s.n_events = 6;
  std::vector<std::uint64_t> keys;
  for (const auto& e : generate(s)) keys.push_back(key_of(e.key));
  EXPECT_EQ(keys, (std::vector<std::uint64_t>{0, 1, 2, 0, 1, 2}));
}

TEST(Generate, ZipfTopKeyMatchesAnalyticMass) {
  WorkloadSpec s;
  s.generator = Generator::Zipf;
  s.n_elements = 10'000;
  s.n_events = 200'000;
  s.zipf_theta = 0.99;
  std::map<std::uint64_t, std::uint64_t> counts;
  for (const auto& e : generate(s)) ++counts[key_of(e.key)];
  const double expected = 1.0 / oracle::harmonic(10'000, 0.99);
  const double observed = static_cast<double>(counts[0]) / 200'000.0;
  EXPECT_NEAR(observed, expected, 0.1 * expected);
  // Rank order holds for the head of the distribution.
  EXPECT_GT(counts[0], counts[1]);
  EXPECT_GT(counts[1], counts[9]);
}

TEST(Generate, ZipfOtherExponents) {
  for (double theta : {0.5, 1.0, 1.5}) {
    const ZipfSampler zipf(100, theta);
    std::mt19937_64 rng(4);
    std::vector<std::uint64_t> counts(100, 0);
    const int n = 200'000;
    for (int i = 0; i < n; ++i) {
      const auto k = zipf(rng);
      ASSERT_LT(k, 100u);
      ++counts[k];
    }
    const double h = oracle::harmonic(100, theta);
    for (std::uint64_t k : {0, 1, 4}) {
      const double want = std::pow(static_cast<double>(k + 1), -theta) / h;
      EXPECT_NEAR(static_cast<double>(counts[k]) / n, want, 0.1 * want) << theta << " k=" << k;
    }
  }
}

TEST(Generate, JoinFollowAlways) {
  const auto events = generate(join_spec(300, 3000, 1.0));
  const std::uint64_t parents = 300 / 3;
  std::size_t i = 0;
  while (i < events.size() && events[i].kind == EventKind::Relate) ++i;
  ASSERT_GT(i, 0u);
  std::uint64_t accesses = 0;
  for (; i < events.size(); i += 3) {
    const auto p = key_of(events[i].key);
    ASSERT_LT(p, parents);
    accesses += 1;
    if (i + 2 >= events.size()) break;
    EXPECT_EQ(key_of(events[i + 1].key), parents + 2 * p);
    EXPECT_EQ(key_of(events[i + 2].key), parents + 2 * p + 1);
    accesses += 2;
  }
  EXPECT_EQ(accesses, 3000u);
}

TEST(Generate, JoinRelatePreambleKeysAreAccessed) {
  for (double follow : {0.0, 0.3, 1.0}) {
    const auto events = generate(join_spec(1000, 5000, follow));
    std::set<std::uint64_t> accessed;
    std::uint64_t access_count = 0;
    bool preamble = true;
    for (const auto& e : events) {
      if (e.kind == EventKind::Access) {
        preamble = false;
        accessed.insert(key_of(e.key));
        ++access_count;
      } else {
        EXPECT_TRUE(preamble) << "relate after accesses";
        EXPECT_GE(e.keys.size(), 2u);
        EXPECT_LE(e.keys.size(), kMaxJoinFanout + 1);
      }
    }
    EXPECT_EQ(access_count, 5000u);
    for (const auto& e : events) {
      if (e.kind != EventKind::Relate) continue;
      for (auto k : e.keys) EXPECT_TRUE(accessed.contains(key_of(k))) << key_of(k);
    }
  }
}

TEST(Generate, InvalidSpecs) {
  WorkloadSpec s;
  s.zipf_theta = 0.0;
  EXPECT_THROW(generate(s), InvalidSpec);
  s = WorkloadSpec{};
  s.join_follow_prob = 1.5;
  EXPECT_THROW(validate(s), InvalidSpec);
  s = WorkloadSpec{};
  s.n_elements = 0;
  EXPECT_THROW(validate(s), InvalidSpec);
  s = join_spec(2, 10, 1.0);  // fewer elements than one parent group
  EXPECT_THROW(validate(s), InvalidSpec);
  s = join_spec(100, 10, 1.0);
  s.join_fanout = 0;
  EXPECT_THROW(validate(s), InvalidSpec);
}

TEST(Generate, SeedDeterminismIsByteExact) {
  const auto a = temp_path("det_a.jsonl");
  const auto b = temp_path("det_b.jsonl");
  const auto spec = join_spec(1000, 20'000, 0.7);
  write_generated_trace(a, spec);
  write_generated_trace(b, spec);
  EXPECT_EQ(slurp(a), slurp(b));
  auto other = spec;
  other.seed += 1;
  write_generated_trace(b, other);
  EXPECT_NE(slurp(a), slurp(b));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(TraceFormat, ExactBytes) {
  EXPECT_EQ(format_event(TraceEvent::access(element(5))), R"({"op":"access","key":5})");
  EXPECT_EQ(format_event(TraceEvent::relate({element(1), element(22), element(333)})),
            R"({"op":"relate","keys":[1,22,333]})");
  EXPECT_EQ(format_event(TraceEvent::access(element(18446744073709551615ULL))),
            R"({"op":"access","key":18446744073709551615})");
}

TEST(TraceIo, RoundTrip) {
  WorkloadSpec spec = join_spec(500, 5000, 0.5);
  const auto events = generate(spec);
  const auto path = temp_path("roundtrip.jsonl");
  write_trace(path, events);
  EXPECT_EQ(read_trace(path), events);
  std::filesystem::remove(path);
}

TEST(TraceIo, ParseErrorNamesTheLine) {
  std::stringstream in;
  for (int i = 0; i < 6; ++i) in << R"({"op":"access","key":)" << i << "}\n";
  in << R"({"op":"access","key":-4})" << "\n";
  TraceReader reader(in);
  for (int i = 0; i < 6; ++i) ASSERT_TRUE(reader.next());
  try {
    reader.next();
    FAIL() << "expected a parse error";
  } catch (const TraceParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
  }
}

TEST(TraceIo, RejectsMalformedEvents) {
  for (const char* bad : {"not json", "[1,2]", R"({"op":"access"})", R"({"op":"access","key":"7"})",
                          R"({"op":"access","key":1.5})", R"({"op":"relate","keys":[1]})",
                          R"({"op":"relate","keys":[1,1]})", R"({"op":"fetch","key":1})",
                          R"({"op":"access","key":1,"extra":0})", R"({"key":1})"}) {
    EXPECT_THROW(parse_event(bad), TraceParseError) << bad;
  }
}

TEST(TraceIo, SkipsBlankLinesAndCrlf) {
  std::stringstream in("{\"op\":\"access\",\"key\":1}\r\n\n   \n{\"op\":\"relate\",\"keys\":[2,3]}\n");
  TraceReader reader(in);
  EXPECT_EQ(reader.next(), TraceEvent::access(element(1)));
  EXPECT_EQ(reader.next(), TraceEvent::relate({element(2), element(3)}));
  EXPECT_EQ(reader.next(), std::nullopt);
  EXPECT_EQ(reader.line(), 4u);
}

TEST(TraceIo, MissingFileIsAnIoError) {
  EXPECT_THROW(read_trace(temp_path("does_not_exist.jsonl")), TraceIoError);
}

TEST(TraceIo, MillionEventsInConstantMemory) {
  WorkloadSpec spec;
  spec.generator = Generator::Zipf;
  spec.n_elements = 100'000;
  spec.n_events = 1'000'000;
  const auto path = temp_path("million.jsonl");
  ASSERT_EQ(write_generated_trace(path, spec), 1'000'000u);

  const long start = current_rss_kb();
  ASSERT_GT(start, 0);
  long peak = start;
  std::uint64_t seen = 0;
  for_each_event(path, [&](const TraceEvent&) {
    if (++seen % 50'000 == 0) peak = std::max(peak, current_rss_kb());
  });
  EXPECT_EQ(seen, 1'000'000u);
  // Materialising the events would need tens of MB; streaming stays flat.
  EXPECT_LT(peak - start, 4 * 1024) << "kB growth";
  std::filesystem::remove(path);
}
