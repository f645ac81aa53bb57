#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pfcs/types.hpp"

namespace pfcs {

enum class EventKind : std::uint8_t { Access, Relate };

struct TraceEvent {
  EventKind kind = EventKind::Access;
  ElementId key{};              // Access
  std::vector<ElementId> keys;  // Relate

  static TraceEvent access(ElementId d) { return {EventKind::Access, d, {}}; }
  static TraceEvent relate(std::vector<ElementId> members) {
    return {EventKind::Relate, ElementId{}, std::move(members)};
  }

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

enum class Generator : std::uint8_t { Sequential, Zipf, Join };

std::string_view generator_name(Generator g) noexcept;
std::optional<Generator> parse_generator(std::string_view name) noexcept;

// Upper bound on join fanout so a parent and its children fit one relate event.
inline constexpr std::uint64_t kMaxJoinFanout = 15;

struct WorkloadSpec {
  Generator generator = Generator::Zipf;
  std::uint64_t n_elements = 1000;
  std::uint64_t n_events = 10000;  // access events; relate events come on top
  double zipf_theta = 0.99;
  std::uint64_t join_fanout = 2;
  double join_follow_prob = 1.0;
  std::uint64_t seed = 42;

  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws InvalidSpec.
void validate(const WorkloadSpec& spec);

// Calls sink for each event in order. Deterministic given spec.
void generate(const WorkloadSpec& spec, const std::function<void(const TraceEvent&)>& sink);
std::vector<TraceEvent> generate(const WorkloadSpec& spec);

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Zipf(theta) over ranks 0..n-1 (rank 0 most popular) by rejection-inversion.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double theta);
  std::uint64_t operator()(std::mt19937_64& rng) const;

  std::uint64_t size() const noexcept { return n_; }
  double theta() const noexcept { return theta_; }

 private:
  double h(double x) const;
  double h_integral(double x) const;
  double h_integral_inverse(double x) const;

  std::uint64_t n_;
  double theta_;
  double h_integral_x1_;
  double h_integral_n_;
  double s_;
};

// ---------------------------------------------------------------- trace I/O

class TraceIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::uint64_t line, const std::string& what);
  std::uint64_t line() const noexcept { return line_; }

 private:
  std::uint64_t line_;
};

// One JSON object per line, LF-terminated.
std::string format_event(const TraceEvent& event);
// Throws TraceParseError (line 0; TraceReader fills in the real line).
TraceEvent parse_event(std::string_view line);

class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(&out) {}
  void write(const TraceEvent& event);
  std::uint64_t written() const noexcept { return written_; }

 private:
  std::ostream* out_;
  std::uint64_t written_ = 0;
};

// Reads one event at a time; memory use does not grow with trace length.
// Blank lines are skipped.
class TraceReader {
 public:
  explicit TraceReader(std::istream& in) : in_(&in) {}
  std::optional<TraceEvent> next();
  std::uint64_t line() const noexcept { return line_; }

 private:
  std::istream* in_;
  std::string buffer_;
  std::uint64_t line_ = 0;
};

void write_trace(const std::filesystem::path& path, const std::vector<TraceEvent>& events);
// Streams the generator straight to disk. Returns the number of events written.
std::uint64_t write_generated_trace(const std::filesystem::path& path, const WorkloadSpec& spec);
std::vector<TraceEvent> read_trace(const std::filesystem::path& path);
// Streaming visit; returns the number of events.
std::uint64_t for_each_event(const std::filesystem::path& path,
                             const std::function<void(const TraceEvent&)>& fn);

}  // namespace pfcs
