#include "pfcs/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

namespace pfcs {

std::string_view generator_name(Generator g) noexcept {
  switch (g) {
    case Generator::Sequential: return "sequential";
    case Generator::Zipf: return "zipf";
    case Generator::Join: return "join";
  }
  return "?";
}

std::optional<Generator> parse_generator(std::string_view name) noexcept {
  if (name == "sequential") return Generator::Sequential;
  if (name == "zipf") return Generator::Zipf;
  if (name == "join") return Generator::Join;
  return std::nullopt;
}

void validate(const WorkloadSpec& spec) {
  if (spec.n_elements == 0) throw InvalidSpec("workload: n_elements must be >= 1");
  if (!(spec.zipf_theta > 0.0) || !std::isfinite(spec.zipf_theta)) {
    throw InvalidSpec("workload: zipf_theta must be > 0");
  }
  if (!(spec.join_follow_prob >= 0.0 && spec.join_follow_prob <= 1.0)) {
    throw InvalidSpec("workload: join_follow_prob must lie in [0, 1]");
  }
  if (spec.generator == Generator::Join) {
    if (spec.join_fanout == 0 || spec.join_fanout > kMaxJoinFanout) {
      throw InvalidSpec("workload: join_fanout must lie in [1, " + std::to_string(kMaxJoinFanout) +
                        "]");
    }
    if (spec.n_elements < spec.join_fanout + 1) {
      throw InvalidSpec("workload: join needs n_elements >= join_fanout + 1");
    }
  }
}

// ---------------------------------------------------------------- zipf

namespace {

// log1p(x)/x with a series near 0.
double helper1(double x) {
  if (std::abs(x) > 1e-8) return std::log1p(x) / x;
  return 1.0 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x));
}

// expm1(x)/x with a series near 0.
double helper2(double x) {
  if (std::abs(x) > 1e-8) return std::expm1(x) / x;
  return 1.0 + x * 0.5 * (1.0 + x * (1.0 / 3.0) * (1.0 + 0.25 * x));
}

}  // namespace

ZipfSampler::ZipfSampler(std::uint64_t n, double theta) : n_(n), theta_(theta) {
  if (n_ == 0) throw InvalidSpec("zipf: n must be >= 1");
  if (!(theta_ > 0.0)) throw InvalidSpec("zipf: theta must be > 0");
  h_integral_x1_ = h_integral(1.5) - 1.0;
  h_integral_n_ = h_integral(static_cast<double>(n_) + 0.5);
  s_ = 2.0 - h_integral_inverse(h_integral(2.5) - h(2.0));
}

double ZipfSampler::h(double x) const { return std::exp(-theta_ * std::log(x)); }

double ZipfSampler::h_integral(double x) const {
  const double log_x = std::log(x);
  return helper2((1.0 - theta_) * log_x) * log_x;
}

double ZipfSampler::h_integral_inverse(double x) const {
  double t = x * (1.0 - theta_);
  if (t < -1.0) t = -1.0;
  return std::exp(helper1(t) * x);
}

std::uint64_t ZipfSampler::operator()(std::mt19937_64& rng) const {
  const double n = static_cast<double>(n_);
  while (true) {
    const double u = h_integral_n_ + unit_uniform(rng) * (h_integral_x1_ - h_integral_n_);
    const double x = h_integral_inverse(u);
    const double k = std::clamp(std::floor(x + 0.5), 1.0, n);
    if (k - x <= s_ || u >= h_integral(k + 0.5) - h(k)) return static_cast<std::uint64_t>(k) - 1;
  }
}

// ---------------------------------------------------------------- generators

namespace {

struct JoinLayout {
  std::uint64_t parents;
  std::uint64_t fanout;

  ElementId parent(std::uint64_t i) const { return element(i); }
  ElementId child(std::uint64_t i, std::uint64_t j) const {
    return element(parents + i * fanout + j);
  }
};

// Runs the join access stream; visit(parent_index, with_children) per parent draw.
template <typename Visit>
void join_accesses(const WorkloadSpec& spec, const JoinLayout& layout, Visit&& visit) {
  std::mt19937_64 rng(spec.seed);
  const ZipfSampler zipf(layout.parents, spec.zipf_theta);
  std::uint64_t emitted = 0;
  while (emitted < spec.n_events) {
    const std::uint64_t p = zipf(rng);
    const bool follow = unit_uniform(rng) < spec.join_follow_prob;
    const std::uint64_t room = spec.n_events - emitted - 1;
    const std::uint64_t children = follow ? std::min(layout.fanout, room) : 0;
    visit(p, children);
    emitted += 1 + children;
  }
}

}  // namespace

void generate(const WorkloadSpec& spec, const std::function<void(const TraceEvent&)>& sink) {
  validate(spec);
  switch (spec.generator) {
    case Generator::Sequential:
      for (std::uint64_t i = 0; i < spec.n_events; ++i) {
        sink(TraceEvent::access(element(i % spec.n_elements)));
      }
      return;

    case Generator::Zipf: {
      std::mt19937_64 rng(spec.seed);
      const ZipfSampler zipf(spec.n_elements, spec.zipf_theta);
      for (std::uint64_t i = 0; i < spec.n_events; ++i) sink(TraceEvent::access(element(zipf(rng))));
      return;
    }

    case Generator::Join: {
      const JoinLayout layout{spec.n_elements / (spec.join_fanout + 1), spec.join_fanout};
      // First pass finds which children each parent ever drags along, so the
      // relate preamble names only keys that are later accessed.
      std::vector<std::uint8_t> parent_seen(layout.parents, 0);
      std::vector<std::uint64_t> children_seen(layout.parents, 0);
      join_accesses(spec, layout, [&](std::uint64_t p, std::uint64_t children) {
        parent_seen[p] = 1;
        children_seen[p] = std::max(children_seen[p], children);
      });
      for (std::uint64_t p = 0; p < layout.parents; ++p) {
        if (!parent_seen[p] || children_seen[p] == 0) continue;
        std::vector<ElementId> group{layout.parent(p)};
        for (std::uint64_t j = 0; j < children_seen[p]; ++j) group.push_back(layout.child(p, j));
        sink(TraceEvent::relate(std::move(group)));
      }
      join_accesses(spec, layout, [&](std::uint64_t p, std::uint64_t children) {
        sink(TraceEvent::access(layout.parent(p)));
        for (std::uint64_t j = 0; j < children; ++j) sink(TraceEvent::access(layout.child(p, j)));
      });
      return;
    }
  }
}

std::vector<TraceEvent> generate(const WorkloadSpec& spec) {
  std::vector<TraceEvent> out;
  generate(spec, [&out](const TraceEvent& e) { out.push_back(e); });
  return out;
}

// ---------------------------------------------------------------- trace I/O

TraceParseError::TraceParseError(std::uint64_t line, const std::string& what)
    : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
      line_(line) {}

std::string format_event(const TraceEvent& event) {
  std::string out;
  if (event.kind == EventKind::Access) {
    out = R"({"op":"access","key":)" + std::to_string(key_of(event.key)) + "}";
  } else {
    out = R"({"op":"relate","keys":[)";
    for (std::size_t i = 0; i < event.keys.size(); ++i) {
      if (i > 0) out += ',';
      out += std::to_string(key_of(event.keys[i]));
    }
    out += "]}";
  }
  return out;
}

TraceEvent parse_event(std::string_view line) {
  const auto doc = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
  if (doc.is_discarded()) throw TraceParseError(0, "malformed JSON");
  if (!doc.is_object()) throw TraceParseError(0, "event must be a JSON object");
  const auto op = doc.find("op");
  if (op == doc.end() || !op->is_string()) throw TraceParseError(0, "missing string field \"op\"");

  if (*op == "access") {
    if (doc.size() != 2) throw TraceParseError(0, "access event takes exactly \"op\" and \"key\"");
    const auto key = doc.find("key");
    if (key == doc.end() || !key->is_number_unsigned()) {
      throw TraceParseError(0, "access event needs an unsigned integer \"key\"");
    }
    return TraceEvent::access(element(key->get<std::uint64_t>()));
  }
  if (*op == "relate") {
    if (doc.size() != 2) throw TraceParseError(0, "relate event takes exactly \"op\" and \"keys\"");
    const auto keys = doc.find("keys");
    if (keys == doc.end() || !keys->is_array()) {
      throw TraceParseError(0, "relate event needs an array \"keys\"");
    }
    std::vector<ElementId> members;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& k : *keys) {
      if (!k.is_number_unsigned()) throw TraceParseError(0, "relate keys must be unsigned integers");
      const auto v = k.get<std::uint64_t>();
      if (!seen.insert(v).second) throw TraceParseError(0, "relate keys must be distinct");
      members.push_back(element(v));
    }
    if (members.size() < 2) throw TraceParseError(0, "relate event needs at least 2 keys");
    return TraceEvent::relate(std::move(members));
  }
  throw TraceParseError(0, "unknown op \"" + op->get<std::string>() + "\"");
}

void TraceWriter::write(const TraceEvent& event) {
  *out_ << format_event(event) << '\n';
  if (!*out_) throw TraceIoError("trace write failed");
  ++written_;
}

std::optional<TraceEvent> TraceReader::next() {
  while (std::getline(*in_, buffer_)) {
    ++line_;
    if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
    if (buffer_.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      return parse_event(buffer_);
    } catch (const TraceParseError& e) {
      throw TraceParseError(line_, e.what());
    }
  }
  if (in_->bad()) throw TraceIoError("trace read failed after line " + std::to_string(line_));
  return std::nullopt;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TraceIoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceIoError("cannot open " + path.string() + " for reading");
  return in;
}

}  // namespace

void write_trace(const std::filesystem::path& path, const std::vector<TraceEvent>& events) {
  auto out = open_for_write(path);
  TraceWriter writer(out);
  for (const auto& e : events) writer.write(e);
  out.flush();
  if (!out) throw TraceIoError("cannot write " + path.string());
}

std::uint64_t write_generated_trace(const std::filesystem::path& path, const WorkloadSpec& spec) {
  validate(spec);
  auto out = open_for_write(path);
  TraceWriter writer(out);
  generate(spec, [&writer](const TraceEvent& e) { writer.write(e); });
  out.flush();
  if (!out) throw TraceIoError("cannot write " + path.string());
  return writer.written();
}

std::vector<TraceEvent> read_trace(const std::filesystem::path& path) {
  std::vector<TraceEvent> events;
  for_each_event(path, [&events](const TraceEvent& e) { events.push_back(e); });
  return events;
}

std::uint64_t for_each_event(const std::filesystem::path& path,
                             const std::function<void(const TraceEvent&)>& fn) {
  auto in = open_for_read(path);
  TraceReader reader(in);
  std::uint64_t count = 0;
  while (auto e = reader.next()) {
    fn(*e);
    ++count;
  }
  return count;
}

}  // namespace pfcs
