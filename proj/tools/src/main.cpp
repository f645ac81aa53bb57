// pfcs: trace generation, policy replay and self-verification.
//
// Exit status: 0 success, 1 verification failure, 2 usage or config error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pfcs_cli/run_config.hpp"
#include "pfcs_cli/runner.hpp"
#include "pfcs_cli/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

struct GenerateArgs {
  std::string kind = "zipf";
  pfcs::WorkloadSpec spec;
  std::string out;
};

struct RunArgs {
  std::string config;
  std::string trace;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> repetitions;
  std::string policies;
  unsigned jobs = 1;
};

int cmd_generate(GenerateArgs args) {
  const auto g = pfcs::parse_generator(args.kind);
  if (!g) {
    std::cerr << "invalid spec: unknown generator \"" << args.kind << "\"\n";
    return kUsage;
  }
  args.spec.generator = *g;
  try {
    const auto n = pfcs::write_generated_trace(args.out, args.spec);
    std::cout << n << " events written to " << args.out << '\n';
  } catch (const pfcs::InvalidSpec& e) {
    std::cerr << "invalid spec: " << e.what() << '\n';
    return kUsage;
  } catch (const pfcs::TraceIoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

int cmd_run(const RunArgs& args) {
  using namespace pfcs::cli;
  try {
    RunConfig config = args.config.empty() ? RunConfig{} : load_run_config(args.config);
    if (!args.trace.empty()) config.trace = args.trace;
    if (!args.out.empty()) config.out = args.out;
    if (args.seed) config.seed = *args.seed;
    if (args.repetitions) config.repetitions = *args.repetitions;
    if (!args.policies.empty()) config.policies = split_policies(args.policies);

    const RunReport report = run(config, RunOptions{args.jobs, {}});
    const std::string text = render(report);
    if (config.out) {
      std::ofstream out(*config.out, std::ios::binary | std::ios::trunc);
      out << text;
      if (!out) {
        std::cerr << "I/O error: cannot write " << *config.out << '\n';
        return kUsage;
      }
      for (const auto& p : report.policies) {
        std::cout << p.name << ": ";
        if (p.implemented) {
          std::cout << "hit_rate " << p.total().hit_rate() << '\n';
        } else {
          std::cout << "not implemented\n";
        }
      }
    } else {
      std::cout << text;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const pfcs::TraceParseError& e) {
    std::cerr << "trace parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const pfcs::TraceIoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kUsage;
  } catch (const pfcs::AssignmentFailure& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prime factorization cache simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pfcs::cli::tool_version()));

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic JSONL trace");
  generate->add_option("--kind", gen.kind, "sequential | zipf | join")->capture_default_str();
  generate->add_option("--elements", gen.spec.n_elements, "Key space size")->capture_default_str();
  generate->add_option("--events", gen.spec.n_events, "Access events")->capture_default_str();
  generate->add_option("--theta", gen.spec.zipf_theta, "Zipf exponent (> 0)")->capture_default_str();
  generate->add_option("--fanout", gen.spec.join_fanout, "Join children per parent")
      ->capture_default_str();
  generate->add_option("--follow-prob", gen.spec.join_follow_prob,
                       "Probability a parent access pulls in its children")
      ->capture_default_str();
  generate->add_option("--seed", gen.spec.seed, "Generator seed")->capture_default_str();
  generate->add_option("--out", gen.out, "Output trace path")->required();

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Replay a workload against the selected policies");
  run->add_option("--config", run_args.config, "JSON run configuration");
  run->add_option("--trace", run_args.trace, "JSONL trace (overrides the config workload)");
  run->add_option("--out", run_args.out, "Report path (default: stdout)");
  run->add_option("--seed", run_args.seed, "Base seed");
  run->add_option("--repetitions", run_args.repetitions, "Repetitions per policy");
  run->add_option("--policies", run_args.policies, "Comma-separated: pfcs,lru,arc,lirs,semantic");
  run->add_option("--jobs", run_args.jobs, "Parallel replays")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();

  pfcs::cli::VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Run the built-in correctness checks");
  verify->add_option("--groups", verify_opts.groups, "Zero-false-positive sweep size")
      ->capture_default_str();
  verify->add_option("--elements", verify_opts.elements, "Elements in the sweep")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--spf-limit", verify_opts.spf_limit, "Exhaustive factorization bound")
      ->capture_default_str();
  verify->add_option("--seed", verify_opts.seed, "Sweep seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*generate) return cmd_generate(gen);
  if (*run) return cmd_run(run_args);
  if (*verify) {
    const auto results = pfcs::cli::run_verify(verify_opts);
    return pfcs::cli::print_results(results, std::cout) ? kOk : kVerifyFailed;
  }
  return kUsage;
}
