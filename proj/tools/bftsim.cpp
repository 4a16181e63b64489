// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

// bftsim: run, fuzz, verify and report on decision-ensemble scenarios.
// Exit codes: 0 success, 1 usage or configuration error, 2 invariant violated.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "bftguard/scenario/campaign.hpp"
#include "bftguard/scenario/episode.hpp"
#include "bftguard/scenario/report.hpp"
#include "bftguard/scenario/scenario.hpp"

namespace fs = std::filesystem;
using namespace bftguard;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kViolation = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + p.string());
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& log_dir, bool quiet) {
  Scenario s = parse_scenario(path);
  if (seed) s.seed = *seed;
  const auto mode = log_dir.empty() ? EventLog::Mode::kDigestOnly : EventLog::Mode::kKeepLines;
  const EpisodeResult result = run_episode(s, RunOptions{mode});
  const std::string log = result.decision_log();
  const auto parsed = parse_decision_log(log);
  if (!log_dir.empty()) {
    fs::create_directories(log_dir);
    write_file(fs::path(log_dir) / "decision.log", log);
    const std::string events = result.events->text();
    write_file(fs::path(log_dir) / "event.log", events);
    write_file(fs::path(log_dir) / "report.txt", render_report(parsed, summarize_event_log(events)));
  }
  if (!quiet) std::cout << log;
  std::cout << "# decision_digest=" << result.decision_digest().hex()
            << " event_digest=" << result.events->fingerprint().hex() << "\n";
  const auto verdict = verify_decision_log(parsed);
  if (!verdict.clean()) {
    for (auto f : verdict.agreement_violations) std::cerr << "agreement violation at frame " << f << "\n";
    for (const auto& p : verdict.inconsistencies) std::cerr << p << "\n";
    return kViolation;
  }
  return kOk;
}

int cmd_fuzz(const std::string& path, const CampaignOptions& options) {
  const Scenario s = parse_scenario(path);
  const auto report = fuzz_campaign(s, options);
  std::cout << report.text();
  return report.passed() ? kOk : kViolation;
}

int cmd_verify(const std::string& path) {
  const auto parsed = parse_decision_log(read_file(path));
  if (!parsed.problems.empty()) {
    for (const auto& p : parsed.problems) std::cerr << path << ": " << p << "\n";
    return kConfigError;
  }
  const auto v = verify_decision_log(parsed);
  for (auto f : v.agreement_violations) {
    std::cout << "agreement violation at frame " << f << (v.violation_expected ? " (expected)" : "") << "\n";
  }
  for (const auto& p : v.inconsistencies) std::cout << "inconsistent: " << p << "\n";
  std::cout << parsed.records.size() << " records, " << parsed.events.size() << " supervisor rows: "
            << (v.clean() ? "ok" : "FAILED") << "\n";
  return v.clean() ? kOk : kViolation;
}

int cmd_report(const std::string& dir) {
  const auto parsed = parse_decision_log(read_file(fs::path(dir) / "decision.log"));
  if (!parsed.problems.empty()) {
    for (const auto& p : parsed.problems) std::cerr << dir << "/decision.log: " << p << "\n";
    return kConfigError;
  }
  std::map<std::string, std::uint64_t> counts;
  if (fs::exists(fs::path(dir) / "event.log")) counts = summarize_event_log(read_file(fs::path(dir) / "event.log"));
  std::cout << render_report(parsed, counts);
  return verify_decision_log(parsed).clean() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-tolerant decision ensemble simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string log_dir;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run one episode and print its decision log");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--log-dir", log_dir, "Write decision.log, event.log and report.txt here");
  run->add_flag("-q,--quiet", quiet, "Print only the digests");

  CampaignOptions campaign;
  std::optional<std::uint32_t> slots;
  auto* fuzz = app.add_subcommand("fuzz", "Randomized fault-injection campaign");
  fuzz->add_option("scenario", scenario_path, "Base scenario file")->required();
  fuzz->add_option("--episodes", campaign.episodes, "Episodes to run")->default_val(100);
  fuzz->add_option("--seed", campaign.seed, "Campaign seed")->default_val(0);
  fuzz->add_option("--jobs", campaign.jobs, "Worker threads")->default_val(1)->check(CLI::PositiveNumber);
  fuzz->add_option("--fault-slots", slots, "Most faulty modules per episode (default f)");

  std::string log_path;
  auto* verify = app.add_subcommand("verify", "Recheck the invariants of a decision log");
  verify->add_option("decision-log", log_path, "Decision log file")->required();

  auto* report = app.add_subcommand("report", "Summarize a log directory written by run");
  report->add_option("log-dir", log_dir, "Directory holding decision.log")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(scenario_path, seed, log_dir, quiet);
    if (*fuzz) {
      campaign.fault_slots = slots;
      return cmd_fuzz(scenario_path, campaign);
    }
    if (*verify) return cmd_verify(log_path);
    if (*report) return cmd_report(log_dir);
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
