// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/scenario/report.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <set>
#include <sstream>

namespace bftguard {
namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::optional<std::uint64_t> to_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<VerdictKind> parse_verdict(std::string_view s) {
  for (auto k : {VerdictKind::kDecided, VerdictKind::kNoQuorum, VerdictKind::kSafeMode}) {
    if (verdict_name(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<SupervisorEventKind> parse_event_kind(std::string_view s) {
  for (auto k : {SupervisorEventKind::kFlagged, SupervisorEventKind::kIsolated, SupervisorEventKind::kRecovered}) {
    if (event_name(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<DecisionRecord> parse_record(const std::vector<std::string>& f, std::string& error) {
  DecisionRecord r;
  const auto frame = to_u64(f[0]);
  const auto verdict = parse_verdict(f[1]);
  if (!frame) return error = "bad frame '" + f[0] + "'", std::nullopt;
  if (!verdict) return error = "bad verdict '" + f[1] + "'", std::nullopt;
  r.frame = *frame;
  r.verdict = *verdict;
  if (f[2] != "-") r.value = f[2];
  if (f[3] != "-") {
    for (const auto& id : split(f[3], ',')) {
      const auto v = to_u64(id);
      if (!v) return error = "bad supporter '" + id + "'", std::nullopt;
      r.supporters.push_back(static_cast<ModuleId>(*v));
    }
  }
  if (f[4] != "-") {
    const auto v = to_u64(f[4]);
    if (!v) return error = "bad rounds '" + f[4] + "'", std::nullopt;
    r.rounds = *v;
  }
  const auto vc = to_u64(f[5]);
  if (!vc) return error = "bad view_changes '" + f[5] + "'", std::nullopt;
  r.view_changes = *vc;
  if (f[6] != "-") {
    for (const auto& flag : split(f[6], ',')) {
      if (flag == "agreement-violation") {
        r.agreement_violation = true;
      } else if (flag == "safe-mode") {
        r.safe_mode = true;
      } else if (flag == "ground-truth-mismatch") {
        r.ground_truth_mismatch = true;
      } else {
        return error = "unknown flag '" + flag + "'", std::nullopt;
      }
    }
  }
  return r;
}

}  // namespace

bool ParsedDecisionLog::expects_violation() const {
  const auto it = header.find("expects_violation");
  return it != header.end() && it->second == "true";
}

std::optional<std::uint32_t> ParsedDecisionLog::n() const {
  const auto it = header.find("n");
  if (it == header.end()) return std::nullopt;
  const auto v = to_u64(it->second);
  if (!v) return std::nullopt;
  return static_cast<std::uint32_t>(*v);
}

ParsedDecisionLog parse_decision_log(std::string_view text) {
  ParsedDecisionLog log;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      for (const auto& word : split(line, ' ')) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) continue;
        const auto key = word.substr(0, eq);
        const auto value = word.substr(eq + 1);
        if (key == "ground_truth") {
          log.ground_truth = split(value, ',');
        } else {
          log.header[key] = value;
        }
      }
      continue;
    }
    const auto fields = split(line, '|');
    std::string error;
    if (fields.size() == 4 && fields[1] == "SUPERVISOR") {
      const auto round = to_u64(fields[0]);
      const auto module = to_u64(fields[2]);
      const auto kind = parse_event_kind(fields[3]);
      if (round && module && kind) {
        log.events.push_back(SupervisorEvent{*round, static_cast<ModuleId>(*module), *kind});
        continue;
      }
      error = "bad supervisor row";
    } else if (fields.size() == 7) {
      if (auto r = parse_record(fields, error)) {
        log.records.push_back(std::move(*r));
        continue;
      }
    } else {
      error = "expected 7 fields, got " + std::to_string(fields.size());
    }
    log.problems.push_back("line " + std::to_string(line_no) + ": " + error);
  }
  if (log.header.count("scenario") == 0) log.problems.push_back("missing scenario header");
  return log;
}

VerifyResult verify_decision_log(const ParsedDecisionLog& log) {
  VerifyResult v;
  v.violation_expected = log.expects_violation();
  v.inconsistencies = log.problems;
  auto bad = [&](Frame f, const std::string& what) {
    v.inconsistencies.push_back("frame " + std::to_string(f) + ": " + what);
  };
  const auto n = log.n();

  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    if (r.frame != i) bad(r.frame, "out of sequence, expected frame " + std::to_string(i));
    if (r.agreement_violation) v.agreement_violations.push_back(r.frame);
    if (r.safe_mode != (r.verdict == VerdictKind::kSafeMode)) bad(r.frame, "safe-mode flag disagrees with verdict");
    switch (r.verdict) {
      case VerdictKind::kDecided:
        if (!r.value) bad(r.frame, "decided without a value");
        if (!r.rounds) bad(r.frame, "decided without a round count");
        break;
      case VerdictKind::kNoQuorum:
        if (r.value) bad(r.frame, "no_quorum carries a value");
        if (!r.supporters.empty()) bad(r.frame, "no_quorum lists supporters");
        break;
      case VerdictKind::kSafeMode:
        if (!r.value) bad(r.frame, "safe_mode without the safe default");
        break;
    }
    if (!std::is_sorted(r.supporters.begin(), r.supporters.end()) ||
        std::adjacent_find(r.supporters.begin(), r.supporters.end()) != r.supporters.end()) {
      bad(r.frame, "supporters not strictly ascending");
    }
    if (n && !r.supporters.empty() && r.supporters.back() >= *n) bad(r.frame, "supporter out of range");
    if (r.frame < log.ground_truth.size()) {
      const bool mismatch = r.verdict == VerdictKind::kDecided && r.value && *r.value != log.ground_truth[r.frame];
      if (mismatch != r.ground_truth_mismatch) bad(r.frame, "ground-truth-mismatch flag is wrong");
    } else if (!log.ground_truth.empty()) {
      bad(r.frame, "no ground truth for frame");
    }
  }
  if (!log.ground_truth.empty() && log.records.size() != log.ground_truth.size()) {
    v.inconsistencies.push_back("log has " + std::to_string(log.records.size()) + " records for " +
                                std::to_string(log.ground_truth.size()) + " frames");
  }

  // Supervisor rows: rounds never go backwards, and each module walks
  // flagged -> isolated -> recovered.
  std::map<ModuleId, SupervisorEventKind> last;
  Round prev = 0;
  for (const auto& e : log.events) {
    const std::string who = "supervisor row for module " + std::to_string(e.module);
    if (e.round < prev) v.inconsistencies.push_back(who + ": round goes backwards");
    prev = e.round;
    if (n && e.module >= *n) v.inconsistencies.push_back(who + ": module out of range");
    const auto it = last.find(e.module);
    const bool ok = e.kind == SupervisorEventKind::kFlagged
                        ? (it == last.end() || it->second == SupervisorEventKind::kRecovered)
                        : it != last.end() && static_cast<int>(it->second) + 1 == static_cast<int>(e.kind);
    if (!ok) v.inconsistencies.push_back(who + ": " + std::string(event_name(e.kind)) + " out of order");
    last[e.module] = e.kind;
  }
  return v;
}

std::map<std::string, std::uint64_t> summarize_event_log(std::string_view text) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& line : split(text, '\n')) {
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '|');
    if (fields.size() >= 4) ++counts[fields[3]];
  }
  return counts;
}

std::string render_report(const ParsedDecisionLog& log, const std::map<std::string, std::uint64_t>& event_counts) {
  std::ostringstream o;
  auto header = [&](const char* key) {
    const auto it = log.header.find(key);
    return it == log.header.end() ? std::string("?") : it->second;
  };
  o << "scenario " << header("scenario") << "  n=" << header("n") << " f=" << header("f") << " mode=" << header("mode")
    << " strategy=" << header("strategy") << " seed=" << header("seed") << "\n\n";

  o << std::left << std::setw(6) << "frame" << std::setw(10) << "verdict" << std::setw(14) << "value"
    << std::setw(14) << "truth" << std::setw(8) << "rounds" << std::setw(6) << "vc" << "flags\n";
  std::map<std::string, std::uint64_t> verdicts;
  for (const auto& r : log.records) {
    ++verdicts[std::string(verdict_name(r.verdict))];
    const std::string truth = r.frame < log.ground_truth.size() ? log.ground_truth[r.frame] : "-";
    std::string flags;
    if (r.agreement_violation) flags += "agreement-violation ";
    if (r.safe_mode) flags += "safe-mode ";
    if (r.ground_truth_mismatch) flags += "ground-truth-mismatch ";
    o << std::setw(6) << r.frame << std::setw(10) << verdict_name(r.verdict) << std::setw(14) << r.value.value_or("-")
      << std::setw(14) << truth << std::setw(8) << (r.rounds ? std::to_string(*r.rounds) : "-") << std::setw(6)
      << r.view_changes << flags << "\n";
  }
  o << "\nverdicts:";
  for (const auto& [k, c] : verdicts) o << " " << k << "=" << c;
  o << "\n";

  // A module agrees with a frame when it is listed among the supporters of a
  // decided value.
  if (const auto n = log.n()) {
    std::uint64_t decided = 0;
    std::vector<std::uint64_t> agreed(*n, 0);
    for (const auto& r : log.records) {
      if (r.verdict != VerdictKind::kDecided) continue;
      ++decided;
      for (auto m : r.supporters) {
        if (m < *n) ++agreed[m];
      }
    }
    o << "\nmodule agreement (" << decided << " decided frames)\n";
    for (std::uint32_t m = 0; m < *n; ++m) {
      const double rate = decided ? static_cast<double>(agreed[m]) / static_cast<double>(decided) : 0.0;
      o << "  module " << m << "  " << std::fixed << std::setprecision(2) << rate << "  (" << agreed[m] << ")\n";
    }
  }

  if (!log.events.empty()) {
    o << "\nsupervisor\n";
    for (const auto& e : log.events) {
      o << "  round " << e.round << "  module " << e.module << "  " << event_name(e.kind) << "\n";
    }
  }
  if (!event_counts.empty()) {
    o << "\nmessages delivered\n";
    for (const auto& [kind, c] : event_counts) o << "  " << kind << " " << c << "\n";
  }
  return o.str();
}

}  // namespace bftguard
