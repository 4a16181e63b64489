// Copyright 2026 The bftguard Authors.
// SPDX-License-Identifier: Apache-2.0

#include "bftguard/scenario/scenario.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bftguard {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

template <typename T>
std::optional<T> number(const std::string& text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

std::optional<bool> boolean(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  return std::nullopt;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    auto v = number<std::uint64_t>(text);
    if (!v) return std::nullopt;
    return std::pair{*v, *v};
  }
  auto a = number<std::uint64_t>(trim(text.substr(0, dots)));
  auto b = number<std::uint64_t>(trim(text.substr(dots + 2)));
  if (!a || !b || *b < *a) return std::nullopt;
  return std::pair{*a, *b};
}

std::string ids(const std::set<NodeId>& s) {
  std::string out;
  for (NodeId id : s) out += (out.empty() ? "" : " ") + std::to_string(id);
  return out;
}

struct Parser {
  std::string origin;
  std::vector<std::string> errors;
  Scenario s;
  std::optional<std::vector<std::string>> labels;
  std::optional<std::string> safe_default;
  std::optional<std::uint64_t> frames_key;
  bool n_given = false;
  std::map<std::uint32_t, ModuleConfig> modules;
  std::uint64_t next_frame = 0;
  int line_no = 0;

  void error(const std::string& msg) { errors.push_back(origin + ":" + std::to_string(line_no) + ": " + msg); }

  template <typename T>
  void set_number(T& field, const std::string& key, const std::string& value) {
    if (auto v = number<T>(value)) {
      field = *v;
    } else {
      error("'" + key + "' expects a number, got '" + value + "'");
    }
  }

  void set_bool(bool& field, const std::string& key, const std::string& value) {
    if (auto v = boolean(value)) {
      field = *v;
    } else {
      error("'" + key + "' expects true or false, got '" + value + "'");
    }
  }

  void top(const std::string& key, const std::string& value) {
    if (key == "name") {
      s.name = value;
    } else if (key == "f") {
      set_number(s.f, key, value);
    } else if (key == "n") {
      n_given = true;
      set_number(s.n, key, value);
    } else if (key == "n_override") {
      set_bool(s.n_override, key, value);
    } else if (key == "mode") {
      if (value == "pbft") {
        s.mode = ConsensusMode::kPbft;
      } else if (value == "vote-only") {
        s.mode = ConsensusMode::kVoteOnly;
      } else {
        error("mode must be pbft or vote-only, got '" + value + "'");
      }
    } else if (key == "strategy") {
      try {
        s.strategy = parse_strategy(value);
      } catch (const std::invalid_argument& e) {
        error(e.what());
      }
    } else if (key == "frames") {
      std::uint64_t v = 0;
      set_number(v, key, value);
      frames_key = v;
    } else if (key == "seed") {
      set_number(s.seed, key, value);
    } else if (key == "timeout_rounds") {
      set_number(s.timeout_rounds, key, value);
    } else if (key == "execution_threshold") {
      std::uint32_t v = 0;
      set_number(v, key, value);
      s.execution_threshold = v;
    } else if (key == "checkpoint_interval") {
      set_number(s.checkpoint_interval, key, value);
    } else if (key == "equivocation_fast_path") {
      set_bool(s.equivocation_fast_path, key, value);
    } else if (key == "expects_violation") {
      set_bool(s.expects_violation, key, value);
    } else if (key == "retransmit") {
      set_number(s.retransmit_interval, key, value);
    } else {
      error("unknown key '" + key + "'");
    }
  }

  void decision_space(const std::string& key, const std::string& value) {
    if (key == "labels") {
      labels = words(value);
    } else if (key == "safe_default") {
      safe_default = value;
    } else {
      error("unknown decision_space key '" + key + "'");
    }
  }

  void network(const std::string& key, const std::string& value) {
    auto& p = s.network;
    if (key == "base_delay") {
      set_number(p.base_delay, key, value);
    } else if (key == "jitter") {
      set_number(p.jitter, key, value);
    } else if (key == "drop_rate") {
      set_number(p.drop_rate, key, value);
    } else if (key == "max_consecutive_drops") {
      set_number(p.max_consecutive_drops, key, value);
    } else if (key == "seed") {
      set_number(p.seed, key, value);
    } else if (key == "partition") {
      partition(value);
    } else {
      error("unknown network key '" + key + "'");
    }
  }

  void partition(const std::string& value) {
    const auto colon = value.find(':');
    const auto bar = value.find('|');
    if (colon == std::string::npos || bar == std::string::npos || bar < colon) {
      error("partition expects 'a..b : ids | ids', got '" + value + "'");
      return;
    }
    auto r = range(trim(value.substr(0, colon)));
    if (!r) {
      error("bad partition round range in '" + value + "'");
      return;
    }
    Partition part{r->first, r->second, {}, {}};
    auto side = [&](const std::string& text, std::set<NodeId>& out) {
      for (const auto& w : words(text)) {
        if (auto id = number<NodeId>(w)) {
          out.insert(*id);
        } else {
          error("bad module id '" + w + "' in partition");
        }
      }
    };
    side(value.substr(colon + 1, bar - colon - 1), part.side_a);
    side(value.substr(bar + 1), part.side_b);
    s.network.partitions.push_back(std::move(part));
  }

  void supervisor(const std::string& key, const std::string& value) {
    if (key == "enabled") {
      set_bool(s.supervisor_enabled, key, value);
    } else if (key == "window") {
      set_number(s.supervisor.window, key, value);
    } else if (key == "threshold") {
      set_number(s.supervisor.flag_threshold, key, value);
    } else if (key == "restart_delay") {
      set_number(s.supervisor.restart_delay, key, value);
    } else {
      error("unknown supervisor key '" + key + "'");
    }
  }

  void module(ModuleConfig& m, const std::string& key, const std::string& value) {
    if (key == "profile") {
      try {
        m.profile = parse_profile(value);
      } catch (const std::invalid_argument& e) {
        error(e.what());
      }
    } else if (key == "confidence") {
      set_number(m.base_confidence, key, value);
    } else if (key == "adversary_confidence") {
      set_number(m.adversary_confidence, key, value);
    } else if (key == "on_restart") {
      if (value == "same") {
        m.on_restart = RestartPolicy::kSame;
      } else if (value == "honest") {
        m.on_restart = RestartPolicy::kHonest;
      } else {
        error("on_restart must be same or honest, got '" + value + "'");
      }
    } else if (key == "equivocate_split") {
      m.equivocate_split.clear();
      for (const auto& w : words(value)) {
        if (auto id = number<ModuleId>(w)) {
          m.equivocate_split.push_back(*id);
        } else {
          error("bad module id '" + w + "' in equivocate_split");
        }
      }
    } else {
      error("unknown module key '" + key + "'");
    }
  }

  void observation(const std::string& line) {
    const auto cols = split(line, '|');
    if (cols.size() != 4) {
      error("observation rows need 4 columns 'frames | ground_truth | critical | observations'");
      return;
    }
    auto r = range(cols[0]);
    if (!r) {
      error("bad frame range '" + cols[0] + "'");
      return;
    }
    if (r->first != next_frame) {
      error("observation rows must cover frames in order; expected frame " + std::to_string(next_frame) + ", got " +
            cols[0]);
    }
    next_frame = r->second + 1;
    bool critical = false;
    if (cols[2] == "critical") {
      critical = true;
    } else if (cols[2] != "-") {
      error("critical column must be 'critical' or '-', got '" + cols[2] + "'");
    }
    std::vector<std::string> observed;
    for (const auto& w : words(cols[3])) {
      const auto star = w.find('*');
      if (star == std::string::npos) {
        observed.push_back(w);
        continue;
      }
      auto count = number<std::uint32_t>(w.substr(0, star));
      if (!count || star + 1 >= w.size()) {
        error("bad repeated observation '" + w + "'");
        continue;
      }
      observed.insert(observed.end(), *count, w.substr(star + 1));
    }
    for (std::uint64_t f = r->first; f <= r->second; ++f) {
      s.observations.add(ObservationTable::Row{cols[1], critical, observed});
    }
  }

  void run(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::optional<std::uint32_t> module_index;
    while (std::getline(in, raw)) {
      ++line_no;
      const std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          error("unterminated section header");
          continue;
        }
        section = trim(line.substr(1, line.size() - 2));
        module_index.reset();
        if (section.rfind("module", 0) == 0) {
          auto id = number<std::uint32_t>(trim(section.substr(6)));
          if (!id) {
            error("module sections look like [module 3]");
          } else if (modules.count(*id)) {
            error("module " + std::to_string(*id) + " configured twice");
          } else {
            module_index = *id;
            modules[*id];
          }
          section = "module";
        } else if (section != "decision_space" && section != "network" && section != "supervisor" &&
                   section != "observations") {
          error("unknown section [" + section + "]");
        }
        continue;
      }
      if (section == "observations") {
        observation(line);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        error("expected 'key = value'");
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (section.empty()) {
        top(key, value);
      } else if (section == "decision_space") {
        decision_space(key, value);
      } else if (section == "network") {
        network(key, value);
      } else if (section == "supervisor") {
        supervisor(key, value);
      } else if (section == "module") {
        if (module_index) module(modules[*module_index], key, value);
      }
    }
  }

  Scenario finish() {
    line_no = 0;
    auto global = [&](const std::string& msg) { errors.push_back(origin + ": " + msg); };
    if (!n_given) s.n = min_replicas(s.f);
    if (!labels || labels->empty()) {
      global("[decision_space] needs labels");
    } else if (!safe_default) {
      global("[decision_space] needs safe_default");
    } else {
      try {
        s.space = std::make_shared<const DecisionSpace>(*labels, *safe_default);
      } catch (const std::invalid_argument& e) {
        global(e.what());
      }
    }
    s.modules.assign(s.n, ModuleConfig{});
    for (const auto& [id, cfg] : modules) {
      if (id >= s.n) {
        global("module " + std::to_string(id) + " configured but n = " + std::to_string(s.n));
      } else {
        s.modules[id] = cfg;
      }
    }
    if (frames_key && *frames_key != s.observations.frames()) {
      global("frames = " + std::to_string(*frames_key) + " but observations cover " +
             std::to_string(s.observations.frames()) + " frames");
    }
    for (auto& p : validate_scenario(s)) global(p);
    if (!errors.empty()) throw ScenarioError(errors);
    return std::move(s);
  }
};

}  // namespace

std::string_view mode_name(ConsensusMode mode) noexcept {
  return mode == ConsensusMode::kPbft ? "pbft" : "vote-only";
}

std::uint32_t Scenario::faulty_count() const noexcept {
  std::uint32_t c = 0;
  for (const auto& m : modules) c += counts_against_f(m.profile) ? 1 : 0;
  return c;
}

bool operator==(const Scenario& a, const Scenario& b) {
  const bool spaces = (!a.space && !b.space) || (a.space && b.space && *a.space == *b.space);
  return spaces && a.name == b.name && a.n == b.n && a.f == b.f && a.n_override == b.n_override &&
         a.modules == b.modules && a.observations == b.observations && a.strategy == b.strategy &&
         a.mode == b.mode && a.network == b.network && a.retransmit_interval == b.retransmit_interval &&
         a.timeout_rounds == b.timeout_rounds && a.execution_threshold == b.execution_threshold &&
         a.checkpoint_interval == b.checkpoint_interval && a.equivocation_fast_path == b.equivocation_fast_path &&
         a.supervisor_enabled == b.supervisor_enabled && a.supervisor == b.supervisor && a.seed == b.seed &&
         a.expects_violation == b.expects_violation;
}

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid scenario:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out;
  if (s.name.empty()) out.push_back("scenario needs a name");
  if (s.n == 0) out.push_back("n must be positive");
  if (s.n < min_replicas(s.f)) {
    out.push_back("n < 3f+1: " + std::to_string(s.n) + " modules cannot tolerate f=" + std::to_string(s.f));
  } else if (s.mode == ConsensusMode::kPbft && s.n != min_replicas(s.f) && !s.n_override) {
    out.push_back("pbft expects n = 3f+1 = " + std::to_string(min_replicas(s.f)) + ", got n = " +
                  std::to_string(s.n) + " (set n_override = true for a larger ensemble)");
  }
  if (s.modules.size() != s.n) {
    out.push_back(std::to_string(s.modules.size()) + " modules configured for n = " + std::to_string(s.n));
  }
  if (s.timeout_rounds == 0) out.push_back("timeout_rounds must be positive");
  if (s.checkpoint_interval == 0) out.push_back("checkpoint_interval must be positive");
  if (s.execution_threshold) {
    const auto t = *s.execution_threshold;
    if (t < quorum_size(s.f) || t > s.n) {
      out.push_back("execution_threshold must lie in [2f+1, n] = [" + std::to_string(quorum_size(s.f)) + ", " +
                    std::to_string(s.n) + "], got " + std::to_string(t));
    }
  }
  try {
    validate_strategy(s.strategy, s.n);
  } catch (const std::invalid_argument& e) {
    out.push_back(e.what());
  }
  try {
    s.network.validate();
  } catch (const std::invalid_argument& e) {
    out.push_back(std::string("network: ") + e.what());
  }
  try {
    s.supervisor.validate();
  } catch (const std::invalid_argument& e) {
    out.push_back(std::string("supervisor: ") + e.what());
  }
  for (std::size_t i = 0; i < s.modules.size(); ++i) {
    const auto& m = s.modules[i];
    const std::string where = "module " + std::to_string(i) + ": ";
    if (s.space) {
      try {
        validate_profile(m.profile, *s.space);
      } catch (const std::invalid_argument& e) {
        out.push_back(where + e.what());
      }
    }
    for (double c : {m.base_confidence, m.adversary_confidence}) {
      if (!(c >= 0.0 && c <= 1.0)) out.push_back(where + "confidence must lie in [0, 1]");
    }
    for (ModuleId id : m.equivocate_split) {
      if (id >= s.n || id == i) out.push_back(where + "equivocate_split names invalid module " + std::to_string(id));
    }
  }
  if (s.space) {
    for (auto& p : s.observations.problems(*s.space, s.n)) out.push_back(std::move(p));
  }
  const auto faulty = s.faulty_count();
  if (faulty > s.f && !s.expects_violation) {
    out.push_back(std::to_string(faulty) + " faulty modules exceed f = " + std::to_string(s.f) +
                  "; set expects_violation = true to run outside the fault model");
  }
  return out;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  Parser p;
  p.origin = origin;
  p.run(text);
  return p.finish();
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({path.string() + ": cannot open"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.string());
}

std::string to_text(const Scenario& s) {
  std::ostringstream o;
  o << "name = " << s.name << "\n";
  o << "f = " << s.f << "\n";
  o << "n = " << s.n << "\n";
  o << "n_override = " << (s.n_override ? "true" : "false") << "\n";
  o << "mode = " << mode_name(s.mode) << "\n";
  o << "strategy = " << to_string(s.strategy) << "\n";
  o << "frames = " << s.frames() << "\n";
  o << "seed = " << s.seed << "\n";
  o << "timeout_rounds = " << s.timeout_rounds << "\n";
  if (s.execution_threshold) o << "execution_threshold = " << *s.execution_threshold << "\n";
  o << "checkpoint_interval = " << s.checkpoint_interval << "\n";
  o << "equivocation_fast_path = " << (s.equivocation_fast_path ? "true" : "false") << "\n";
  o << "retransmit = " << s.retransmit_interval << "\n";
  o << "expects_violation = " << (s.expects_violation ? "true" : "false") << "\n";

  if (s.space) {
    o << "\n[decision_space]\nlabels =";
    for (const auto& l : s.space->labels()) o << " " << l;
    o << "\nsafe_default = " << s.space->safe_default().label() << "\n";
  }

  const auto& p = s.network;
  o << "\n[network]\n";
  o << "base_delay = " << p.base_delay << "\njitter = " << p.jitter << "\ndrop_rate = " << fmt(p.drop_rate)
    << "\nmax_consecutive_drops = " << p.max_consecutive_drops << "\nseed = " << p.seed << "\n";
  for (const auto& part : p.partitions) {
    o << "partition = " << part.from_round << ".." << part.to_round << " : " << ids(part.side_a) << " | "
      << ids(part.side_b) << "\n";
  }

  o << "\n[supervisor]\nenabled = " << (s.supervisor_enabled ? "true" : "false") << "\nwindow = " << s.supervisor.window
    << "\nthreshold = " << fmt(s.supervisor.flag_threshold) << "\nrestart_delay = " << s.supervisor.restart_delay
    << "\n";

  const ModuleConfig defaults;
  for (std::size_t i = 0; i < s.modules.size(); ++i) {
    const auto& m = s.modules[i];
    if (m == defaults) continue;
    o << "\n[module " << i << "]\nprofile = " << to_string(m.profile) << "\nconfidence = " << fmt(m.base_confidence)
      << "\nadversary_confidence = " << fmt(m.adversary_confidence)
      << "\non_restart = " << (m.on_restart == RestartPolicy::kHonest ? "honest" : "same") << "\n";
    if (!m.equivocate_split.empty()) {
      o << "equivocate_split =";
      for (ModuleId id : m.equivocate_split) o << " " << id;
      o << "\n";
    }
  }

  o << "\n[observations]\n";
  const auto& rows = s.observations.rows();
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    while (j + 1 < rows.size() && rows[j + 1] == rows[i]) ++j;
    o << i;
    if (j != i) o << ".." << j;
    o << " | " << rows[i].ground_truth << " | " << (rows[i].critical ? "critical" : "-") << " |";
    for (const auto& l : rows[i].observed) o << " " << l;
    o << "\n";
    i = j + 1;
  }
  return o.str();
}

}  // namespace bftguard
