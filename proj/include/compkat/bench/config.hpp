#ifndef COMPKAT_BENCH_CONFIG_HPP
#define COMPKAT_BENCH_CONFIG_HPP

#include "compkat/bench/run_spec.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace compkat::bench {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what) {}
};

struct RunBlock {
  std::string id;
  RunSpec spec;                      // seed unused
  std::vector<std::uint64_t> seeds;
};

struct BenchConfig {
  std::string instance_path;
  std::optional<std::string> reference_path;
  std::optional<double> ball_radius;
  unsigned threads = 1;
  std::vector<RunBlock> runs;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    if (v.empty() || v[0] == '-') throw std::invalid_argument("negative");
    const auto out = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ConfigError(line, key + " expects a nonnegative integer, got '" + v + "'");
  }
}

inline double parse_real(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ConfigError(line, key + " expects a number, got '" + v + "'");
  }
}

inline bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(line, key + " expects true or false");
}

}  // namespace detail

/// Line-oriented `key = value` with [instance], optional [bench] and one or
/// more [run] sections; '#' starts a comment. Unknown keys are errors.
/// Relative paths are resolved against `base_dir`.
inline BenchConfig parse_bench_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  BenchConfig cfg;
  std::string section;
  bool saw_instance = false;
  std::string line;
  int lineno = 0;
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return (path.is_relative() && !base_dir.empty() ? base_dir / path : path).string();
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(lineno, "malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section == "instance") {
        if (saw_instance) throw ConfigError(lineno, "duplicate [instance] section");
        saw_instance = true;
      } else if (section == "run") {
        cfg.runs.emplace_back();
      } else if (section != "bench") {
        throw ConfigError(lineno, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(lineno, "key outside of a section");
    try {
      if (section == "instance") {
        if (key == "path") cfg.instance_path = resolve(val);
        else if (key == "reference") cfg.reference_path = resolve(val);
        else if (key == "ball_radius") cfg.ball_radius = detail::parse_real(val, lineno, key);
        else throw ConfigError(lineno, "unknown key '" + key + "' in [instance]");
      } else if (section == "bench") {
        if (key == "threads") {
          const auto t = detail::parse_u64(val, lineno, key);
          if (t == 0) throw ConfigError(lineno, "threads must be positive");
          cfg.threads = static_cast<unsigned>(t);
        } else {
          throw ConfigError(lineno, "unknown key '" + key + "' in [bench]");
        }
      } else {
        RunBlock& run = cfg.runs.back();
        RunSpec& s = run.spec;
        if (key == "id") run.id = val;
        else if (key == "algo") s.algo = parse_algo(val);
        else if (key == "mode") s.mode = parse_mode(val);
        else if (key == "seeds") {
          std::stringstream ss(val);
          std::string item;
          while (std::getline(ss, item, ',')) {
            run.seeds.push_back(detail::parse_u64(detail::trim(item), lineno, key));
          }
        } else if (key == "snapshots") s.snapshots = detail::parse_u64(val, lineno, key);
        else if (key == "stages") s.stages = detail::parse_u64(val, lineno, key);
        else if (key == "eps") s.eps = detail::parse_real(val, lineno, key);
        else if (key == "mu0") s.mu0 = detail::parse_real(val, lineno, key);
        else if (key == "batch_policy") s.batch_policy = parse_batch_policy(val);
        else if (key == "overrides") s.overrides = parse_overrides(val);
        else if (key == "timing") s.timing = detail::parse_bool(val, lineno, key);
        else throw ConfigError(lineno, "unknown key '" + key + "' in [run]");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(lineno, e.what());
    }
  }
  if (!saw_instance || cfg.instance_path.empty()) {
    throw ConfigError(lineno, "missing [instance] path");
  }
  if (cfg.runs.empty()) throw ConfigError(lineno, "no [run] sections");
  for (std::size_t r = 0; r < cfg.runs.size(); ++r) {
    if (cfg.runs[r].id.empty()) throw ConfigError(lineno, "run " + std::to_string(r + 1) + " has no id");
    if (cfg.runs[r].seeds.empty()) {
      throw ConfigError(lineno, "run '" + cfg.runs[r].id + "' has no seeds");
    }
    for (std::size_t q = 0; q < r; ++q) {
      if (cfg.runs[q].id == cfg.runs[r].id) {
        throw ConfigError(lineno, "duplicate run id '" + cfg.runs[r].id + "'");
      }
    }
  }
  return cfg;
}

inline BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_bench_config(in, std::filesystem::path(path).parent_path());
}

}  // namespace compkat::bench

#endif  // COMPKAT_BENCH_CONFIG_HPP
