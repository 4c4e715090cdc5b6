#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lvhba/bench.hpp"

namespace lvhba::cli {

/// A parse/validation failure with the config line that caused it.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat dotted-key config file ("solver.gamma1 = 1.0", '#' comments). A
/// metadata.json produced by `lvhba run` is accepted too; its
/// effective_config object holds the same flat keys.
class KeyValues {
 public:
  static KeyValues load(const std::string& path);
  static KeyValues from_text(const std::string& text,
                             const std::string& name = "<config>");

  void set(const std::string& key, const std::string& value, int line = 0);
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key, double dflt) const;
  long get_long(const std::string& key, long dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<double> get_list(const std::string& key) const;

  /// Every key must have been consumed by one of the getters; leftovers are
  /// reported as errors anchored to their lines.
  void check_all_consumed() const;

  const std::map<std::string, std::pair<std::string, int>>& raw() const {
    return kv_;
  }
  int line_of(const std::string& key) const;
  const std::string& name() const { return name_; }

 private:
  std::string name_ = "<config>";
  std::map<std::string, std::pair<std::string, int>> kv_;
  mutable std::map<std::string, bool> consumed_;
};

/// A fully resolved run: the benchmark instance, the effective solver config,
/// and the initial point.
struct ConfiguredRun {
  bench::BenchmarkInstance instance;
  SolverConfig config;
  Vec init_x;
  Vec init_y;
  std::string out_dir = ".";
  bool svg = false;
  double selftest_scale_grad_f = 1.0;
  int checkgrad_points = 25;
  std::uint64_t checkgrad_seed = 1;
  std::string sweep_axis;
  std::vector<double> sweep_values;
  long sweep_threshold_iters = 0;  // 0: use config.max_iters

  Index bench_n = 0;
  std::uint64_t bench_seed = 1;
  std::string benchmark_name;

  /// The flat key map that reproduces this run exactly.
  std::map<std::string, std::string> effective_flat_config() const;
};

struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<long> iters;
  std::optional<std::uint64_t> seed;
  std::optional<bool> svg;
};

ConfiguredRun configure(const KeyValues& kv, const CliOverrides& overrides);

}  // namespace lvhba::cli
