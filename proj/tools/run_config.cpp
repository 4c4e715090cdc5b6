#include "run_config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lvhba::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  // A metadata.json re-execution input: first non-space character is '{'.
  const std::string trimmed = trim(text);
  if (!trimmed.empty() && trimmed.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
      throw ConfigError(path, 1, std::string("bad json: ") + e.what());
    }
    if (!j.contains("effective_config") || !j["effective_config"].is_object())
      throw ConfigError(path, 1, "metadata json lacks effective_config");
    KeyValues kv;
    kv.name_ = path;
    for (const auto& [key, val] : j["effective_config"].items())
      kv.set(key, val.get<std::string>(), 1);
    return kv;
  }
  KeyValues kv = from_text(text, path);
  return kv;
}

KeyValues KeyValues::from_text(const std::string& text,
                               const std::string& name) {
  KeyValues kv;
  kv.name_ = name;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name, lineno, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(name, lineno, "empty key");
    if (kv.kv_.count(key))
      throw ConfigError(name, lineno, "duplicate key '" + key + "'");
    kv.set(key, value, lineno);
  }
  return kv;
}

void KeyValues::set(const std::string& key, const std::string& value,
                    int line) {
  kv_[key] = {value, line};
}

int KeyValues::line_of(const std::string& key) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? 0 : it->second.second;
}

std::string KeyValues::get_string(const std::string& key,
                                  const std::string& dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  consumed_[key] = true;
  return it->second.first;
}

double KeyValues::get_double(const std::string& key, double dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  consumed_[key] = true;
  char* end = nullptr;
  const double v = std::strtod(it->second.first.c_str(), &end);
  if (end == it->second.first.c_str() || *end != '\0')
    throw ConfigError(name_, it->second.second,
                      "'" + key + "' is not a number");
  return v;
}

long KeyValues::get_long(const std::string& key, long dflt) const {
  const double v = get_double(key, static_cast<double>(dflt));
  if (v != std::floor(v))
    throw ConfigError(name_, line_of(key), "'" + key + "' is not an integer");
  return static_cast<long>(v);
}

bool KeyValues::get_bool(const std::string& key, bool dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  consumed_[key] = true;
  const std::string& v = it->second.first;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(name_, it->second.second, "'" + key + "' is not a bool");
}

std::vector<double> KeyValues::get_list(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return {};
  consumed_[key] = true;
  std::vector<double> out;
  std::istringstream is(it->second.first);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ConfigError(name_, it->second.second,
                        "'" + key + "' has a bad list entry '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

void KeyValues::check_all_consumed() const {
  for (const auto& [key, val] : kv_)
    if (!consumed_.count(key))
      throw ConfigError(name_, val.second, "unknown key '" + key + "'");
}

namespace {

Vec parse_init(const std::string& spec, Index dim, const KeyValues& kv,
               const std::string& key) {
  const std::string t = trim(spec);
  if (t == "zeros") return Vec::Zero(dim);
  const std::size_t star = t.find("*ones");
  if (star != std::string::npos && star + 5 == t.size()) {
    char* end = nullptr;
    const double s = std::strtod(t.c_str(), &end);
    if (end == t.c_str())
      throw ConfigError(kv.name(), kv.line_of(key),
                        "bad init scalar in '" + t + "'");
    return Vec::Constant(dim, s);
  }
  // Explicit comma list.
  std::vector<double> vals;
  std::istringstream is(t);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str())
      throw ConfigError(kv.name(), kv.line_of(key),
                        "bad init entry '" + tok + "'");
    vals.push_back(v);
  }
  if (static_cast<Index>(vals.size()) != dim)
    throw ConfigError(kv.name(), kv.line_of(key),
                      "init length " + std::to_string(vals.size()) +
                          " does not match dimension " + std::to_string(dim));
  Vec v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = vals[i];
  return v;
}

Schedule parse_schedule(const KeyValues& kv, const std::string& base,
                        Schedule dflt) {
  const bool has_flat = kv.has(base);
  const bool has_scale = kv.has(base + ".scale");
  if (has_flat && has_scale)
    throw ConfigError(kv.name(), kv.line_of(base),
                      "'" + base + "' given both as constant and polynomial");
  if (has_flat) return Schedule::constant(kv.get_double(base, 0.0));
  if (has_scale)
    return Schedule::polynomial(kv.get_double(base + ".scale", 0.0),
                                kv.get_double(base + ".exponent", 0.0));
  return dflt;
}

}  // namespace

std::map<std::string, std::string> ConfiguredRun::effective_flat_config()
    const {
  std::map<std::string, std::string> m;
  m["benchmark"] = benchmark_name;
  m["benchmark.n"] = std::to_string(bench_n);
  m["benchmark.seed"] = std::to_string(bench_seed);
  auto put_sched = [&](const std::string& base, const Schedule& s) {
    if (s.kind == Schedule::Kind::Constant) {
      m[base] = fmt17(s.value);
    } else {
      m[base + ".scale"] = fmt17(s.value);
      m[base + ".exponent"] = fmt17(s.exponent);
    }
  };
  m["solver.gamma1"] = fmt17(config.gamma.gamma1);
  m["solver.gamma2"] = fmt17(config.gamma.gamma2);
  m["solver.r"] = fmt17(config.r);
  put_sched("solver.alpha", config.alpha);
  put_sched("solver.beta", config.beta);
  put_sched("solver.eta", config.eta);
  m["solver.c_bar"] = fmt17(config.c_bar);
  m["solver.p_exp"] = fmt17(config.p_exp);
  m["solver.max_iters"] = std::to_string(config.max_iters);
  m["solver.saddle_tol"] = fmt17(config.saddle_oracle_tol);
  m["solver.residual_every"] = std::to_string(config.residual_every);
  m["solver.record_every"] = std::to_string(config.record_every);
  m["solver.record_merit"] = config.record_merit ? "true" : "false";
  m["solver.project_init"] = config.project_init ? "true" : "false";
  if (config.rtol) m["solver.rtol"] = fmt17(*config.rtol);
  if (config.gtol) m["solver.gtol"] = fmt17(*config.gtol);
  std::ostringstream ix, iy;
  for (Index i = 0; i < init_x.size(); ++i)
    ix << (i ? "," : "") << fmt17(init_x[i]);
  for (Index i = 0; i < init_y.size(); ++i)
    iy << (i ? "," : "") << fmt17(init_y[i]);
  m["init.x"] = ix.str();
  m["init.y"] = iy.str();
  m["chart.svg"] = svg ? "true" : "false";
  return m;
}

ConfiguredRun configure(const KeyValues& kv, const CliOverrides& overrides) {
  ConfiguredRun out;

  out.benchmark_name = kv.get_string("benchmark", "");
  if (out.benchmark_name.empty())
    throw ConfigError(kv.name(), 1, "missing 'benchmark' selector");
  out.bench_seed =
      overrides.seed ? *overrides.seed
                     : static_cast<std::uint64_t>(kv.get_long("benchmark.seed", 1));

  if (out.benchmark_name == "merely_convex") {
    out.bench_n = kv.get_long("benchmark.n", 100);
    out.instance = bench::build_merely_convex(out.bench_n);
  } else if (out.benchmark_name == "strongly_convex") {
    out.bench_n = kv.get_long("benchmark.n", 100);
    out.instance = bench::build_strongly_convex(out.bench_n, out.bench_seed);
  } else if (out.benchmark_name == "scalar_testbed") {
    out.bench_n = 1;
    (void)kv.get_long("benchmark.n", 1);
    out.instance = bench::build_scalar_testbed(true);
  } else if (out.benchmark_name == "scalar_testbed_p0") {
    out.bench_n = 1;
    (void)kv.get_long("benchmark.n", 1);
    out.instance = bench::build_scalar_testbed(false);
  } else {
    throw ConfigError(kv.name(), kv.line_of("benchmark"),
                      "unknown benchmark '" + out.benchmark_name +
                          "' (merely_convex, strongly_convex, "
                          "scalar_testbed, scalar_testbed_p0)");
  }

  SolverConfig cfg = out.instance.default_config;
  cfg.gamma.gamma1 = kv.get_double("solver.gamma1", cfg.gamma.gamma1);
  cfg.gamma.gamma2 = kv.get_double("solver.gamma2", cfg.gamma.gamma2);
  cfg.r = kv.get_double("solver.r", cfg.r);
  cfg.alpha = parse_schedule(kv, "solver.alpha", cfg.alpha);
  cfg.beta = parse_schedule(kv, "solver.beta", cfg.beta);
  cfg.eta = parse_schedule(kv, "solver.eta", cfg.eta);
  cfg.c_bar = kv.get_double("solver.c_bar", cfg.c_bar);
  cfg.p_exp = kv.get_double("solver.p_exp", cfg.p_exp);
  cfg.max_iters = kv.get_long("solver.max_iters", cfg.max_iters);
  cfg.saddle_oracle_tol =
      kv.get_double("solver.saddle_tol", cfg.saddle_oracle_tol);
  cfg.residual_every = kv.get_long("solver.residual_every", cfg.residual_every);
  cfg.record_every = kv.get_long("solver.record_every", cfg.record_every);
  cfg.record_merit = kv.get_bool("solver.record_merit", cfg.record_merit);
  cfg.project_init = kv.get_bool("solver.project_init", cfg.project_init);
  if (kv.has("solver.rtol")) cfg.rtol = kv.get_double("solver.rtol", 0.0);
  if (kv.has("solver.gtol")) cfg.gtol = kv.get_double("solver.gtol", 0.0);
  if (overrides.iters) cfg.max_iters = *overrides.iters;

  const std::string init_both = kv.get_string("init", "");
  std::string ix = kv.get_string("init.x", init_both);
  std::string iy = kv.get_string("init.y", init_both);
  out.init_x = ix.empty() ? out.instance.default_init_x
                          : parse_init(ix, out.instance.problem.dim_x, kv,
                                       kv.has("init.x") ? "init.x" : "init");
  out.init_y = iy.empty() ? out.instance.default_init_y
                          : parse_init(iy, out.instance.problem.dim_y, kv,
                                       kv.has("init.y") ? "init.y" : "init");

  out.out_dir = kv.get_string("out.dir", ".");
  out.svg = kv.get_bool("chart.svg", false);
  if (overrides.out_dir) out.out_dir = *overrides.out_dir;
  if (overrides.svg) out.svg = *overrides.svg;

  out.selftest_scale_grad_f = kv.get_double("selftest.scale_grad_f", 1.0);
  out.checkgrad_points = static_cast<int>(kv.get_long("checkgrad.points", 25));
  out.checkgrad_seed =
      static_cast<std::uint64_t>(kv.get_long("checkgrad.seed", 1));

  out.sweep_axis = kv.get_string("sweep.axis", "");
  out.sweep_values = kv.get_list("sweep.values");
  out.sweep_threshold_iters = kv.get_long("sweep.iters", 0);

  kv.check_all_consumed();

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(kv.name(), 0, e.what());
  }
  out.config = cfg;
  return out;
}

}  // namespace lvhba::cli
