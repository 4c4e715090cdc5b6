#include "lvhba/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lvhba {

namespace {

constexpr char kHeader[] = "k,c_k,F,f,gap,residual,merit,dxy,dz,dtl,sec";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

std::optional<double> parse_opt(const std::string& field, int line) {
  if (field.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0')
    throw std::invalid_argument("trace csv line " + std::to_string(line) +
                                ": bad number '" + field + "'");
  return v;
}

double parse_num(const std::string& field, int line) {
  const auto v = parse_opt(field, line);
  if (!v)
    throw std::invalid_argument("trace csv line " + std::to_string(line) +
                                ": missing required field");
  return *v;
}

}  // namespace

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << kHeader << '\n';
  for (const auto& r : trace.records) {
    os << r.k << ',' << fmt(r.c_k) << ',' << fmt(r.F) << ',' << fmt(r.f) << ','
       << fmt_opt(r.gap) << ',' << fmt_opt(r.residual) << ','
       << fmt_opt(r.merit) << ',' << fmt(r.dxy) << ',' << fmt(r.dz) << ','
       << fmt(r.dtl) << ',' << fmt(r.sec) << '\n';
  }
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

Trace parse_trace_csv(std::istream& is) {
  Trace trace;
  std::string line;
  if (!std::getline(is, line) || line != kHeader)
    throw std::invalid_argument("trace csv: missing or unexpected header");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    fields.push_back(cur);
    if (fields.size() != 11)
      throw std::invalid_argument("trace csv line " + std::to_string(lineno) +
                                  ": expected 11 fields, got " +
                                  std::to_string(fields.size()));
    TraceRecord r;
    r.k = static_cast<long>(parse_num(fields[0], lineno));
    r.c_k = parse_num(fields[1], lineno);
    r.F = parse_num(fields[2], lineno);
    r.f = parse_num(fields[3], lineno);
    r.gap = parse_opt(fields[4], lineno);
    r.residual = parse_opt(fields[5], lineno);
    r.merit = parse_opt(fields[6], lineno);
    r.dxy = parse_num(fields[7], lineno);
    r.dz = parse_num(fields[8], lineno);
    r.dtl = parse_num(fields[9], lineno);
    r.sec = parse_num(fields[10], lineno);
    trace.records.push_back(r);
  }
  return trace;
}

Trace parse_trace_csv(const std::string& text) {
  std::istringstream is(text);
  return parse_trace_csv(is);
}

namespace {

nlohmann::json schedule_json(const Schedule& s) {
  if (s.kind == Schedule::Kind::Constant)
    return {{"kind", "constant"}, {"value", s.value}};
  return {{"kind", "polynomial"}, {"scale", s.value}, {"exponent", s.exponent}};
}

}  // namespace

std::string trace_json(const Trace& trace, int indent) {
  nlohmann::json j;
  j["records"] = nlohmann::json::array();
  for (const auto& r : trace.records) {
    nlohmann::json rec = {
        {"k", r.k},   {"c_k", r.c_k}, {"F", r.F},     {"f", r.f},
        {"dxy", r.dxy}, {"dz", r.dz},  {"dtl", r.dtl}, {"sec", r.sec},
    };
    if (r.gap) rec["gap"] = *r.gap;
    if (r.residual) rec["residual"] = *r.residual;
    if (r.merit) rec["merit"] = *r.merit;
    j["records"].push_back(std::move(rec));
  }
  const auto& m = trace.meta;
  const auto& c = m.config;
  j["metadata"] = {
      {"problem", m.problem_name},
      {"seed", m.seed},
      {"iterations_run", m.iterations_run},
      {"stopped_early", m.stopped_early},
      {"abort_reason", m.abort_reason},
      {"warnings", m.warnings},
      {"config",
       {
           {"gamma1", c.gamma.gamma1},
           {"gamma2", c.gamma.gamma2},
           {"r", c.r},
           {"alpha", schedule_json(c.alpha)},
           {"beta", schedule_json(c.beta)},
           {"eta", schedule_json(c.eta)},
           {"c_bar", c.c_bar},
           {"p_exp", c.p_exp},
           {"max_iters", c.max_iters},
           {"saddle_oracle_tol", c.saddle_oracle_tol},
           {"residual_every", c.residual_every},
           {"record_every", c.record_every},
           {"record_merit", c.record_merit},
           {"project_init", c.project_init},
       }},
  };
  if (c.rtol) j["metadata"]["config"]["rtol"] = *c.rtol;
  if (c.gtol) j["metadata"]["config"]["gtol"] = *c.gtol;
  return j.dump(indent);
}

}  // namespace lvhba
