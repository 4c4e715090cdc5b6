#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "lvhba/trace_io.hpp"
#include "lvhba/validate.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;

namespace lvhba::cli {

namespace {

struct RunArtifacts {
  Trace trace;
  bench::MetricsTracker tracker;
  std::vector<std::pair<double, double>> gap_series;
  std::vector<std::pair<double, double>> residual_series;
  double wall_sec = 0.0;
};

RunArtifacts execute(const ConfiguredRun& rc) {
  RunArtifacts out{Trace{}, bench::MetricsTracker(rc.instance), {}, {}, 0.0};
  const auto tc = rc.instance.constants();
  IterateState init;
  init.x = rc.init_x;
  init.y = rc.init_y;

  RunHooks hooks;
  hooks.on_record = [&](const TraceRecord& rec, const IterateState& s) {
    out.tracker(rec, s);
    if (rec.gap) out.gap_series.emplace_back(double(rec.k), *rec.gap);
    if (rec.residual)
      out.residual_series.emplace_back(double(rec.k), *rec.residual);
    return true;
  };

  const auto t0 = std::chrono::steady_clock::now();
  out.trace = run(rc.instance.problem, rc.instance.set_C, rc.config, tc, init,
                  hooks);
  out.wall_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  out.trace.meta.problem_name = rc.benchmark_name;
  out.trace.meta.seed = rc.bench_seed;
  return out;
}

nlohmann::json metadata_json(const ConfiguredRun& rc, const RunArtifacts& art) {
  nlohmann::json meta;
  meta["benchmark"] = rc.benchmark_name;
  meta["n"] = rc.bench_n;
  meta["seed"] = rc.bench_seed;
  meta["iterations_run"] = art.trace.meta.iterations_run;
  meta["stopped_early"] = art.trace.meta.stopped_early;
  meta["abort_reason"] = art.trace.meta.abort_reason;
  meta["warnings"] = art.trace.meta.warnings;
  meta["wall_sec"] = art.wall_sec;

  nlohmann::json eff;
  for (const auto& [k, v] : rc.effective_flat_config()) eff[k] = v;
  meta["effective_config"] = eff;

  nlohmann::json metrics;
  if (!art.tracker.rel_x_err.empty())
    metrics["final_rel_x_err"] = art.tracker.rel_x_err.back().second;
  if (!art.tracker.ll_err.empty())
    metrics["final_ll_err"] = art.tracker.ll_err.back().second;
  if (!art.tracker.hyper.empty())
    metrics["final_hyper"] = art.tracker.hyper.back().second;
  if (art.tracker.iters_to_threshold)
    metrics["iters_to_rel_1e-2"] = *art.tracker.iters_to_threshold;
  if (!art.trace.records.empty()) {
    metrics["final_F"] = art.trace.records.back().F;
    metrics["final_f"] = art.trace.records.back().f;
    if (art.trace.records.back().gap)
      metrics["final_gap"] = *art.trace.records.back().gap;
    if (art.trace.records.back().residual)
      metrics["final_residual"] = *art.trace.records.back().residual;
  }
  meta["metrics"] = metrics;
  return meta;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int thread_budget(std::size_t cells) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("LVHBA_THREADS")) {
    const long req = std::strtol(env, nullptr, 10);
    if (req >= 1) hw = static_cast<unsigned>(req);
  }
  return static_cast<int>(std::min<std::size_t>(hw, cells));
}

}  // namespace

int cmd_run(const std::string& config_path, const CliOverrides& overrides,
            bool quiet) {
  ConfiguredRun rc;
  try {
    rc = configure(KeyValues::load(config_path), overrides);
    if (!fs::is_directory(rc.out_dir))
      throw ConfigError("output directory '" + rc.out_dir +
                        "' does not exist");
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const RunArtifacts art = execute(rc);
  const fs::path dir(rc.out_dir);
  try {
    write_file(dir / "trace.csv", trace_csv(art.trace));
    write_file(dir / "trace.json", trace_json(art.trace));
    write_file(dir / "metadata.json", metadata_json(rc, art).dump(2) + "\n");
    if (rc.svg) {
      std::vector<SvgSeries> series;
      if (!art.tracker.rel_x_err.empty()) {
        SvgSeries s{"rel_x_err", "#c0392b", {}};
        for (const auto& [k, v] : art.tracker.rel_x_err)
          s.points.emplace_back(double(k), v);
        series.push_back(std::move(s));
      }
      if (!art.gap_series.empty())
        series.push_back({"gap", "#2980b9", art.gap_series});
      if (!art.residual_series.empty())
        series.push_back({"residual", "#27ae60", art.residual_series});
      write_file(dir / "convergence.svg",
                 convergence_svg(rc.benchmark_name, series));
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  if (!quiet) {
    std::cout << rc.benchmark_name << ": " << art.trace.meta.iterations_run
              << " iterations, " << art.wall_sec << " s";
    if (art.tracker.iters_to_threshold)
      std::cout << ", rel_x_err<=1e-2 at k=" << *art.tracker.iters_to_threshold;
    std::cout << "\n";
  }
  if (!art.trace.meta.abort_reason.empty()) {
    std::cerr << "solver abort: " << art.trace.meta.abort_reason << "\n";
    return kExitSolverAbort;
  }
  return kExitOk;
}

int cmd_checkgrad(const std::string& config_path,
                  const CliOverrides& overrides, bool quiet) {
  ConfiguredRun rc;
  try {
    rc = configure(KeyValues::load(config_path), overrides);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  BilevelProblem pb = rc.instance.problem;
  if (rc.selftest_scale_grad_f != 1.0) {
    const auto base = pb.grad_f;
    const double scale = rc.selftest_scale_grad_f;
    pb.grad_f = [base, scale](const Vec& x, const Vec& y) {
      GradPair g = base(x, y);
      g.x *= scale;
      g.y *= scale;
      return g;
    };
  }

  const auto report = validate_problem(pb, 8, rc.checkgrad_seed);
  bool ok = report.all_pass();
  for (const auto& c : report.checks) {
    if (!quiet || !c.pass)
      std::cout << (c.pass ? "pass  " : "FAIL  ") << c.name
                << "  worst=" << c.worst
                << (c.witness.empty() ? "" : "  at " + c.witness) << "\n";
  }

  // Finite-difference check of the value-function gradient.
  const auto tc = derive_constants(pb, rc.config, rc.instance.moduli);
  const Gamma gamma = rc.config.gamma;
  const double r = rc.config.r;
  std::mt19937_64 rng(rc.checkgrad_seed + 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  double max_rel = 0.0;
  SaddleOptions opts;
  opts.tol = 1e-12;
  for (int t = 0; t < rc.checkgrad_points; ++t) {
    Vec x(pb.dim_x), y(pb.dim_y), z(pb.dim_g);
    for (Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
    for (Index i = 0; i < y.size(); ++i) y[i] = normal(rng);
    for (Index i = 0; i < z.size(); ++i) z[i] = std::abs(normal(rng));
    x = project(pb.set_X, x);
    y = project(pb.set_Y, y);
    const auto sp = saddle_oracle(pb, x, y, z, gamma, r, tc, opts);
    const auto an = grad_v(pb, x, y, z, sp, gamma);

    Vec joint(pb.dim_x + pb.dim_y + pb.dim_g), an_joint(joint.size());
    joint << x, y, z;
    an_joint << an.x, an.y, an.z;
    const double h = 1e-6;
    Vec fd(joint.size());
    Vec p = joint;
    for (Index i = 0; i < joint.size(); ++i) {
      const double save = p[i];
      SaddleOptions warm = opts;
      warm.warm_theta = &sp.theta_star;
      warm.warm_lambda = &sp.lambda_star;
      p[i] = save + h;
      const double hi =
          value_v(pb, p.head(pb.dim_x), p.segment(pb.dim_x, pb.dim_y),
                  p.tail(pb.dim_g), gamma, r, tc, warm);
      p[i] = save - h;
      const double lo =
          value_v(pb, p.head(pb.dim_x), p.segment(pb.dim_x, pb.dim_y),
                  p.tail(pb.dim_g), gamma, r, tc, warm);
      p[i] = save;
      fd[i] = (hi - lo) / (2.0 * h);
    }
    max_rel = std::max(max_rel,
                       (an_joint - fd).norm() / std::max(1.0, fd.norm()));
  }
  std::cout << "grad_v max relative error over " << rc.checkgrad_points
            << " points: " << max_rel << "\n";
  if (max_rel > 1e-5) ok = false;
  std::cout << (ok ? "checkgrad: PASS" : "checkgrad: FAIL") << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const std::string& config_path, const CliOverrides& overrides,
              bool quiet) {
  ConfiguredRun base;
  KeyValues kv;
  try {
    kv = KeyValues::load(config_path);
    base = configure(kv, overrides);
    if (base.sweep_axis.empty() || base.sweep_values.empty())
      throw ConfigError("sweep requires sweep.axis and nonempty sweep.values");
    if (base.sweep_axis != "p_exp" && base.sweep_axis != "n" &&
        base.sweep_axis != "seed" && base.sweep_axis != "step_scale")
      throw ConfigError("sweep.axis must be p_exp, n, seed or step_scale");
    if (!fs::is_directory(base.out_dir))
      throw ConfigError("output directory '" + base.out_dir +
                        "' does not exist");
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  struct Cell {
    double value = 0.0;
    bool ok = false;
    std::string error;
    long iters_to_threshold = -1;
    double wall_sec = 0.0;
    double final_rel = std::nan("");
    double final_ll = std::nan("");
    double final_hyper = std::nan("");
  };
  std::vector<Cell> cells(base.sweep_values.size());

  auto run_cell = [&](std::size_t i) {
    Cell& cell = cells[i];
    cell.value = base.sweep_values[i];
    try {
      ConfiguredRun rc = base;
      if (base.sweep_axis == "p_exp") {
        rc.config.p_exp = cell.value;
      } else if (base.sweep_axis == "n") {
        const Index n = static_cast<Index>(cell.value);
        rc.bench_n = n;
        if (rc.benchmark_name == "merely_convex") {
          rc.instance = bench::build_merely_convex(n);
        } else if (rc.benchmark_name == "strongly_convex") {
          rc.instance = bench::build_strongly_convex(n, rc.bench_seed);
        } else {
          throw ConfigError("sweep over n needs a dimensioned benchmark");
        }
        const double sx = rc.init_x.size() ? rc.init_x[0] : 10.0;
        const double sy = rc.init_y.size() ? rc.init_y[0] : 10.0;
        rc.init_x = Vec::Constant(rc.instance.problem.dim_x, sx);
        rc.init_y = Vec::Constant(rc.instance.problem.dim_y, sy);
      } else if (base.sweep_axis == "seed") {
        if (rc.benchmark_name != "strongly_convex")
          throw ConfigError("sweep over seed needs benchmark strongly_convex");
        rc.bench_seed = static_cast<std::uint64_t>(cell.value);
        rc.instance = bench::build_strongly_convex(rc.bench_n, rc.bench_seed);
      } else {  // step_scale
        auto scale = [&](Schedule s) {
          s.value *= cell.value;
          return s;
        };
        rc.config.alpha = scale(rc.config.alpha);
        rc.config.beta = scale(rc.config.beta);
      }
      if (base.sweep_threshold_iters > 0)
        rc.config.max_iters = base.sweep_threshold_iters;
      rc.config.validate();

      const RunArtifacts art = execute(rc);
      if (!art.trace.meta.abort_reason.empty())
        throw std::runtime_error(art.trace.meta.abort_reason);
      cell.wall_sec = art.wall_sec;
      if (art.tracker.iters_to_threshold)
        cell.iters_to_threshold = *art.tracker.iters_to_threshold;
      if (!art.tracker.rel_x_err.empty())
        cell.final_rel = art.tracker.rel_x_err.back().second;
      if (!art.tracker.ll_err.empty())
        cell.final_ll = art.tracker.ll_err.back().second;
      if (!art.tracker.hyper.empty())
        cell.final_hyper = art.tracker.hyper.back().second;
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  };

  const int workers = thread_budget(cells.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < cells.size();
           i = next.fetch_add(1))
        run_cell(i);
    });
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "axis,value,iters_to_rel_1e-2,wall_sec,final_rel_x_err,final_ll_err,"
         "final_hyper,status\n";
  std::size_t ok_cells = 0;
  for (const auto& cell : cells) {
    char buf[64];
    auto num = [&buf](double v) -> std::string {
      if (std::isnan(v)) return "";
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return buf;
    };
    csv << base.sweep_axis << ',' << num(cell.value) << ','
        << (cell.iters_to_threshold >= 0
                ? std::to_string(cell.iters_to_threshold)
                : "")
        << ',' << num(cell.wall_sec) << ',' << num(cell.final_rel) << ','
        << num(cell.final_ll) << ',' << num(cell.final_hyper) << ','
        << (cell.ok ? "ok" : "error:" + cell.error) << '\n';
    if (cell.ok) ++ok_cells;
  }
  try {
    write_file(fs::path(base.out_dir) / "sweep.csv", csv.str());
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (!quiet)
    std::cout << "sweep: " << ok_cells << "/" << cells.size()
              << " cells succeeded -> "
              << (fs::path(base.out_dir) / "sweep.csv").string() << "\n";
  return ok_cells > 0 ? kExitOk : kExitSolverAbort;
}

}  // namespace lvhba::cli
