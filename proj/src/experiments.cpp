#include "qot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qot/closed_form.hpp"
#include "qot/csv.hpp"
#include "qot/linearized.hpp"
#include "qot/primal.hpp"
#include "qot/sinkhorn.hpp"

namespace fs = std::filesystem;

namespace qot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_double(const std::string& s, const std::string& what) {
  try {
    size_t idx = 0;
    const double v = std::stod(s, &idx);
    if (trim(s.substr(idx)).empty()) return v;
  } catch (...) {
  }
  throw std::runtime_error("config: bad number for " + what + ": '" + s + "'");
}

long to_long(const std::string& s, const std::string& what) {
  try {
    size_t idx = 0;
    const long v = std::stol(s, &idx);
    if (trim(s.substr(idx)).empty()) return v;
  } catch (...) {
  }
  throw std::runtime_error("config: bad integer for " + what + ": '" + s + "'");
}

bool to_bool(const std::string& s, const std::string& what) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw std::runtime_error("config: bad flag for " + what + ": '" + s + "'");
}

std::vector<double> to_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(to_double(trim(cell), what));
  if (out.empty()) throw std::runtime_error("config: empty list for " + what);
  return out;
}

// Short %g formatting for file names and labels.
std::string fmt_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

Density1d make_density_1d(const MarginalSpec& spec, double grid_h) {
  if (spec.kind == "uniform") return uniform_density(spec.params[0], spec.params[1]);
  if (spec.kind == "beta") return beta_density(spec.params[0], spec.params[1], grid_h);
  if (spec.kind == "truncnormal")
    return truncated_normal_density(spec.params[0], spec.params[1],
                                    spec.params[2], spec.params[3]);
  throw std::runtime_error("config: generator '" + spec.kind + "' is not 1-d");
}

DiscreteMeasure build_marginal(const MarginalSpec& spec,
                               const ExperimentConfig& cfg) {
  if (spec.kind == "csv") return load_measure_csv(spec.path);
  if (spec.kind == "uniform2d") {
    const auto dens = uniform_density_2d(spec.params[0], spec.params[1],
                                         spec.params[2], spec.params[3]);
    return product_grid_2d(cfg.grid_ax, cfg.grid_bx, cfg.grid_ay, cfg.grid_by,
                           cfg.grid_h, dens);
  }
  return trapezoid_grid(cfg.grid_a, cfg.grid_b, cfg.grid_h,
                        make_density_1d(spec, cfg.grid_h));
}

struct RunOutcome {
  bool converged = false;
  SweepRow row;
  SolveTrace trace;
  DualPair potentials;
};

// Runs one ratio and classifies it. A run that stops at the iteration cap
// is judged by its tail slope: still contracting counts as converging for
// bracketing purposes; the recorded status stays max_iters either way.
RunOutcome classify_run(const Instance& inst, double eps, double ratio,
                        double tol, long max_iters,
                        const std::optional<DualPair>& init, double init_value,
                        bool probe) {
  GdConfig gc;
  gc.epsilon = eps;
  gc.eta = ratio * eps;
  gc.tol = tol;
  gc.max_iters = max_iters;
  gc.quiet = true;
  gc.init = init ? init : std::optional<DualPair>(
                              constant_dual(inst.p, inst.q, init_value));
  SolveResult sr = solve(inst.p, inst.q, inst.cost, gc);

  RunOutcome out;
  out.row.ratio = ratio;
  out.row.status = to_string(sr.trace.status);
  out.row.iterations = sr.trace.rows.empty() ? 0 : sr.trace.rows.back().n;
  out.row.delta_star_hat = kNaN;
  out.row.r_squared = kNaN;
  out.row.op_norm = kNaN;
  out.row.probe = probe;
  if (sr.trace.rows.size() >= 3) {
    const RateEstimate est = estimate_rate(sr.trace);
    out.row.delta_star_hat = est.delta_star_hat;
    out.row.r_squared = est.r_squared;
  }
  switch (sr.trace.status) {
    case SolveStatus::converged: out.converged = true; break;
    case SolveStatus::diverged: out.converged = false; break;
    case SolveStatus::max_iters:
      // A broken step size ends in a bounded oscillation whose tail slope
      // is zero up to rounding, so demand a clearly contracting tail.
      out.converged = std::isfinite(out.row.delta_star_hat) &&
                      out.row.delta_star_hat < 1.0 - 1e-6;
      break;
  }
  out.trace = std::move(sr.trace);
  out.potentials = std::move(sr.dual);
  return out;
}

DualPair perturbed(const DualPair& base, const Instance& inst) {
  std::mt19937 rng(9001);
  std::uniform_real_distribution<double> unif(-1e-3, 1e-3);
  DualPair d = base;
  for (Eigen::Index i = 0; i < d.f.size(); ++i) d.f[i] += unif(rng);
  for (Eigen::Index j = 0; j < d.g.size(); ++j) d.g[j] += unif(rng);
  return project_balanced(d, inst.p, inst.q);
}

SpectrumRow spectrum_row(const Instance& inst, const DualPair& star,
                         double eps, double ratio) {
  const OperatorMatrix op = assemble_L(star, inst.p, inst.q, inst.cost, eps,
                                       ratio * eps);
  const ActiveSets sets = active_sets(star, inst.cost, inst.p, inst.q);
  const Spectrum sp = operator_norm(op);
  return {ratio, sp.op_norm, sp.alpha_minus, sp.alpha_plus,
          self_adjoint_defect(op), sets.tie_count};
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + path);
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

void write_sweep_csv(const SweepOutcome& out, const std::string& path) {
  csv::Writer w(path);
  w.header({"eta_over_eps", "status", "iterations", "delta_star_hat",
            "r_squared", "op_norm", "probe"});
  for (const auto& r : out.rows) {
    w.row({csv::fmt(r.ratio), r.status, std::to_string(r.iterations),
           csv::fmt(r.delta_star_hat), csv::fmt(r.r_squared),
           csv::fmt(r.op_norm), r.probe ? "1" : "0"});
  }
  w.close();
}

void write_spectrum_csv(const std::vector<SpectrumRow>& rows,
                        const std::string& path) {
  csv::Writer w(path);
  w.header({"eta_over_eps", "op_norm", "alpha_minus", "alpha_plus",
            "selfadjoint_defect", "tie_count"});
  for (const auto& r : rows) {
    w.row({csv::fmt(r.ratio), csv::fmt(r.op_norm), csv::fmt(r.alpha_minus),
           csv::fmt(r.alpha_plus), csv::fmt(r.selfadjoint_defect),
           std::to_string(r.tie_count)});
  }
  w.close();
}

}  // namespace

MarginalSpec parse_marginal(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::runtime_error("config: bad marginal spec '" + text + "'");
  MarginalSpec spec;
  spec.kind = trim(text.substr(0, open));
  const std::string args = text.substr(open + 1, close - open - 1);
  if (spec.kind == "csv") {
    spec.path = trim(args);
    if (spec.path.empty()) throw std::runtime_error("config: csv() needs a path");
    return spec;
  }
  const std::map<std::string, size_t> arity = {{"uniform", 2},
                                               {"beta", 2},
                                               {"truncnormal", 4},
                                               {"uniform2d", 4},
                                               {"constant", 1}};
  const auto it = arity.find(spec.kind);
  if (it == arity.end())
    throw std::runtime_error("config: unknown generator '" + spec.kind + "'");
  spec.params = to_double_list(args, spec.kind);
  if (spec.params.size() != it->second)
    throw std::runtime_error("config: " + spec.kind + " expects " +
                             std::to_string(it->second) + " parameters");
  return spec;
}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  long keys = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    ++keys;

    if (key == "name") cfg.name = val;
    else if (key == "mode") cfg.mode = val;
    else if (key == "p") cfg.p = parse_marginal(val);
    else if (key == "q") cfg.q = parse_marginal(val);
    else if (key == "grid_a") cfg.grid_a = to_double(val, key);
    else if (key == "grid_b") cfg.grid_b = to_double(val, key);
    else if (key == "grid_h") cfg.grid_h = to_double(val, key);
    else if (key == "grid_ax") cfg.grid_ax = to_double(val, key);
    else if (key == "grid_bx") cfg.grid_bx = to_double(val, key);
    else if (key == "grid_ay") cfg.grid_ay = to_double(val, key);
    else if (key == "grid_by") cfg.grid_by = to_double(val, key);
    else if (key == "epsilon") cfg.epsilons = to_double_list(val, key);
    else if (key == "eta_over_eps") cfg.ratios = to_double_list(val, key);
    else if (key == "init") {
      const MarginalSpec s = parse_marginal(val);
      if (s.kind != "constant")
        throw std::runtime_error("config: init supports constant(value) only");
      cfg.init_value = s.params[0];
    }
    else if (key == "tol") cfg.tol = to_double(val, key);
    else if (key == "max_iters") cfg.max_iters = to_long(val, key);
    else if (key == "probe_max_iters") cfg.probe_max_iters = to_long(val, key);
    else if (key == "out") cfg.out = val;
    else if (key == "threads") cfg.threads = static_cast<int>(to_long(val, key));
    else if (key == "spectrum") cfg.spectrum = to_bool(val, key);
    else if (key == "break_search") cfg.break_search = to_bool(val, key);
    else if (key == "break_resolution") cfg.break_resolution = to_double(val, key);
    else if (key == "emit_timing") cfg.emit_timing = to_bool(val, key);
    else if (key == "coupling_threshold") cfg.coupling_threshold = to_double(val, key);
    else
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
  }
  if (keys == 0) throw std::runtime_error(origin + ": empty config");
  for (double e : cfg.epsilons)
    if (!(e > 0.0)) throw std::runtime_error("config: epsilon values must be > 0");
  for (double r : cfg.ratios)
    if (!(r > 0.0)) throw std::runtime_error("config: eta_over_eps values must be > 0");
  if (!(cfg.tol > 0.0)) throw std::runtime_error("config: tol must be > 0");
  if (cfg.max_iters < 1 || cfg.probe_max_iters < 1)
    throw std::runtime_error("config: iteration caps must be >= 1");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

Instance build_instance(const ExperimentConfig& cfg) {
  DiscreteMeasure p = build_marginal(cfg.p, cfg);
  DiscreteMeasure q = build_marginal(cfg.q, cfg);
  CostMatrix cost = cost_matrix(p, q);
  return {std::move(p), std::move(q), std::move(cost)};
}

FrontEndResult solve_front_end(const Instance& inst, double eps, double eta,
                               double tol, long max_iters,
                               const std::optional<DualPair>& init,
                               double init_value) {
  const auto check = full_support_check(inst.p, inst.q, eps);
  if (check.full_support) {
    FrontEndResult fr;
    fr.path = "closed_form";
    fr.potentials = full_support_potentials(inst.p, inst.q, eps);
    fr.status = SolveStatus::converged;
    return fr;
  }
  GdConfig gc;
  gc.epsilon = eps;
  gc.eta = eta;
  gc.tol = tol;
  gc.max_iters = max_iters;
  gc.quiet = true;
  gc.init = init ? init : std::optional<DualPair>(
                              constant_dual(inst.p, inst.q, init_value));
  SolveResult sr = solve(inst.p, inst.q, inst.cost, gc);
  FrontEndResult fr;
  fr.path = "gd";
  fr.potentials = std::move(sr.dual);
  fr.status = sr.trace.status;
  fr.trace = std::move(sr.trace);
  return fr;
}

SweepOutcome sweep_eta(const Instance& inst, const ExperimentConfig& cfg) {
  const double eps = cfg.epsilons.front();
  std::vector<double> grid = cfg.ratios;
  std::sort(grid.begin(), grid.end());

  SweepOutcome out;
  out.break_point = kNaN;
  const auto check = full_support_check(inst.p, inst.q, eps);

  if (check.full_support) {
    // Explicit-potential regime: nothing to iterate, every ratio
    // short-circuits.
    const DualPair star = full_support_potentials(inst.p, inst.q, eps);
    out.reference_potentials = star;
    for (double r : grid) {
      SweepRow row;
      row.ratio = r;
      row.status = "closed_form";
      row.delta_star_hat = kNaN;
      row.r_squared = kNaN;
      row.op_norm = kNaN;
      if (cfg.spectrum) {
        const SpectrumRow sp = spectrum_row(inst, star, eps, r);
        row.op_norm = sp.op_norm;
        out.spectrum.push_back(sp);
      }
      out.rows.push_back(row);
    }
    return out;
  }

  double best_converged_ratio = -1.0;
  for (double r : grid) {
    RunOutcome run = classify_run(inst, eps, r, cfg.tol, cfg.max_iters,
                                  std::nullopt, cfg.init_value, false);
    if (run.row.status == "converged") {
      if (cfg.spectrum) {
        const SpectrumRow sp = spectrum_row(inst, run.potentials, eps, r);
        run.row.op_norm = sp.op_norm;
        out.spectrum.push_back(sp);
      }
      if (r > best_converged_ratio) {
        best_converged_ratio = r;
        out.reference_potentials = run.potentials;
      }
    }
    out.traces.emplace_back(r, std::move(run.trace));
    out.rows.push_back(run.row);
  }

  if (!cfg.break_search) return out;

  // Bracket the break point: the smallest non-converged ratio and the
  // largest converged one below it.
  double lo = kNaN, hi = kNaN;
  for (const auto& row : out.rows) {
    if (row.status != "converged") {
      hi = row.ratio;
      break;
    }
    lo = row.ratio;
  }

  const std::optional<DualPair> probe_init =
      out.reference_potentials
          ? std::optional<DualPair>(perturbed(*out.reference_potentials, inst))
          : std::nullopt;

  const auto probe = [&](double r) {
    RunOutcome run = classify_run(inst, eps, r, cfg.tol, cfg.probe_max_iters,
                                  probe_init, cfg.init_value, true);
    out.rows.push_back(run.row);
    return run.converged;
  };

  if (std::isnan(hi)) {
    // Whole grid converged: scan upward until something breaks.
    const double start = grid.back();
    for (double r = start + 0.1; r <= start + 2.0 + 1e-12; r += 0.1) {
      if (probe(r)) {
        lo = r;
      } else {
        hi = r;
        break;
      }
    }
    if (std::isnan(hi)) {
      std::sort(out.rows.begin(), out.rows.end(),
                [](const SweepRow& a, const SweepRow& b) { return a.ratio < b.ratio; });
      return out;  // no break found within the scan range
    }
  }

  if (!std::isnan(lo)) {
    while (hi - lo > cfg.break_resolution) {
      const double mid = 0.5 * (lo + hi);
      if (probe(mid))
        lo = mid;
      else
        hi = mid;
    }
  }
  out.break_found = true;
  out.break_point = hi;

  std::sort(out.rows.begin(), out.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.ratio < b.ratio; });
  return out;
}

std::vector<ScheduleStage> eps_schedule(const Instance& inst,
                                        const ExperimentConfig& cfg) {
  const std::vector<double>& ladder = cfg.epsilons;
  for (size_t k = 1; k < ladder.size(); ++k)
    if (!(ladder[k] < ladder[k - 1]))
      throw std::invalid_argument("eps_schedule: ladder must be strictly decreasing");
  const double ratio = cfg.ratios.front();

  std::vector<ScheduleStage> stages;
  std::optional<DualPair> warm;
  for (double eps : ladder) {
    FrontEndResult fr = solve_front_end(inst, eps, ratio * eps, cfg.tol,
                                        cfg.max_iters, warm, cfg.init_value);
    ScheduleStage st;
    st.epsilon = eps;
    st.path = fr.path;
    st.status = to_string(fr.status);
    st.iterations = fr.trace.rows.empty() ? 0 : fr.trace.rows.back().n;
    if (fr.trace.rows.size() >= 3) st.rate = estimate_rate(fr.trace);
    st.potentials = fr.potentials;
    st.trace = std::move(fr.trace);
    const Coupling coup =
        coupling_density(st.potentials, inst.p, inst.q, inst.cost, eps);
    st.support_frac = support_fraction(coup, inst.p, inst.q);
    const bool ok = fr.status == SolveStatus::converged;
    warm = st.potentials;
    stages.push_back(std::move(st));
    if (!ok) break;  // abort the ladder, keep partial results
  }
  return stages;
}

namespace {

int run_solve_mode(const Instance& inst, const ExperimentConfig& cfg) {
  const double eps = cfg.epsilons.front();
  const double eta = cfg.ratios.front() * eps;
  const FrontEndResult fr = solve_front_end(inst, eps, eta, cfg.tol,
                                            cfg.max_iters, std::nullopt,
                                            cfg.init_value);
  fr.trace.save_csv(join_path(cfg.out, "trace.csv"), cfg.emit_timing);
  save_dual_csv(fr.potentials, join_path(cfg.out, "potentials_f.csv"),
                join_path(cfg.out, "potentials_g.csv"));

  const auto check = full_support_check(inst.p, inst.q, eps);
  csv::KeyValueWriter kv(join_path(cfg.out, "summary.txt"));
  kv.set("name", cfg.name);
  kv.set("mode", std::string("solve"));
  kv.set("n", static_cast<long>(inst.p.size()));
  kv.set("m", static_cast<long>(inst.q.size()));
  kv.set("epsilon", eps);
  kv.set("eta", eta);
  kv.set("path", fr.path);
  kv.set("status", to_string(fr.status));
  kv.set("iterations",
         static_cast<long>(fr.trace.rows.empty() ? 0 : fr.trace.rows.back().n));
  kv.set("full_support_margin", check.margin);
  kv.set("gamma", dual_objective(fr.potentials, inst.p, inst.q, inst.cost, eps));
  kv.set("residual",
         schrodinger_residual(fr.potentials, inst.p, inst.q, inst.cost, eps));
  kv.write();

  if (fr.status != SolveStatus::converged) {
    std::cerr << "run failed: solve status " << to_string(fr.status) << "\n";
    return 1;
  }
  return 0;
}

int run_sweep_mode(const Instance& inst, const ExperimentConfig& cfg) {
  const SweepOutcome out = sweep_eta(inst, cfg);
  write_sweep_csv(out, join_path(cfg.out, "sweep.csv"));
  if (cfg.spectrum)
    write_spectrum_csv(out.spectrum, join_path(cfg.out, "spectrum.csv"));
  for (const auto& [ratio, trace] : out.traces)
    trace.save_csv(join_path(cfg.out, "trace_r" + fmt_short(ratio) + ".csv"),
                   cfg.emit_timing);

  csv::KeyValueWriter kv(join_path(cfg.out, "summary.txt"));
  kv.set("name", cfg.name);
  kv.set("mode", std::string("sweep"));
  kv.set("n", static_cast<long>(inst.p.size()));
  kv.set("m", static_cast<long>(inst.q.size()));
  kv.set("epsilon", cfg.epsilons.front());
  kv.set("runs", static_cast<long>(out.rows.size()));
  kv.set("break_found", std::string(out.break_found ? "yes" : "no"));
  kv.set("break_point", out.break_point);
  kv.write();
  return 0;  // sweep statuses are data, not failures
}

int run_schedule_mode(const Instance& inst, const ExperimentConfig& cfg) {
  const auto stages = eps_schedule(inst, cfg);
  {
    csv::Writer w(join_path(cfg.out, "schedule.csv"));
    w.header({"epsilon", "path", "status", "iterations", "delta_star_hat",
              "r_squared", "support_fraction"});
    for (const auto& st : stages) {
      w.row({csv::fmt(st.epsilon), st.path, st.status,
             std::to_string(st.iterations), csv::fmt(st.rate.delta_star_hat),
             csv::fmt(st.rate.r_squared), csv::fmt(st.support_frac)});
    }
    w.close();
  }
  for (size_t k = 0; k < stages.size(); ++k)
    stages[k].trace.save_csv(
        join_path(cfg.out, "trace_e" + fmt_short(stages[k].epsilon) + ".csv"),
        cfg.emit_timing);
  if (!stages.empty())
    save_dual_csv(stages.back().potentials,
                  join_path(cfg.out, "potentials_f.csv"),
                  join_path(cfg.out, "potentials_g.csv"));

  const bool complete = stages.size() == cfg.epsilons.size() &&
                        (stages.empty() || stages.back().status == "converged" ||
                         stages.back().path == "closed_form");
  csv::KeyValueWriter kv(join_path(cfg.out, "summary.txt"));
  kv.set("name", cfg.name);
  kv.set("mode", std::string("schedule"));
  kv.set("stages_requested", static_cast<long>(cfg.epsilons.size()));
  kv.set("stages_completed", static_cast<long>(stages.size()));
  kv.set("complete", std::string(complete ? "yes" : "no"));
  if (!stages.empty()) {
    kv.set("final_epsilon", stages.back().epsilon);
    kv.set("final_status", stages.back().status);
  }
  kv.write();
  if (!complete) {
    std::cerr << "run failed: schedule aborted after " << stages.size()
              << " of " << cfg.epsilons.size() << " stages\n";
    return 1;
  }
  return 0;
}

int run_spectrum_mode(const Instance& inst, const ExperimentConfig& cfg) {
  const double eps = cfg.epsilons.front();
  // The potentials do not depend on the step size; solve once with a safe
  // ratio, then evaluate the linearization at each requested ratio.
  const FrontEndResult fr = solve_front_end(inst, eps, 0.5 * eps, cfg.tol,
                                            cfg.max_iters, std::nullopt,
                                            cfg.init_value);
  int failures = 0;
  std::vector<SpectrumRow> rows;
  if (fr.status == SolveStatus::converged) {
    for (double r : cfg.ratios) rows.push_back(spectrum_row(inst, fr.potentials, eps, r));
  } else {
    std::cerr << "run failed: spectrum base solve status "
              << to_string(fr.status) << "\n";
    failures = 1;
  }
  write_spectrum_csv(rows, join_path(cfg.out, "spectrum.csv"));

  csv::KeyValueWriter kv(join_path(cfg.out, "summary.txt"));
  kv.set("name", cfg.name);
  kv.set("mode", std::string("spectrum"));
  kv.set("epsilon", eps);
  kv.set("path", fr.path);
  kv.set("status", to_string(fr.status));
  kv.write();
  return failures;
}

int run_sinkhorn_mode(const Instance& inst, const ExperimentConfig& cfg) {
  csv::KeyValueWriter kv(join_path(cfg.out, "summary.txt"));
  kv.set("name", cfg.name);
  kv.set("mode", std::string("sinkhorn"));
  for (double eps : cfg.epsilons) {
    const SinkhornResult res =
        run_sinkhorn(inst.p, inst.q, inst.cost, eps, cfg.max_iters, cfg.tol);
    res.trace.save_csv(
        join_path(cfg.out, "sinkhorn_trace_e" + fmt_short(eps) + ".csv"),
        cfg.emit_timing);
    kv.set("status_e" + fmt_short(eps), to_string(res.status));
    kv.set("iterations_e" + fmt_short(eps), res.iterations);
  }
  kv.write();
  return 0;  // statuses (including numerical failure) are the measurement
}

int run_export_mode(const Instance& inst, const ExperimentConfig& cfg) {
  const double eps = cfg.epsilons.front();
  const double eta = cfg.ratios.front() * eps;
  const FrontEndResult fr = solve_front_end(inst, eps, eta, cfg.tol,
                                            cfg.max_iters, std::nullopt,
                                            cfg.init_value);
  const Coupling coup =
      coupling_density(fr.potentials, inst.p, inst.q, inst.cost, eps);
  export_coupling_dense(coup, join_path(cfg.out, "coupling_dense.csv"));
  export_coupling_sparse(coup, inst.p, inst.q,
                         join_path(cfg.out, "coupling_sparse.csv"),
                         cfg.coupling_threshold);

  csv::KeyValueWriter kv(join_path(cfg.out, "summary.txt"));
  kv.set("name", cfg.name);
  kv.set("mode", std::string("export-coupling"));
  kv.set("epsilon", eps);
  kv.set("path", fr.path);
  kv.set("status", to_string(fr.status));
  kv.set("support_fraction", support_fraction(coup, inst.p, inst.q));
  kv.set("residual_p", coup.residual_p);
  kv.set("residual_q", coup.residual_q);
  kv.set("primal_objective",
         primal_objective(coup, inst.p, inst.q, inst.cost, eps));
  kv.set("dual_objective",
         dual_objective(fr.potentials, inst.p, inst.q, inst.cost, eps));
  kv.write();
  if (fr.status != SolveStatus::converged) {
    std::cerr << "run failed: solve status " << to_string(fr.status) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  ensure_dir(cfg.out);
  const Instance inst = build_instance(cfg);

  if (cfg.mode == "solve") return run_solve_mode(inst, cfg);
  if (cfg.mode == "sweep") return run_sweep_mode(inst, cfg);
  if (cfg.mode == "schedule") return run_schedule_mode(inst, cfg);
  if (cfg.mode == "spectrum") return run_spectrum_mode(inst, cfg);
  if (cfg.mode == "sinkhorn") return run_sinkhorn_mode(inst, cfg);
  if (cfg.mode == "export-coupling") return run_export_mode(inst, cfg);
  throw std::runtime_error("config: unknown mode '" + cfg.mode + "'");
}

int run_experiment(const std::string& config_path,
                   const std::string& out_override, int threads_override) {
  ExperimentConfig cfg = parse_config_file(config_path);
  if (!out_override.empty()) cfg.out = out_override;
  if (threads_override > 0) cfg.threads = threads_override;
  return run_experiment(cfg);
}

}  // namespace qot
