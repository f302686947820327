#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qot/dual.hpp"
#include "qot/measures.hpp"
#include "qot/rate.hpp"
#include "qot/solver.hpp"

namespace qot {

/// Marginal described by a generator expression: uniform(lo,hi),
/// beta(a,b), truncnormal(mu,sigma,lo,hi), uniform2d(ax,bx,ay,by), or
/// csv(path).
struct MarginalSpec {
  std::string kind;
  std::vector<double> params;
  std::string path;  // csv only
};

MarginalSpec parse_marginal(const std::string& text);

/// Flat `key = value` experiment description; `#` starts a comment.
/// Unknown keys are rejected.
struct ExperimentConfig {
  std::string name = "run";
  std::string mode = "solve";  // solve|sweep|schedule|spectrum|sinkhorn|export-coupling
  MarginalSpec p{"uniform", {0.0, 1.0}, ""};
  MarginalSpec q{"uniform", {0.0, 1.0}, ""};
  // Shared quadrature mesh. 1-d marginals use [grid_a, grid_b]; 2-d ones
  // use the rectangle below.
  double grid_a = 0.0, grid_b = 1.0, grid_h = 0.01;
  double grid_ax = 0.0, grid_bx = 1.0, grid_ay = 0.0, grid_by = 1.0;
  std::vector<double> epsilons = {0.1};  // ladder for schedule, first entry otherwise
  std::vector<double> ratios = {0.5};    // eta/epsilon values
  double init_value = 0.5;
  double tol = 1e-10;
  long max_iters = 100000;
  long probe_max_iters = 3000;  // cap for break-search probes
  std::string out = "out";
  int threads = 0;             // 0 keeps the OpenMP default
  bool spectrum = true;        // sweep: record op_norm per converged ratio
  bool break_search = true;    // sweep: locate the break point
  double break_resolution = 0.01;
  bool emit_timing = false;    // off keeps CSV outputs byte-deterministic
  double coupling_threshold = 1e-12;
};

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin = "<config>");
ExperimentConfig parse_config_file(const std::string& path);

struct Instance {
  DiscreteMeasure p;
  DiscreteMeasure q;
  CostMatrix cost;
};

/// Discretizes both marginals on the configured mesh and fills the costs.
Instance build_instance(const ExperimentConfig& cfg);

/// Solver front end: tests the full-support condition first and returns the
/// explicit potentials when it holds, otherwise runs gradient descent.
struct FrontEndResult {
  std::string path;  // "closed_form" or "gd"
  DualPair potentials;
  SolveStatus status = SolveStatus::converged;
  SolveTrace trace;  // empty on the closed-form path
};
FrontEndResult solve_front_end(const Instance& inst, double eps, double eta,
                               double tol, long max_iters,
                               const std::optional<DualPair>& init,
                               double init_value);

struct SweepRow {
  double ratio = 0.0;
  std::string status;  // converged | max_iters | diverged | closed_form
  long iterations = 0;
  double delta_star_hat = 0.0;
  double r_squared = 0.0;
  double op_norm = 0.0;  // NaN when not computed
  bool probe = false;
};

struct SpectrumRow {
  double ratio = 0.0;
  double op_norm = 0.0;
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  double selfadjoint_defect = 0.0;
  long tie_count = 0;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;  // grid runs and probes, sorted by ratio
  bool break_found = false;
  double break_point = 0.0;  // smallest ratio observed to not converge
  std::vector<std::pair<double, SolveTrace>> traces;  // grid ratios only
  std::vector<SpectrumRow> spectrum;
  std::optional<DualPair> reference_potentials;  // largest converged ratio
};

/// One solve per configured ratio (cold start). When the grid leaves the
/// break point unbracketed the search extends upward in 0.1 steps, then
/// bisects to `break_resolution`; probes start from a slightly perturbed
/// converged solution so they skip the burn-in, and a probe that exhausts
/// its iteration budget is classified by the sign of its tail slope.
SweepOutcome sweep_eta(const Instance& inst, const ExperimentConfig& cfg);

struct ScheduleStage {
  double epsilon = 0.0;
  std::string path;  // closed_form or gd
  std::string status;
  long iterations = 0;
  RateEstimate rate;
  DualPair potentials;
  SolveTrace trace;
  double support_frac = 0.0;
};

/// Solves along a strictly decreasing epsilon ladder, warm-starting each
/// stage from the previous potentials. A diverging stage aborts the ladder
/// and the partial results are returned.
std::vector<ScheduleStage> eps_schedule(const Instance& inst,
                                        const ExperimentConfig& cfg);

/// Runs the configured mode and writes traces, rate tables, spectrum
/// reports, coupling exports and a key-value summary under cfg.out.
/// Returns 0 on full success, otherwise the number of failed runs (failures
/// are also listed on stderr).
int run_experiment(const ExperimentConfig& cfg);
int run_experiment(const std::string& config_path,
                   const std::string& out_override = "",
                   int threads_override = 0);

}  // namespace qot
