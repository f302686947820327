#include "qot/solver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "qot/csv.hpp"
#include "qot/kernels.hpp"

namespace qot {

namespace {

struct DualTerms {
  Eigen::VectorXd row_pos;  // sum_j wq_j (f_i+g_j-c_ij)_+
  Eigen::VectorXd row_sq;   // sum_j wq_j (f_i+g_j-c_ij)_+^2
  Eigen::VectorXd col_pos;  // sum_i wp_i (f_i+g_j-c_ij)_+
};

DualTerms compute_terms(const DualPair& d, const CostMatrix& cost,
                        const DiscreteMeasure& p, const DiscreteMeasure& q) {
  DualTerms t;
  kernels::pos_sums_f(cost.ct(), d.f, d.g, q.weights(), t.row_pos, t.row_sq);
  kernels::pos_sums_g(cost.c(), d.f, d.g, p.weights(), t.col_pos);
  return t;
}

double objective_from_terms(const DualPair& d, const DualTerms& t,
                            const DiscreteMeasure& p, const DiscreteMeasure& q,
                            double eps) {
  return p.weights().dot(d.f) + q.weights().dot(d.g) -
         p.weights().dot(t.row_sq) / (2.0 * eps);
}

DualPair gradient_from_terms(const DualTerms& t, double eps) {
  return {1.0 - t.row_pos.array() / eps, 1.0 - t.col_pos.array() / eps};
}

double residual_from_terms(const DualTerms& t, const DiscreteMeasure& p,
                           const DiscreteMeasure& q, double eps) {
  const Eigen::ArrayXd rf = eps - t.row_pos.array();
  const Eigen::ArrayXd rg = eps - t.col_pos.array();
  return std::sqrt((p.weights().array() * rf.square()).sum() +
                   (q.weights().array() * rg.square()).sum());
}

void validate(const GdConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("cfg: epsilon must be > 0");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("cfg: eta must be > 0");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("cfg: tol must be > 0");
  if (cfg.max_iters < 1) throw std::invalid_argument("cfg: max_iters must be >= 1");
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::diverged: return "diverged";
  }
  return "unknown";
}

void SolveTrace::save_csv(const std::string& path, bool include_timing) const {
  csv::Writer out(path);
  out.header({"n", "delta_n", "gamma", "supnorm_step", "seconds"});
  for (const auto& r : rows) {
    out.row({std::to_string(r.n), csv::fmt(r.delta_n), csv::fmt(r.gamma),
             csv::fmt(r.supnorm_step),
             csv::fmt(include_timing ? r.seconds : 0.0)});
  }
  out.close();
}

double dual_objective(const DualPair& d, const DiscreteMeasure& p,
                      const DiscreteMeasure& q, const CostMatrix& cost,
                      double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("dual_objective: eps must be > 0");
  return objective_from_terms(d, compute_terms(d, cost, p, q), p, q, eps);
}

DualPair dual_gradient(const DualPair& d, const DiscreteMeasure& p,
                       const DiscreteMeasure& q, const CostMatrix& cost,
                       double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("dual_gradient: eps must be > 0");
  return gradient_from_terms(compute_terms(d, cost, p, q), eps);
}

DualPair gd_step(const DualPair& d, const DiscreteMeasure& p,
                 const DiscreteMeasure& q, const CostMatrix& cost,
                 const GdConfig& cfg) {
  validate(cfg);
  const DualPair grad = dual_gradient(d, p, q, cost, cfg.epsilon);
  DualPair moved{d.f + cfg.eta * grad.f, d.g + cfg.eta * grad.g};
  // Non-finite values flow through unprojected; the solve loop turns them
  // into a diverged status.
  if (!moved.all_finite()) return moved;
  return project_balanced(moved, p, q);
}

double schrodinger_residual(const DualPair& d, const DiscreteMeasure& p,
                            const DiscreteMeasure& q, const CostMatrix& cost,
                            double eps) {
  if (!(eps > 0.0))
    throw std::invalid_argument("schrodinger_residual: eps must be > 0");
  return residual_from_terms(compute_terms(d, cost, p, q), p, q, eps);
}

SolveResult solve(const DiscreteMeasure& p, const DiscreteMeasure& q,
                  const CostMatrix& cost, const GdConfig& cfg,
                  const StepObserver& observer) {
  validate(cfg);
  if (cfg.eta > cfg.epsilon && !cfg.quiet)
    std::cerr << "solve: eta = " << cfg.eta << " exceeds epsilon = "
              << cfg.epsilon << "; convergence is not guaranteed\n";

  DualPair cur = cfg.init ? project_balanced(*cfg.init, p, q)
                          : constant_dual(p, q, 0.5);
  if (observer) observer(0, cur);

  SolveResult res;
  res.trace.status = SolveStatus::max_iters;
  res.trace.rows.reserve(256);

  const auto t0 = std::chrono::steady_clock::now();
  DualTerms terms = compute_terms(cur, cost, p, q);
  double delta1 = 0.0;

  for (long n = 1; n <= cfg.max_iters; ++n) {
    const DualPair grad = gradient_from_terms(terms, cfg.epsilon);
    DualPair next{cur.f + cfg.eta * grad.f, cur.g + cfg.eta * grad.g};
    if (!next.all_finite()) {
      res.trace.status = SolveStatus::diverged;
      break;
    }
    next = project_balanced(next, p, q);

    const DualTerms terms_next = compute_terms(next, cost, p, q);
    const double delta = delta_n(cur, next, p, q);
    const double gamma = objective_from_terms(next, terms_next, p, q, cfg.epsilon);
    const double sup = sup_distance(cur, next);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    res.trace.rows.push_back({n, delta, gamma, sup, secs});
    if (observer) observer(n, next);

    cur = next;
    terms = terms_next;

    if (!std::isfinite(delta) || !std::isfinite(gamma)) {
      res.trace.status = SolveStatus::diverged;
      break;
    }
    if (delta <= cfg.tol) {
      res.trace.status = SolveStatus::converged;
      break;
    }
    if (n == 1) {
      delta1 = delta;
    } else if (delta > 1e6 * std::max(delta1, 1.0)) {
      res.trace.status = SolveStatus::diverged;
      break;
    }
  }

  res.dual = std::move(cur);
  return res;
}

double lipschitz_witness(const DualPair& a, const DualPair& b,
                         const DiscreteMeasure& p, const DiscreteMeasure& q,
                         const CostMatrix& cost, double eps) {
  const DualPair diff{a.f - b.f, a.g - b.g};
  const double den = weighted_norm(diff, p, q);
  if (den == 0.0)
    throw std::invalid_argument("lipschitz_witness: identical arguments");
  const DualPair ga = dual_gradient(a, p, q, cost, eps);
  const DualPair gb = dual_gradient(b, p, q, cost, eps);
  const DualPair gdiff{ga.f - gb.f, ga.g - gb.g};
  return weighted_norm(gdiff, p, q) / den;
}

void save_dual_csv(const DualPair& d, const std::string& path_f,
                   const std::string& path_g) {
  const auto dump = [](const Eigen::VectorXd& v, const std::string& path) {
    csv::Writer out(path);
    out.header({"index", "value"});
    for (Eigen::Index i = 0; i < v.size(); ++i)
      out.row({std::to_string(i), csv::fmt(v[i])});
    out.close();
  };
  dump(d.f, path_f);
  dump(d.g, path_g);
}

DualPair load_dual_csv(const std::string& path_f, const std::string& path_g) {
  const auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> vals;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        throw std::runtime_error(path + ": malformed row");
      vals.push_back(std::stod(line.substr(comma + 1)));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
    return v;
  };
  return {slurp(path_f), slurp(path_g)};
}

}  // namespace qot
