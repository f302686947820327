#include "qot/rate.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qot {

namespace {

// Least-squares slope and R^2 of y against 0,1,...,k-1.
std::pair<double, double> fit_line(const std::vector<double>& y) {
  const auto k = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    const auto x = static_cast<double>(i);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  const double denom = k * sxx - sx * sx;
  const double slope = (k * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / k;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / k;
  for (size_t i = 0; i < y.size(); ++i) {
    const double fitv = intercept + slope * static_cast<double>(i);
    ss_res += (y[i] - fitv) * (y[i] - fitv);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return {slope, r2};
}

}  // namespace

RateEstimate estimate_rate(const SolveTrace& trace) {
  const auto len = static_cast<long>(trace.rows.size());
  if (len < 3) throw std::invalid_argument("estimate_rate: trace too short");
  const int window = static_cast<int>(std::min<long>(10, len));

  RateEstimate est;
  est.window = window;
  est.n_converged = trace.rows.back().n;

  std::vector<double> tail(window);
  bool exact_zero = false;
  for (int k = 0; k < window; ++k) {
    const double d = trace.rows[len - window + k].delta_n;
    if (d == 0.0) exact_zero = true;
    tail[k] = d > 0.0 ? std::log(d) : 0.0;
  }
  if (exact_zero) {
    // Exact convergence inside the window: report rate 0 by convention.
    est.delta_star_hat = 0.0;
    est.r_squared = 1.0;
    est.n0 = trace.rows.front().n;
    return est;
  }

  const auto [slope, r2] = fit_line(tail);
  est.delta_star_hat = std::exp(slope);
  est.r_squared = r2;

  // Burn-in proxy: slide the same window over the whole trace and find the
  // first position from which all local slopes agree with the final one to
  // within 5%.
  std::vector<double> logs(len);
  for (long i = 0; i < len; ++i) {
    const double d = trace.rows[i].delta_n;
    if (d <= 0.0) {
      est.n0 = trace.rows.front().n;
      return est;
    }
    logs[i] = std::log(d);
  }
  long first_stable = window - 1;
  for (long e = len - 1; e >= window - 1; --e) {
    std::vector<double> w(logs.begin() + (e - window + 1), logs.begin() + e + 1);
    const auto [s, unused] = fit_line(w);
    (void)unused;
    if (std::abs(s - slope) > 0.05 * std::abs(slope)) {
      first_stable = e + 1;
      break;
    }
  }
  est.n0 = trace.rows[std::min(first_stable, len - 1)].n;
  return est;
}

}  // namespace qot
