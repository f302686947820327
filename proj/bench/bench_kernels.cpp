// Timing comparison of the OpenMP kernels against the serial reference.
// Prints one CSV row per kernel and size; the `identical` column re-checks
// that both paths produce the same bytes.
//
//   bench_kernels [sizes...]     default sizes: 200 600 1200

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qot/kernels.hpp"

using namespace qot;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double best_of(int reps, const F& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_ms();
    fn();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

struct Problem {
  Eigen::MatrixXd xp, xq, c, ct;
  Eigen::VectorXd f, g, fs, gs, wp, wq;
};

Problem make_problem(Eigen::Index n) {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Problem pb;
  pb.xp.resize(n, 1);
  pb.xq.resize(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) pb.xp(i, 0) = unif(rng);
  for (Eigen::Index j = 0; j < n; ++j) pb.xq(j, 0) = unif(rng);
  pb.c = kernels::serial::cost_fill(pb.xp, pb.xq);
  pb.ct = kernels::serial::cost_fill(pb.xq, pb.xp);
  const auto rand_vec = [&](Eigen::Index k) {
    Eigen::VectorXd v(k);
    for (Eigen::Index i = 0; i < k; ++i) v[i] = unif(rng);
    return v;
  };
  pb.f = rand_vec(n);
  pb.g = rand_vec(n);
  pb.fs = rand_vec(n);
  pb.gs = rand_vec(n);
  pb.wp = rand_vec(n).array().abs() + 0.1;
  pb.wq = rand_vec(n).array().abs() + 0.1;
  pb.wp /= pb.wp.sum();
  pb.wq /= pb.wq.sum();
  return pb;
}

void report(const char* kernel, Eigen::Index n, double serial_ms,
            double par_ms, bool identical) {
  std::printf("%s,%ld,%.3f,%.3f,%.2f,%s\n", kernel, static_cast<long>(n),
              serial_ms, par_ms, serial_ms / par_ms, identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Eigen::Index> sizes = {200, 600, 1200};
  if (argc > 1) {
    sizes.clear();
    for (int k = 1; k < argc; ++k) sizes.push_back(std::atol(argv[k]));
  }
#ifdef _OPENMP
  std::printf("# OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("# built without OpenMP; both columns are serial\n");
#endif
  std::printf("kernel,n,serial_ms,parallel_ms,speedup,identical\n");
  const int reps = 5;

  for (const Eigen::Index n : sizes) {
    const Problem pb = make_problem(n);

    {
      Eigen::MatrixXd a, b;
      const double ts = best_of(reps, [&] { a = kernels::serial::cost_fill(pb.xp, pb.xq); });
      const double tp = best_of(reps, [&] { b = kernels::cost_fill(pb.xp, pb.xq); });
      report("cost_fill", n, ts, tp, a == b);
    }
    {
      Eigen::VectorXd rp1, rs1, rp2, rs2;
      const double ts = best_of(reps, [&] {
        kernels::serial::pos_sums_f(pb.ct, pb.f, pb.g, pb.wq, rp1, rs1);
      });
      const double tp = best_of(reps, [&] {
        kernels::pos_sums_f(pb.ct, pb.f, pb.g, pb.wq, rp2, rs2);
      });
      report("pos_sums_f", n, ts, tp, rp1 == rp2 && rs1 == rs2);
    }
    {
      Eigen::VectorXd c1, c2;
      const double ts = best_of(reps, [&] {
        kernels::serial::pos_sums_g(pb.c, pb.f, pb.g, pb.wp, c1);
      });
      const double tp = best_of(reps, [&] {
        kernels::pos_sums_g(pb.c, pb.f, pb.g, pb.wp, c2);
      });
      report("pos_sums_g", n, ts, tp, c1 == c2);
    }
    {
      Eigen::MatrixXd a, b;
      const double ts = best_of(reps, [&] {
        a = kernels::serial::plus_part_matrix(pb.c, pb.f, pb.g, 10.0);
      });
      const double tp = best_of(reps, [&] {
        b = kernels::plus_part_matrix(pb.c, pb.f, pb.g, 10.0);
      });
      report("plus_part_matrix", n, ts, tp, a == b);
    }
    {
      Eigen::MatrixXd a, b;
      const double ts = best_of(reps, [&] {
        a = kernels::serial::lambda_measure_matrix(pb.c, pb.f, pb.g, pb.fs, pb.gs);
      });
      const double tp = best_of(reps, [&] {
        b = kernels::lambda_measure_matrix(pb.c, pb.f, pb.g, pb.fs, pb.gs);
      });
      report("lambda_measure_matrix", n, ts, tp, a == b);
    }
    {
      Eigen::VectorXd a, b;
      const double ts = best_of(reps, [&] {
        a = kernels::serial::sinkhorn_update_g(pb.c, pb.f, pb.wp, 0.3);
      });
      const double tp = best_of(reps, [&] {
        b = kernels::sinkhorn_update_g(pb.c, pb.f, pb.wp, 0.3);
      });
      report("sinkhorn_update_g", n, ts, tp, a == b);
    }
  }
  return 0;
}
