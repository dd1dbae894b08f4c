// Serial reference kernels against their OpenMP versions.
//
//   stvf_bench [macro_n=64] [repeats=20]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <random>
#include <vector>

#include "stvf/driver.hpp"
#include "stvf/estimators.hpp"
#include "stvf/fem.hpp"

using namespace stvf;

namespace {

template <typename F>
double time_ms(int repeats, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) f();
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(end - start).count() / repeats;
}

void row(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-22s %10.3f %10.3f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
              identical ? "bitwise equal" : "differs");
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 64;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 20;
  omp_set_num_threads(thread_budget());
  const auto mesh = std::make_shared<const Mesh>(Mesh::macro(n));
  const FeSpace space(mesh);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FeFunction w = space.zero();
  for (auto& v : w.values) v = u(rng);
  FeFunction ws = space.zero();
  for (auto& v : ws.values) v = u(rng);
  const double eps = 1.0 / 32.0;

  std::printf("mesh %d: %zu vertices, %zu triangles, %d threads, %d repeats\n", n, space.dim(),
              mesh->num_triangles(), thread_budget(), repeats);
  std::printf("%-22s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

  SparseOperator as, ap;
  const double ta_s = time_ms(repeats, [&] { as = assemble_tv_stiffness(space, w, eps, Exec::serial); });
  const double ta_p = time_ms(repeats, [&] { ap = assemble_tv_stiffness(space, w, eps, Exec::parallel); });
  row("assemble A(w)", ta_s, ta_p, as.values == ap.values);

  std::vector<double> ys(space.dim()), yp(space.dim());
  const auto& p = *as.pattern;
  const double ts_s = time_ms(repeats, [&] { kernels::serial::spmv(p, as.values, w.values, ys); });
  const double ts_p = time_ms(repeats, [&] { kernels::parallel::spmv(p, as.values, w.values, yp); });
  row("spmv", ts_s, ts_p, ys == yp);

  double ds = 0.0, dp = 0.0;
  const double td_s = time_ms(repeats, [&] { ds = kernels::serial::dot(w.values, ys); });
  const double td_p = time_ms(repeats, [&] { dp = kernels::parallel::dot(w.values, ys); });
  row("dot", td_s, td_p, ds == dp);

  std::vector<double> js, jp;
  const double tj_s = time_ms(repeats, [&] { js = jump_residual(space, w, eps, Exec::serial); });
  const double tj_p = time_ms(repeats, [&] { jp = jump_residual(space, w, eps, Exec::parallel); });
  row("jump residual", tj_s, tj_p, js == jp);

  double ls = 0.0, lp = 0.0;
  const double tl_s = time_ms(repeats, [&] { ls = eta_lin(space, w, ws, eps, Exec::serial); });
  const double tl_p = time_ms(repeats, [&] { lp = eta_lin(space, w, ws, eps, Exec::parallel); });
  row("eta_lin", tl_s, tl_p, ls == lp);
  return 0;
}
