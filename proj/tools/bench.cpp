// Timing comparison of the serial reference path against the OpenMP path for
// the table kernels, on the heaviest built-in model.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "koszul/cohomology.hpp"
#include "koszul/lemmas.hpp"

using namespace koszul;
using Clock = std::chrono::steady_clock;

namespace {

template <typename Fn>
double time_ms(Fn&& fn) {
  auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-22s %10.1f ms %10.1f ms %8.2fx\n", name, serial_ms, parallel_ms,
              parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  std::string name = argc > 1 ? argv[1] : "iwasawa6";
  std::string pi = argc > 2 ? argv[2] : "1 X1^X3";
  Model m = builtin(name);
  set_poisson(m, parse_poisson_expr(m, pi));
  validate(m);

#ifdef _OPENMP
  std::printf("model %s, pi = %s, threads = %d\n", name.c_str(), pi.c_str(),
              omp_get_max_threads());
#else
  std::printf("model %s, pi = %s (built without OpenMP)\n", name.c_str(), pi.c_str());
#endif
  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  row("hodge",
      time_ms([&] { hodge_diamond(m, Exec::Serial); }),
      time_ms([&] { hodge_diamond(m, Exec::Parallel); }));
  row("kb",
      time_ms([&] { kb_homology(m, Exec::Serial); }),
      time_ms([&] { kb_homology(m, Exec::Parallel); }));
  row("bott_chern",
      time_ms([&] { bott_chern(m, Exec::Serial); }),
      time_ms([&] { bott_chern(m, Exec::Parallel); }));
  row("aeppli",
      time_ms([&] { aeppli(m, Exec::Serial); }),
      time_ms([&] { aeppli(m, Exec::Parallel); }));
  row("lp",
      time_ms([&] { lp_cohomology(m, Exec::Serial); }),
      time_ms([&] { lp_cohomology(m, Exec::Parallel); }));
  row("ss_infinity",
      time_ms([&] { ss_infinity(m, Exec::Serial); }),
      time_ms([&] { ss_infinity(m, Exec::Parallel); }));
  row("ss_page_1",
      time_ms([&] { ss_page(m, 1, Exec::Serial); }),
      time_ms([&] { ss_page(m, 1, Exec::Parallel); }));
  return 0;
}
