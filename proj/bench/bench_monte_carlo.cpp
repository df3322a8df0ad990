// Times the parallel sampler against the serial reference on one fixed
// workload. Both share the shard kernel, so the success counts must match
// exactly; the point of the benchmark is the wall-clock ratio.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "sonni/analysis.hpp"

using namespace sonni;

namespace {

double time_once(MonteCarloEstimate (*fn)(Formula, size_t, size_t, size_t,
                                          uint64_t, uint64_t),
                 uint64_t trials, MonteCarloEstimate* out) {
  auto t0 = std::chrono::steady_clock::now();
  *out = fn(Formula::OneShot, 1000, 24, 128, trials, 99);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  uint64_t trials = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 4000000;

  MonteCarloEstimate warm;
  time_once(monte_carlo, trials / 8, &warm);  // fault in the thread pool

  MonteCarloEstimate par, ser;
  double tp = time_once(monte_carlo, trials, &par);
  double ts = time_once(monte_carlo_serial, trials, &ser);

  std::printf("workload: one-shot d=1000 m=24 k=128, %llu trials\n",
              (unsigned long long)trials);
  std::printf("parallel: %8.3fs  %10.0f trials/s  successes=%llu\n", tp,
              double(trials) / tp, (unsigned long long)par.successes);
  std::printf("serial:   %8.3fs  %10.0f trials/s  successes=%llu\n", ts,
              double(trials) / ts, (unsigned long long)ser.successes);
  std::printf("speedup:  %.2fx\n", ts / tp);

  if (par.successes != ser.successes) {
    std::printf("MISMATCH: parallel and serial disagree\n");
    return 1;
  }
  return 0;
}
