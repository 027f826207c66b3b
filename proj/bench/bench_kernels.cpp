// Serial reference kernels against their OpenMP counterparts. Each pair is
// run on the same seed; the outputs must agree exactly, otherwise the
// timing is meaningless and the program exits non-zero.

#include <chrono>
#include <cstdio>
#include <vector>

#include <fmt/format.h>
#include <omp.h>

#include "qaccess/analysis.hpp"
#include "qaccess/percolation.hpp"
#include "qaccess/reference.hpp"
#include "qaccess/walk.hpp"

using namespace qaccess;

namespace {

template <class F>
double seconds(F&& f, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

bool report(const char* name, double serial, double parallel, bool same) {
  fmt::print("{:<28} serial {:9.4f} s   omp {:9.4f} s   speedup {:5.2f}   {}\n", name, serial,
             parallel, serial / parallel, same ? "identical" : "MISMATCH");
  return same;
}

}  // namespace

int main() {
  const int threads = omp_get_max_threads();
  fmt::print("OpenMP threads: {}\n", threads);
  bool ok = true;

  {
    Rng rng(1);
    std::vector<StateVector> states;
    for (int i = 0; i < 300; ++i) states.push_back(random_state(1024, rng));
    Eigen::MatrixXd a, b;
    const double ts = seconds([&] { a = reference::pairwise_distances(states).matrix(); });
    const double tp = seconds([&] { b = pairwise_distances(states, threads).matrix(); });
    // The two kernels use different (arccos vs atan2) formulas; agreement is
    // to rounding, not bitwise.
    ok &= report("pairwise_distances D=1024", ts, tp, (a - b).cwiseAbs().maxCoeff() < 1e-7);
  }
  {
    CriticalSearchConfig c;
    c.qubits = 2;
    c.steps = 30;
    c.trials = 16;
    c.workers = threads;
    CriticalStepResult a, b;
    const double ts = seconds([&] { a = reference::critical_step_length(c, 7); }, 1);
    const double tp = seconds([&] { b = critical_step_length(c, 7); }, 1);
    ok &= report("critical_step_length N=2", ts, tp, a.values() == b.values());
  }
  {
    PercolationResult a, b;
    const double ts = seconds([&] { a = reference::critical_threshold_experiment(8, 100, 8, 3); });
    const double tp = seconds([&] { b = critical_threshold_experiment(8, 100, 8, 3, threads); });
    bool same = a.samples.size() == b.samples.size();
    for (std::size_t i = 0; same && i < a.samples.size(); ++i)
      same = a.samples[i].has_value() == b.samples[i].has_value() &&
             (!a.samples[i] || std::abs(*a.samples[i] - *b.samples[i]) < 1e-7);
    ok &= report("percolation N=8 M=100", ts, tp, same);
  }
  {
    ConcentrationReport a, b;
    const double ts = seconds([&] { a = reference::empirical_concentration(64, 1.0 / 64, 100000, 5); });
    const double tp = seconds([&] { b = empirical_concentration(64, 1.0 / 64, 100000, 5, threads); });
    ok &= report("concentration D=64", ts, tp,
                 a.empirical_probability == b.empirical_probability &&
                     a.mean_overlap == b.mean_overlap);
  }
  {
    Rng rng(9);
    const auto coords = to_coords(random_state(32, rng));
    MetricFrame a, b;
    const double ts = seconds([&] { a = reference::metric_tensor(coords); }, 5);
    const double tp = seconds([&] { b = metric_tensor(coords); }, 5);
    fmt::print("{:<28} assembled {:9.6f} s   closed form {:9.6f} s   max |dg| {:.2e}\n",
               "metric D=32", ts, tp, (a.g - b.g).cwiseAbs().maxCoeff());
  }
  return ok ? 0 : 1;
}
