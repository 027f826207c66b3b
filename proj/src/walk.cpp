#include "qaccess/walk.hpp"

#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "qaccess/error.hpp"

namespace qaccess {

double paper_epsilon(Eigen::Index dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidDimension, "dimension must be >= 1");
  return kHalfPi - std::acos(1.0 / std::sqrt(static_cast<double>(dim)));
}

WalkConfig WalkConfig::with_paper_epsilon(int qubits, int steps, double delta_s,
                                          bool exact_step) {
  WalkConfig c;
  c.qubits = qubits;
  c.steps = steps;
  c.delta_s = delta_s;
  c.epsilon_mode = EpsilonMode::Paper;
  c.epsilon = paper_epsilon(qubit_dimension(qubits));
  c.exact_step = exact_step;
  return c;
}

void WalkConfig::validate() const {
  if (qubits < 1 || qubits > 20)
    throw Error(ErrorKind::Validation, fmt::format("qubits={} out of range", qubits));
  if (steps < 1)
    throw Error(ErrorKind::Validation, fmt::format("steps={} must be >= 1", steps));
  if (!(delta_s > 0.0 && delta_s <= kHalfPi))
    throw Error(ErrorKind::Validation,
                fmt::format("delta_s={} outside (0, pi/2]", delta_s));
  if (!(epsilon > 0.0))
    throw Error(ErrorKind::Validation, fmt::format("epsilon={} must be > 0", epsilon));
}

namespace {

// Scale factor lambda such that fs_distance(psi(theta), psi(theta + lambda d))
// equals the target. Scans for the first crossing, then refines it. If the
// coordinate line never reaches the target, the farthest scanned point is
// used.
double exact_step_scale(const StateVector& current, const HypersphericalCoords& at,
                        const Eigen::VectorXd& d_theta, double target) {
  auto distance_at = [&](double lambda) {
    return fs_distance(current,
                       from_coords(HypersphericalCoords(at.dim(), at.theta() + lambda * d_theta)));
  };
  constexpr int kScan = 64;
  constexpr double kMaxScale = 4.0;
  double prev = 0.0;
  double best_lambda = 1.0;
  double best_distance = -1.0;
  for (int i = 1; i <= kScan; ++i) {
    const double lambda = kMaxScale * i / kScan;
    const double d = distance_at(lambda);
    if (d >= target) {
      if (d == target) return lambda;
      boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
      std::uintmax_t iters = 100;
      auto [lo, hi] = boost::math::tools::toms748_solve(
          [&](double l) { return distance_at(l) - target; }, prev, lambda,
          (prev == 0.0 ? -target : distance_at(prev) - target), d - target, tol, iters);
      return 0.5 * (lo + hi);
    }
    if (d > best_distance) {
      best_distance = d;
      best_lambda = lambda;
    }
    prev = lambda;
  }
  return best_lambda;
}

}  // namespace

WalkRecord run_walk(const StateVector& initial, const WalkConfig& config, Rng& rng) {
  config.validate();
  if (initial.dim() != config.dim())
    throw Error(ErrorKind::Shape,
                fmt::format("initial state has D={}, walk expects D={}", initial.dim(),
                            config.dim()));

  WalkRecord record;
  record.spans.reserve(config.steps + 1);
  record.spans.push_back(0.0);

  StateVector current = initial;
  HypersphericalCoords coords = to_coords(initial);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (int t = 0; t < config.steps; ++t) {
    TangentStep step;
    HypersphericalCoords at = coords;
    for (int attempt = 0;; ++attempt) {
      try {
        step = random_tangent_step(metric_tensor(at), config.delta_s, rng);
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateFrame) throw;
        if (attempt + 1 >= kDegenerateRetries)
          throw Error(ErrorKind::WalkFailure,
                      fmt::format("degenerate frame persisted after {} retries at step {}",
                                  kDegenerateRetries, t));
        Eigen::VectorXd jitter(at.num_params());
        for (Eigen::Index i = 0; i < jitter.size(); ++i) jitter[i] = 1e-9 * normal(rng);
        at = canonicalize(HypersphericalCoords(at.dim(), at.theta() + jitter));
      }
    }

    double scale = 1.0;
    if (config.exact_step)
      scale = exact_step_scale(current, at, step.d_theta, config.delta_s);

    current = from_coords(HypersphericalCoords(at.dim(), at.theta() + scale * step.d_theta));
    coords = to_coords(current);
    record.spans.push_back(fs_distance(initial, current));
  }

  record.reached = kHalfPi - record.spans.back() <= config.epsilon;
  return record;
}

double CriticalSearchConfig::resolved_epsilon() const {
  return epsilon_mode == EpsilonMode::Paper ? paper_epsilon(qubit_dimension(qubits))
                                            : epsilon;
}

void CriticalSearchConfig::validate() const {
  if (trials < 1)
    throw Error(ErrorKind::Validation, fmt::format("trials={} must be >= 1", trials));
  WalkConfig probe;
  probe.qubits = qubits;
  probe.steps = steps;
  probe.delta_s = kHalfPi;
  probe.epsilon = resolved_epsilon();
  probe.validate();
}

std::vector<double> CriticalStepResult::values() const {
  std::vector<double> v;
  v.reserve(trials.size());
  for (const auto& t : trials) v.push_back(t.value);
  return v;
}

std::uint64_t probe_seed(std::uint64_t trial_seed, int probe_index) {
  return substream_seed(trial_seed, {static_cast<std::uint64_t>(probe_index)});
}

CriticalTrial critical_step_trial(const CriticalSearchConfig& config,
                                  std::uint64_t trial_seed) {
  WalkConfig walk;
  walk.qubits = config.qubits;
  walk.steps = config.steps;
  walk.epsilon_mode = config.epsilon_mode;
  walk.epsilon = config.resolved_epsilon();
  walk.exact_step = config.exact_step;
  const Eigen::Index dim = walk.dim();

  CriticalTrial trial;
  auto probe = [&](double delta_s, std::uint64_t seed) {
    Rng rng(seed);
    const StateVector initial = random_state(dim, rng);
    walk.delta_s = delta_s;
    const bool reached = run_walk(initial, walk, rng).reached;
    trial.probes.push_back({delta_s, reached});
    return reached;
  };

  if (config.protocol == SearchProtocol::FreshScan) {
    for (int k = 1; k <= kScanProbes; ++k) {
      const double delta_s = k == kScanProbes ? kHalfPi : k * kStrideResolution;
      if (probe(delta_s, probe_seed(trial_seed, k))) {
        trial.value = delta_s;
        return trial;
      }
    }
    trial.value = kHalfPi;
    trial.censored = true;
    return trial;
  }

  // Frozen substream. The outcome is not monotone at large strides, so
  // bisecting (0, pi/2] directly can land on a later crossing; bracket the
  // first one with an upward scan first.
  double lo = 0.0;
  double hi = -1.0;
  for (double s = kBracketScanStart; s < kHalfPi; s *= kBracketScanRatio) {
    if (probe(s, trial_seed)) {
      hi = s;
      break;
    }
    lo = s;
  }
  if (hi < 0.0) {
    if (!probe(kHalfPi, trial_seed)) {
      trial.value = kHalfPi;
      trial.censored = true;
      return trial;
    }
    hi = kHalfPi;
  }
  while (hi - lo > kStrideResolution) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid, trial_seed)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  trial.value = hi;
  return trial;
}

std::uint64_t walk_trial_seed(std::uint64_t master_seed, int qubits, int steps,
                              int trial) {
  return substream_seed(master_seed,
                        {kind_tag("walk-critical"), static_cast<std::uint64_t>(qubits),
                         static_cast<std::uint64_t>(steps),
                         static_cast<std::uint64_t>(trial)});
}

CriticalStepResult summarize_trials(std::vector<CriticalTrial> trials) {
  CriticalStepResult result;
  result.trials = std::move(trials);
  double sum = 0.0;
  int n = 0;
  for (const auto& t : result.trials) {
    if (t.censored) {
      ++result.censored_count;
      continue;
    }
    sum += t.value;
    ++n;
  }
  if (n == 0) {
    result.mean = std::numeric_limits<double>::quiet_NaN();
    result.std_error = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  result.mean = sum / n;
  double ss = 0.0;
  for (const auto& t : result.trials)
    if (!t.censored) ss += (t.value - result.mean) * (t.value - result.mean);
  result.std_error = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return result;
}

CriticalStepResult critical_step_length(const CriticalSearchConfig& config,
                                        std::uint64_t master_seed) {
  config.validate();
  std::vector<CriticalTrial> trials(config.trials);
  std::exception_ptr failure;
  const int threads = config.workers > 0 ? config.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < config.trials; ++i) {
    try {
      trials[i] = critical_step_trial(
          config, walk_trial_seed(master_seed, config.qubits, config.steps, i));
    } catch (...) {
#pragma omp critical(qaccess_walk_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return summarize_trials(std::move(trials));
}

double heuristic_f(double qubits) { return 10.5 * std::pow(qubits, -1.5); }

double heuristic_span(double delta_s, double steps, double qubits) {
  return (2.0 / std::numbers::pi) * delta_s * std::sqrt(steps) *
         std::sqrt(heuristic_f(qubits));
}

double heuristic_critical_step(double steps, double qubits) {
  return kHalfPi / (std::sqrt(steps) * std::sqrt(heuristic_f(qubits)));
}

}  // namespace qaccess
