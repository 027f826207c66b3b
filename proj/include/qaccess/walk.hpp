#pragma once

#include <cstdint>
#include <vector>

#include "qaccess/hilbert.hpp"

namespace qaccess {

enum class EpsilonMode { Paper, Fixed };

/// pi/2 - arccos(1/sqrt(D)): a walk counts as maximal once its final overlap
/// with the start drops to the Haar-typical value 1/D.
double paper_epsilon(Eigen::Index dim);

inline Eigen::Index qubit_dimension(int qubits) {
  return Eigen::Index{1} << qubits;
}

struct WalkConfig {
  int qubits = 1;
  int steps = 1;
  double delta_s = 0.1;
  double epsilon = 0.0;
  EpsilonMode epsilon_mode = EpsilonMode::Paper;
  bool exact_step = false;

  /// Config with epsilon taken from paper_epsilon(2^qubits).
  static WalkConfig with_paper_epsilon(int qubits, int steps, double delta_s,
                                       bool exact_step = false);
  Eigen::Index dim() const { return qubit_dimension(qubits); }
  void validate() const;
};

struct WalkRecord {
  std::vector<double> spans;  // L_0 .. L_M
  bool reached = false;
};

/// Maximum number of perturb-and-retry attempts at a degenerate point.
inline constexpr int kDegenerateRetries = 8;

/// Fixed-stride random walk of config.steps steps starting at `initial`.
/// Each step: coordinates, metric frame, uniform tangent direction, map back,
/// renormalize and re-canonicalize. With exact_step the coordinate
/// displacement is rescaled so the realized FS step equals delta_s.
WalkRecord run_walk(const StateVector& initial, const WalkConfig& config, Rng& rng);

struct ProbeOutcome {
  double delta_s;
  bool reached;
};

struct CriticalTrial {
  double value = kHalfPi;
  bool censored = false;
  std::vector<ProbeOutcome> probes;
};

/// Stride resolution of the critical search: scan increment for FreshScan,
/// final bracket width for FrozenBisection.
inline constexpr double kStrideResolution = 1e-3 * kHalfPi;
inline constexpr int kScanProbes = 1000;  // kScanProbes * kStrideResolution = pi/2

/// Geometric scan that brackets the first reaching stride before bisection.
inline constexpr double kBracketScanStart = kStrideResolution;
inline constexpr double kBracketScanRatio = 1.0905077326652577;  // 2^(1/8)

enum class SearchProtocol {
  /// Strides k * kStrideResolution, k = 1, 2, ..., each probed with a freshly
  /// drawn start state and direction sequence; the first reaching stride is
  /// the trial's critical value. Gives A(1) near 0.3 and B(N) near 0.47.
  FreshScan,
  /// Common random numbers: every probe replays one frozen substream, so the
  /// outcome is a deterministic function of the stride. A geometric scan
  /// brackets the first reaching stride and bisection narrows the bracket
  /// below kStrideResolution.
  FrozenBisection,
};

struct CriticalSearchConfig {
  int qubits = 1;
  int steps = 1;
  int trials = 1;
  EpsilonMode epsilon_mode = EpsilonMode::Paper;
  double epsilon = 0.0;  // used when epsilon_mode == Fixed
  bool exact_step = false;
  SearchProtocol protocol = SearchProtocol::FreshScan;
  int workers = 0;  // 0: OpenMP default

  double resolved_epsilon() const;
  void validate() const;
};

struct CriticalStepResult {
  double mean = 0.0;        // over uncensored trials
  double std_error = 0.0;   // over uncensored trials
  std::vector<CriticalTrial> trials;
  int censored_count = 0;

  std::vector<double> values() const;
};

/// Critical stride of one trial. A trial that never reaches the target, even
/// at pi/2, is censored at pi/2.
CriticalTrial critical_step_trial(const CriticalSearchConfig& config,
                                  std::uint64_t trial_seed);

/// Substream of probe k of a FreshScan trial.
std::uint64_t probe_seed(std::uint64_t trial_seed, int probe_index);

/// Substream seed of one trial of the walk experiment.
std::uint64_t walk_trial_seed(std::uint64_t master_seed, int qubits, int steps,
                              int trial);

/// Mean and standard error over uncensored trials; censored ones are counted.
CriticalStepResult summarize_trials(std::vector<CriticalTrial> trials);

/// Runs config.trials independent trials in parallel.
CriticalStepResult critical_step_length(const CriticalSearchConfig& config,
                                        std::uint64_t master_seed);

// Heuristic multi-step span model.

/// 10.5 N^{-3/2}
double heuristic_f(double qubits);

/// (2/pi) delta_s sqrt(M) sqrt(f(N))
double heuristic_span(double delta_s, double steps, double qubits);

/// Stride for which heuristic_span equals 1.
double heuristic_critical_step(double steps, double qubits);

}  // namespace qaccess
