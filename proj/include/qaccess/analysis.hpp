#pragma once

#include <cstdint>
#include <span>

namespace qaccess {

struct FitPoint {
  double x;
  double y;
};

/// Log-log least-squares fit. Standard errors are the ordinary OLS
/// coefficient errors (unweighted); A's error is propagated from log A.
/// With exactly two points the residual variance is undefined and both
/// errors are reported as 0.
struct PowerLawFit {
  double A = 0.0;
  double B = 0.0;
  double se_A = 0.0;
  double se_B = 0.0;
  double rss = 0.0;  // in log space
  std::size_t points = 0;
};

/// delta_s = (pi/2) A M^{-B}; points are (M_i, delta_s_i).
PowerLawFit fit_power_law(std::span<const FitPoint> points);

/// value = A x^{B}; points are (N_i or D_i, value_i). Note the sign: B here
/// is the growth exponent, so a decaying law gives B < 0.
PowerLawFit fit_exponent_scaling(std::span<const FitPoint> points);

/// A(D) = gamma - alpha D^{-beta}.
struct SaturatingFit {
  double gamma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double se_gamma = 0.0;
  double se_alpha = 0.0;
  double se_beta = 0.0;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;

  bool valid() const noexcept { return converged && beta > 0.0; }
  double operator()(double d) const;
};

inline constexpr int kSaturatingMaxIterations = 200;
inline constexpr double kSaturatingStepTol = 1e-10;

/// Gauss-Newton with Levenberg damping from gamma0 = 1.01 max(A_i) and
/// (alpha, beta) of a log-linear fit of gamma0 - A_i. Needs >= 4 points.
/// Non-convergence is reported through `converged`, not thrown.
SaturatingFit fit_saturating_power_law(std::span<const FitPoint> points);

/// 4 exp[-(D/4) (D eps / (1 + D eps))^2]
double concentration_bound(double dim, double epsilon);

/// 1 - 4 exp(-D/16): the bound's complement at eps = 1/D.
double concentration_lower_bound(double dim);

struct ConcentrationReport {
  double dim = 0.0;
  double epsilon = 0.0;
  double bound = 0.0;
  double empirical_probability = 0.0;
  std::int64_t samples = 0;
  double lower_bound = 0.0;        // 1 - 4 exp(-D/16)
  double mean_overlap = 0.0;       // sample mean of |<psi|psi'>|^2
  double mean_overlap_se = 0.0;
};

inline constexpr std::int64_t kConcentrationBatch = 1024;

struct ConcentrationTally {
  std::int64_t hits = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
};

/// `count` Haar pairs from the substream of batch `batch`.
ConcentrationTally concentration_batch(std::int64_t dim, double epsilon,
                                       std::uint64_t master_seed, std::int64_t batch,
                                       std::int64_t count);

/// Combines batch tallies (in batch order) into a report.
ConcentrationReport concentration_report(std::int64_t dim, double epsilon,
                                         std::int64_t samples,
                                         std::span<const ConcentrationTally> tallies);

void validate_concentration_args(std::int64_t dim, double epsilon, std::int64_t samples);

/// Frequency of ||<psi|psi'>|^2 - 1/D| >= epsilon over independent Haar
/// pairs, next to the analytic bound. Batches of kConcentrationBatch pairs
/// each own a substream, so the result does not depend on `workers`.
ConcentrationReport empirical_concentration(std::int64_t dim, double epsilon,
                                            std::int64_t samples,
                                            std::uint64_t master_seed, int workers = 0);

}  // namespace qaccess
