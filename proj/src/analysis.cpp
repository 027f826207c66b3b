#include "qaccess/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <omp.h>

#include "qaccess/error.hpp"
#include "qaccess/hilbert.hpp"

namespace qaccess {

namespace {

struct LineFit {
  double intercept, slope, se_intercept, se_slope, rss;
};

LineFit ordinary_least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::Fit, "fit needs at least two distinct abscissae");
  LineFit f{};
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.rss += r * r;
  }
  if (x.size() > 2) {
    const double s2 = f.rss / (n - 2.0);
    f.se_slope = std::sqrt(s2 / sxx);
    f.se_intercept = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  }
  return f;
}

void require_positive(std::span<const FitPoint> points, std::size_t min_points) {
  if (points.size() < min_points)
    throw Error(ErrorKind::Fit, fmt::format("fit needs at least {} points, got {}",
                                            min_points, points.size()));
  for (const auto& p : points)
    if (!(p.x > 0.0) || !(p.y > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(ErrorKind::Fit,
                  fmt::format("fit needs positive finite data, got ({}, {})", p.x, p.y));
}

PowerLawFit log_log(std::span<const FitPoint> points, double y_scale, double slope_sign) {
  require_positive(points, 2);
  std::vector<double> x, y;
  for (const auto& p : points) {
    x.push_back(std::log(p.x));
    y.push_back(std::log(p.y * y_scale));
  }
  const LineFit line = ordinary_least_squares(x, y);
  PowerLawFit fit;
  fit.A = std::exp(line.intercept);
  fit.B = slope_sign * line.slope;
  fit.se_A = fit.A * line.se_intercept;
  fit.se_B = line.se_slope;
  fit.rss = line.rss;
  fit.points = points.size();
  return fit;
}

}  // namespace

PowerLawFit fit_power_law(std::span<const FitPoint> points) {
  return log_log(points, 2.0 / std::numbers::pi, -1.0);
}

PowerLawFit fit_exponent_scaling(std::span<const FitPoint> points) {
  return log_log(points, 1.0, 1.0);
}

double SaturatingFit::operator()(double d) const {
  return gamma - alpha * std::pow(d, -beta);
}

SaturatingFit fit_saturating_power_law(std::span<const FitPoint> points) {
  if (points.size() < 4)
    throw Error(ErrorKind::Fit,
                fmt::format("saturating fit needs at least 4 points, got {}", points.size()));
  for (const auto& p : points)
    if (!(p.x > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(ErrorKind::Fit, fmt::format("invalid point ({}, {})", p.x, p.y));

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd logd(n), y(n);
  double ymax = points[0].y;
  for (Eigen::Index i = 0; i < n; ++i) {
    logd[i] = std::log(points[i].x);
    y[i] = points[i].y;
    ymax = std::max(ymax, y[i]);
  }

  // gamma0 slightly above the data so every gamma0 - A_i is positive.
  const double gamma0 = ymax > 0.0 ? 1.01 * ymax : ymax + 0.01 * std::abs(ymax) + 1e-3;
  std::vector<FitPoint> gaps;
  for (Eigen::Index i = 0; i < n; ++i) gaps.push_back({points[i].x, gamma0 - y[i]});
  const PowerLawFit start = fit_exponent_scaling(gaps);

  Eigen::Vector3d p(gamma0, start.A, -start.B);
  auto residuals = [&](const Eigen::Vector3d& q) {
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = y[i] - (q[0] - q[1] * std::exp(-q[2] * logd[i]));
    return r;
  };
  auto jacobian = [&](const Eigen::Vector3d& q) {
    Eigen::MatrixXd j(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double pw = std::exp(-q[2] * logd[i]);
      j(i, 0) = 1.0;
      j(i, 1) = -pw;
      j(i, 2) = q[1] * logd[i] * pw;
    }
    return j;
  };

  SaturatingFit fit;
  double lambda = 1e-3;
  Eigen::VectorXd r = residuals(p);
  double rss = r.squaredNorm();
  for (fit.iterations = 1; fit.iterations <= kSaturatingMaxIterations; ++fit.iterations) {
    const Eigen::MatrixXd j = jacobian(p);
    const Eigen::Matrix3d jtj = j.transpose() * j;
    const Eigen::Vector3d jtr = j.transpose() * r;
    Eigen::Matrix3d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();
    const Eigen::Vector3d step = damped.ldlt().solve(jtr);
    if (!step.allFinite()) break;

    const Eigen::Vector3d trial = p + step;
    const Eigen::VectorXd r_trial = residuals(trial);
    const double rss_trial = r_trial.squaredNorm();
    const bool small = step.norm() <= kSaturatingStepTol * p.norm();
    if (rss_trial <= rss) {
      p = trial;
      r = r_trial;
      rss = rss_trial;
      lambda = std::max(lambda / 10.0, 1e-12);
    } else {
      lambda *= 10.0;
    }
    if (small || rss == 0.0) {
      fit.converged = true;
      break;
    }
  }
  fit.iterations = std::min(fit.iterations, kSaturatingMaxIterations);

  fit.gamma = p[0];
  fit.alpha = p[1];
  fit.beta = p[2];
  fit.rss = rss;
  if (n > 3) {
    const Eigen::MatrixXd j = jacobian(p);
    const Eigen::Matrix3d jtj = j.transpose() * j;
    const double s2 = rss / static_cast<double>(n - 3);
    Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
    if (lu.isInvertible()) {
      const Eigen::Matrix3d cov = s2 * lu.inverse();
      fit.se_gamma = std::sqrt(std::max(0.0, cov(0, 0)));
      fit.se_alpha = std::sqrt(std::max(0.0, cov(1, 1)));
      fit.se_beta = std::sqrt(std::max(0.0, cov(2, 2)));
    }
  }
  return fit;
}

double concentration_bound(double dim, double epsilon) {
  if (!(dim >= 1.0)) throw Error(ErrorKind::InvalidDimension, "dimension must be >= 1");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Validation, "epsilon must be > 0");
  const double de = dim * epsilon;
  const double ratio = std::isinf(de) ? 1.0 : de / (1.0 + de);
  return 4.0 * std::exp(-0.25 * dim * ratio * ratio);
}

double concentration_lower_bound(double dim) {
  return 1.0 - concentration_bound(dim, 1.0 / dim);
}

void validate_concentration_args(std::int64_t dim, double epsilon, std::int64_t samples) {
  if (dim < 1) throw Error(ErrorKind::InvalidDimension, "dimension must be >= 1");
  if (samples < 1000)
    throw Error(ErrorKind::Validation,
                fmt::format("samples={} below the minimum of 1000", samples));
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Validation, "epsilon must be > 0");
}

ConcentrationTally concentration_batch(std::int64_t dim, double epsilon,
                                       std::uint64_t master_seed, std::int64_t batch,
                                       std::int64_t count) {
  Rng rng = make_substream(master_seed, {kind_tag("concentration"),
                                         static_cast<std::uint64_t>(dim),
                                         static_cast<std::uint64_t>(batch)});
  const double inv_dim = 1.0 / static_cast<double>(dim);
  ConcentrationTally acc;
  for (std::int64_t s = 0; s < count; ++s) {
    const StateVector a = random_state(dim, rng);
    const StateVector c = random_state(dim, rng);
    const double x = overlap_squared(a, c);
    if (std::abs(x - inv_dim) >= epsilon) ++acc.hits;
    acc.sum += x;
    acc.sum_sq += x * x;
  }
  return acc;
}

ConcentrationReport concentration_report(std::int64_t dim, double epsilon,
                                         std::int64_t samples,
                                         std::span<const ConcentrationTally> tallies) {
  ConcentrationTally total;
  for (const auto& t : tallies) {
    total.hits += t.hits;
    total.sum += t.sum;
    total.sum_sq += t.sum_sq;
  }
  ConcentrationReport rep;
  rep.dim = static_cast<double>(dim);
  rep.epsilon = epsilon;
  rep.bound = concentration_bound(rep.dim, epsilon);
  rep.samples = samples;
  rep.empirical_probability = static_cast<double>(total.hits) / samples;
  rep.lower_bound = concentration_lower_bound(rep.dim);
  const auto n = static_cast<double>(samples);
  rep.mean_overlap = total.sum / n;
  const double var =
      std::max(0.0, (total.sum_sq - n * rep.mean_overlap * rep.mean_overlap) / (n - 1.0));
  rep.mean_overlap_se = std::sqrt(var / n);
  return rep;
}

ConcentrationReport empirical_concentration(std::int64_t dim, double epsilon,
                                            std::int64_t samples,
                                            std::uint64_t master_seed, int workers) {
  validate_concentration_args(dim, epsilon, samples);
  const std::int64_t batches = (samples + kConcentrationBatch - 1) / kConcentrationBatch;
  std::vector<ConcentrationTally> tallies(batches);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t b = 0; b < batches; ++b) {
    try {
      tallies[b] = concentration_batch(
          dim, epsilon, master_seed, b,
          std::min(kConcentrationBatch, samples - b * kConcentrationBatch));
    } catch (...) {
#pragma omp critical(qaccess_concentration_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return concentration_report(dim, epsilon, samples, tallies);
}

}  // namespace qaccess
