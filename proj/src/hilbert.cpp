#include "qaccess/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qaccess/error.hpp"

namespace qaccess {

StateVector StateVector::normalized(Eigen::VectorXcd amplitudes) {
  if (amplitudes.size() < 1)
    throw Error(ErrorKind::InvalidDimension, "state dimension must be >= 1");
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorKind::InvalidState,
                fmt::format("cannot normalize state with norm {}", norm));
  amplitudes /= norm;
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::basis(Eigen::Index dim, Eigen::Index index) {
  if (dim < 1)
    throw Error(ErrorKind::InvalidDimension, "state dimension must be >= 1");
  if (index < 0 || index >= dim)
    throw Error(ErrorKind::Shape,
                fmt::format("basis index {} out of range for D={}", index, dim));
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(dim);
  a[index] = 1.0;
  return StateVector(std::move(a));
}

HypersphericalCoords::HypersphericalCoords(Eigen::Index dim,
                                           Eigen::VectorXd theta)
    : dim_(dim), theta_(std::move(theta)) {
  if (dim < 1)
    throw Error(ErrorKind::InvalidDimension, "state dimension must be >= 1");
  if (theta_.size() != 2 * (dim - 1))
    throw Error(ErrorKind::Shape,
                fmt::format("expected {} angles for D={}, got {}",
                            2 * (dim - 1), dim, theta_.size()));
}

Eigen::Index MetricFrame::non_degenerate_count() const noexcept {
  return std::count(degenerate.begin(), degenerate.end(), false);
}

StateVector random_state(Eigen::Index dim, Rng& rng) {
  if (dim < 1)
    throw Error(ErrorKind::InvalidDimension,
                fmt::format("random_state: dimension {} < 1", dim));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd a(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double re = normal(rng);
    const double im = normal(rng);
    a[j] = Complex(re, im);
  }
  return StateVector::normalized(std::move(a));
}

double overlap_squared(const StateVector& psi, const StateVector& phi) {
  if (psi.dim() != phi.dim())
    throw Error(ErrorKind::Shape,
                fmt::format("dimension mismatch: {} vs {}", psi.dim(), phi.dim()));
  return std::norm(psi.amplitudes().dot(phi.amplitudes()));
}

double fs_distance(const StateVector& psi, const StateVector& phi) {
  if (psi.dim() != phi.dim())
    throw Error(ErrorKind::Shape,
                fmt::format("dimension mismatch: {} vs {}", psi.dim(), phi.dim()));
  // arccos(|<psi|phi>|) evaluated as atan2(|phi_perp|, |<psi|phi>|), which
  // keeps full relative precision for nearly parallel states.
  const Complex inner = psi.amplitudes().dot(phi.amplitudes());
  const double overlap = std::clamp(std::abs(inner), 0.0, 1.0);
  const double perp = (phi.amplitudes() - inner * psi.amplitudes()).norm();
  return std::atan2(perp, overlap);
}

HypersphericalCoords to_coords(const StateVector& psi) {
  const Eigen::Index dim = psi.dim();
  const Eigen::Index n = dim - 1;
  Eigen::VectorXd theta(2 * n);
  if (n == 0) return HypersphericalCoords(dim, std::move(theta));

  Eigen::VectorXcd a = psi.amplitudes();
  const double last_mod = std::abs(a[n]);
  if (last_mod > 0.0) a *= std::conj(a[n]) / last_mod;

  // tail[k] = sum_{j>k} |a_j|^2
  Eigen::VectorXd tail(dim);
  tail[n] = 0.0;
  for (Eigen::Index k = n; k > 0; --k) tail[k - 1] = tail[k] + std::norm(a[k]);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r = std::abs(a[k]);
    theta[k] = std::atan2(std::sqrt(tail[k]), r);
    double phase = r > 0.0 ? std::arg(a[k]) : 0.0;
    if (phase < 0.0) phase += two_pi;
    if (phase >= two_pi) phase -= two_pi;
    theta[n + k] = phase;
  }
  return HypersphericalCoords(dim, std::move(theta));
}

StateVector from_coords(const HypersphericalCoords& coords) {
  const Eigen::Index dim = coords.dim();
  const Eigen::Index n = dim - 1;
  Eigen::VectorXcd a(dim);
  double sine_product = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = coords.magnitude_angle(k);
    a[k] = std::polar(1.0, coords.phase_angle(k)) * (sine_product * std::cos(t));
    sine_product *= std::sin(t);
  }
  a[n] = sine_product;
  return StateVector::normalized(std::move(a));
}

HypersphericalCoords canonicalize(const HypersphericalCoords& coords) {
  return to_coords(from_coords(coords));
}

namespace detail {

MetricFrame decompose(Eigen::MatrixXd g) {
  MetricFrame frame;
  const Eigen::Index p = g.rows();
  if (p > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
    frame.h = solver.eigenvalues();
    frame.V = solver.eigenvectors();
  } else {
    frame.h.resize(0);
    frame.V.resize(0, 0);
  }
  frame.g = std::move(g);
  const double hmax = p > 0 ? frame.h.maxCoeff() : 0.0;
  frame.h_tol = kDegeneracyRelTol * hmax;
  frame.degenerate.resize(p);
  for (Eigen::Index i = 0; i < p; ++i)
    frame.degenerate[i] = !(frame.h[i] >= frame.h_tol) || !(hmax > 0.0);
  return frame;
}

Eigen::MatrixXcd coordinate_derivatives(const HypersphericalCoords& coords) {
  const Eigen::Index dim = coords.dim();
  const Eigen::Index n = dim - 1;
  Eigen::VectorXd s(n), c(n);
  Eigen::VectorXcd phase(dim);
  for (Eigen::Index k = 0; k < n; ++k) {
    s[k] = std::sin(coords.magnitude_angle(k));
    c[k] = std::cos(coords.magnitude_angle(k));
    phase[k] = std::polar(1.0, coords.phase_angle(k));
  }
  phase[n] = 1.0;

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, 2 * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index k = a; k < dim; ++k) {
      double r = 1.0;
      for (Eigen::Index j = 0; j < k; ++j) r *= (j == a) ? c[j] : s[j];
      if (k == a) {
        r *= -s[k];
      } else if (k < n) {
        r *= c[k];
      }
      d(k, a) = phase[k] * r;
    }
  }
  const StateVector psi = from_coords(coords);
  for (Eigen::Index l = 0; l < n; ++l)
    d(l, n + l) = Complex(0.0, 1.0) * psi[l];
  return d;
}

}  // namespace detail

MetricFrame metric_tensor(const HypersphericalCoords& coords) {
  const Eigen::Index n = coords.dim() - 1;
  const Eigen::Index p = 2 * n;
  MetricFrame frame;
  frame.g = Eigen::MatrixXd::Zero(p, p);
  frame.h = Eigen::VectorXd::Zero(p);
  frame.V = Eigen::MatrixXd::Zero(p, p);
  frame.degenerate.assign(p, false);
  if (p == 0) return frame;

  // Magnitude block: g_aa = prod_{j<a} sin^2, and |psi_k|^2 for the phases.
  Eigen::VectorXd probs(n);
  double sine_sq = 1.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    const double t = coords.magnitude_angle(a);
    const double ct = std::cos(t);
    frame.g(a, a) = sine_sq;
    probs[a] = sine_sq * ct * ct;
    const double st = std::sin(t);
    sine_sq *= st * st;
  }

  Eigen::MatrixXd phase_block = -probs * probs.transpose();
  phase_block.diagonal() += probs;
  frame.g.bottomRightCorner(n, n) = phase_block;

  frame.h.head(n) = frame.g.diagonal().head(n);
  frame.V.topLeftCorner(n, n).setIdentity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(phase_block);
  frame.h.tail(n) = solver.eigenvalues();
  frame.V.bottomRightCorner(n, n) = solver.eigenvectors();

  const double hmax = frame.h.maxCoeff();
  frame.h_tol = kDegeneracyRelTol * hmax;
  for (Eigen::Index i = 0; i < p; ++i) frame.degenerate[i] = frame.h[i] < frame.h_tol;
  return frame;
}

TangentStep random_tangent_step(const MetricFrame& frame, double delta_s,
                                Rng& rng) {
  if (!(delta_s > 0.0 && delta_s <= kHalfPi))
    throw Error(ErrorKind::Validation,
                fmt::format("step length {} outside (0, pi/2]", delta_s));
  const Eigen::Index p = frame.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  TangentStep step;
  step.target_length = delta_s;
  step.u.resize(p);
  // Always draw p normals so the stream position does not depend on the mask.
  for (Eigen::Index i = 0; i < p; ++i) {
    const double x = normal(rng);
    step.u[i] = frame.degenerate[i] ? 0.0 : x;
  }
  const double norm = step.u.norm();
  if (!(norm > 0.0))
    throw Error(ErrorKind::DegenerateFrame,
                "every tangent direction is degenerate at this point");
  step.u /= norm;

  Eigen::VectorXd scaled(p);
  for (Eigen::Index i = 0; i < p; ++i)
    scaled[i] = frame.degenerate[i] ? 0.0 : delta_s * step.u[i] / std::sqrt(frame.h[i]);
  step.d_theta = frame.V * scaled;
  return step;
}

}  // namespace qaccess
