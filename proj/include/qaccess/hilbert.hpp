#pragma once

// Fubini-Study geometry of pure states in C^D.
//
// A state is parameterized by 2(D-1) real angles: D-1 hyperspherical
// magnitude angles followed by D-1 relative phases,
//
//   psi_k     = e^{i phi_k} sin(t_0)...sin(t_{k-1}) cos(t_k),   k < D-1
//   psi_{D-1} = sin(t_0)...sin(t_{D-2})
//
// with the global phase fixed so the last amplitude is real and non-negative.
//
// The maximal Fubini-Study distance between two rays is pi/2 (orthogonal
// states). Some texts quote the Bures angle maximum of pi for the same
// notion; every routine here uses pi/2.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qaccess/rng.hpp"

namespace qaccess {

using Complex = std::complex<double>;

inline constexpr double kHalfPi = 1.57079632679489661923;

class StateVector {
 public:
  /// Normalizes `amplitudes`. Throws InvalidDimension on an empty vector and
  /// InvalidState on a zero or non-finite norm.
  static StateVector normalized(Eigen::VectorXcd amplitudes);

  /// Computational basis state |index> in dimension `dim`.
  static StateVector basis(Eigen::Index dim, Eigen::Index index);

  const Eigen::VectorXcd& amplitudes() const noexcept { return amps_; }
  Eigen::Index dim() const noexcept { return amps_.size(); }
  Complex operator[](Eigen::Index k) const { return amps_[k]; }

 private:
  explicit StateVector(Eigen::VectorXcd a) : amps_(std::move(a)) {}
  Eigen::VectorXcd amps_;
};

class HypersphericalCoords {
 public:
  /// `theta` must hold 2(dim-1) angles.
  HypersphericalCoords(Eigen::Index dim, Eigen::VectorXd theta);

  Eigen::Index dim() const noexcept { return dim_; }
  Eigen::Index num_params() const noexcept { return theta_.size(); }
  const Eigen::VectorXd& theta() const noexcept { return theta_; }

  double magnitude_angle(Eigen::Index k) const { return theta_[k]; }
  double phase_angle(Eigen::Index k) const { return theta_[dim_ - 1 + k]; }

 private:
  Eigen::Index dim_;
  Eigen::VectorXd theta_;
};

/// Local geometry at a point: the real symmetric metric g, its spectrum
/// g = V diag(h) V^T, and the mask of directions with h_i < h_tol.
struct MetricFrame {
  Eigen::MatrixXd g;
  Eigen::VectorXd h;
  Eigen::MatrixXd V;
  std::vector<bool> degenerate;
  double h_tol = 0.0;

  Eigen::Index size() const noexcept { return g.rows(); }
  Eigen::Index non_degenerate_count() const noexcept;
};

struct TangentStep {
  Eigen::VectorXd d_theta;
  double target_length = 0.0;
  Eigen::VectorXd u;
};

/// Relative eigenvalue floor below which a direction counts as degenerate.
inline constexpr double kDegeneracyRelTol = 1e-10;

/// Haar-uniform pure state: 2D standard normals paired into complex
/// amplitudes and divided by their Euclidean norm.
StateVector random_state(Eigen::Index dim, Rng& rng);

/// arccos(|<psi|phi>|) with the overlap modulus clamped to [0, 1].
double fs_distance(const StateVector& psi, const StateVector& phi);

/// |<psi|phi>|^2
double overlap_squared(const StateVector& psi, const StateVector& phi);

HypersphericalCoords to_coords(const StateVector& psi);
StateVector from_coords(const HypersphericalCoords& coords);

/// Maps arbitrary angles back to the principal ranges (magnitudes in
/// [0, pi/2], phases in [0, 2pi)) by a round trip through the state.
HypersphericalCoords canonicalize(const HypersphericalCoords& coords);

/// Closed-form metric. The magnitude block is diagonal,
///   g_aa = prod_{j<a} sin^2 t_j,
/// the phase block is diag(p) - p p^T with p_k = |psi_k|^2, and the
/// magnitude/phase cross terms are purely imaginary before symmetrization.
MetricFrame metric_tensor(const HypersphericalCoords& coords);

/// Draws u uniformly on the unit sphere of the non-degenerate subspace and
/// maps it to d_theta with d_theta^T g d_theta = delta_s^2.
/// Throws DegenerateFrame when every direction is masked.
TangentStep random_tangent_step(const MetricFrame& frame, double delta_s,
                                Rng& rng);

namespace detail {

/// d psi / d theta_i for every parameter, as the columns of a D x 2(D-1)
/// matrix. Shared by the reference metric assembly and the tests.
Eigen::MatrixXcd coordinate_derivatives(const HypersphericalCoords& coords);

/// Eigen-decomposes a symmetric matrix into a frame and applies the
/// degeneracy mask.
MetricFrame decompose(Eigen::MatrixXd g);

}  // namespace detail

}  // namespace qaccess
