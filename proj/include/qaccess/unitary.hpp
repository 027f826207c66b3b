#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qaccess/hilbert.hpp"

namespace qaccess {

/// A sequence of Hermitian generators applied for a common time step
/// (hbar = 1): phi = exp(-i dt H_M) ... exp(-i dt H_1) psi.
struct UnitaryProbe {
  std::vector<Eigen::MatrixXcd> hamiltonians;
  double dt = 0.0;

  void validate() const;
};

struct UnitarySpan {
  double span;        // fs_distance(psi, phi)
  double prediction;  // dt * sigma_{sum H}(psi)
  double sigma;
};

inline constexpr double kHermitianTol = 1e-12;

/// Energy dispersion sqrt(<H^2> - <H>^2) in state psi.
double energy_dispersion(const Eigen::MatrixXcd& h, const StateVector& psi);

/// exp(-i t H) for Hermitian H via its spectral decomposition.
Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& h, double t);

/// Exact span of the ordered product of propagators next to the small-step
/// prediction dt * sigma_{sum_j H_j}(psi).
UnitarySpan unitary_span(const StateVector& psi, const UnitaryProbe& probe);

/// Haar-invariant (GUE) random Hermitian matrix, (A + A^dagger)/2 with
/// standard complex normal entries.
Eigen::MatrixXcd random_hermitian(Eigen::Index dim, Rng& rng);

}  // namespace qaccess
