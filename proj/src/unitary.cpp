#include "qaccess/unitary.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qaccess/error.hpp"

namespace qaccess {

void UnitaryProbe::validate() const {
  if (hamiltonians.empty())
    throw Error(ErrorKind::Validation, "unitary probe needs at least one Hamiltonian");
  if (!(dt >= 0.0) || !std::isfinite(dt))
    throw Error(ErrorKind::Validation, fmt::format("time step {} is invalid", dt));
  const Eigen::Index dim = hamiltonians.front().rows();
  for (std::size_t j = 0; j < hamiltonians.size(); ++j) {
    const auto& h = hamiltonians[j];
    if (h.rows() != dim || h.cols() != dim)
      throw Error(ErrorKind::Validation,
                  fmt::format("Hamiltonian {} is {}x{}, expected {}x{}", j, h.rows(),
                              h.cols(), dim, dim));
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kHermitianTol * scale)
      throw Error(ErrorKind::Validation,
                  fmt::format("Hamiltonian {} is not Hermitian (|H - H^+| = {:.3g})", j,
                              asym));
  }
}

double energy_dispersion(const Eigen::MatrixXcd& h, const StateVector& psi) {
  if (h.rows() != psi.dim() || h.cols() != psi.dim())
    throw Error(ErrorKind::Shape, "Hamiltonian and state dimensions differ");
  const Eigen::VectorXcd hpsi = h * psi.amplitudes();
  const double mean = psi.amplitudes().dot(hpsi).real();
  const double second = hpsi.squaredNorm();
  return std::sqrt(std::max(0.0, second - mean * mean));
}

Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const Eigen::VectorXd& e = solver.eigenvalues();
  Eigen::VectorXcd phases(e.size());
  for (Eigen::Index k = 0; k < e.size(); ++k) phases[k] = std::polar(1.0, -t * e[k]);
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

UnitarySpan unitary_span(const StateVector& psi, const UnitaryProbe& probe) {
  probe.validate();
  if (probe.hamiltonians.front().rows() != psi.dim())
    throw Error(ErrorKind::Shape, "probe and state dimensions differ");

  Eigen::VectorXcd phi = psi.amplitudes();
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(psi.dim(), psi.dim());
  for (const auto& h : probe.hamiltonians) {
    phi = hermitian_propagator(h, probe.dt) * phi;
    total += h;
  }
  const double sigma = energy_dispersion(total, psi);
  return {fs_distance(psi, StateVector::normalized(std::move(phi))), probe.dt * sigma,
          sigma};
}

Eigen::MatrixXcd random_hermitian(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      a(i, j) = Complex(re, im);
    }
  return 0.5 * (a + a.adjoint());
}

}  // namespace qaccess
