#include "qaccess/reference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "qaccess/error.hpp"

namespace qaccess::reference {

double fs_distance(const StateVector& psi, const StateVector& phi) {
  if (psi.dim() != phi.dim()) throw Error(ErrorKind::Shape, "dimension mismatch");
  Complex acc{0.0, 0.0};
  for (Eigen::Index k = 0; k < psi.dim(); ++k) acc += std::conj(psi[k]) * phi[k];
  return std::acos(std::clamp(std::abs(acc), 0.0, 1.0));
}

DistanceMatrix pairwise_distances(std::span<const StateVector> states) {
  const std::size_t m = states.size();
  if (m < 2)
    throw Error(ErrorKind::InsufficientPoints,
                fmt::format("need at least 2 states, got {}", m));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v = reference::fs_distance(states[i], states[j]);
      d(i, j) = v;
      d(j, i) = v;
    }
  return DistanceMatrix(std::move(d));
}

MetricFrame metric_tensor(const HypersphericalCoords& coords) {
  const Eigen::VectorXcd psi = from_coords(coords).amplitudes();
  const Eigen::MatrixXcd dpsi = detail::coordinate_derivatives(coords);
  const Eigen::VectorXcd proj = dpsi.adjoint() * psi;  // <d_i psi|psi>
  const Eigen::MatrixXcd q = dpsi.adjoint() * dpsi - proj * proj.adjoint();
  Eigen::MatrixXd g = q.real();
  g = 0.5 * (g + g.transpose()).eval();
  return detail::decompose(std::move(g));
}

CriticalStepResult critical_step_length(const CriticalSearchConfig& config,
                                        std::uint64_t master_seed) {
  config.validate();
  std::vector<CriticalTrial> trials;
  trials.reserve(config.trials);
  for (int i = 0; i < config.trials; ++i)
    trials.push_back(critical_step_trial(
        config, walk_trial_seed(master_seed, config.qubits, config.steps, i)));
  return summarize_trials(std::move(trials));
}

PercolationResult critical_threshold_experiment(int qubits, int points, int samples,
                                                std::uint64_t master_seed) {
  validate_percolation_args(qubits, points, samples);
  const Eigen::Index dim = qubit_dimension(qubits);
  std::vector<std::optional<double>> values;
  for (int s = 0; s < samples; ++s) {
    Rng rng(percolation_sample_seed(master_seed, qubits, points, s));
    std::vector<StateVector> states;
    for (int i = 0; i < points; ++i) states.push_back(random_state(dim, rng));
    values.push_back(critical_threshold(reference::pairwise_distances(states)));
  }
  return summarize_samples(std::move(values));
}

ConcentrationReport empirical_concentration(std::int64_t dim, double epsilon,
                                            std::int64_t samples,
                                            std::uint64_t master_seed) {
  validate_concentration_args(dim, epsilon, samples);
  std::vector<ConcentrationTally> tallies;
  for (std::int64_t done = 0, b = 0; done < samples; done += kConcentrationBatch, ++b)
    tallies.push_back(concentration_batch(dim, epsilon, master_seed, b,
                                          std::min(kConcentrationBatch, samples - done)));
  return concentration_report(dim, epsilon, samples, tallies);
}

}  // namespace qaccess::reference
