#pragma once

// Serial, literal implementations of the parallel kernels. They share the
// per-trial building blocks with the production code but not the
// scheduling, so tests can compare the two bit for bit, and the metric and
// distance kernels are computed along an independent route.

#include <cstdint>
#include <span>

#include "qaccess/analysis.hpp"
#include "qaccess/hilbert.hpp"
#include "qaccess/percolation.hpp"
#include "qaccess/walk.hpp"

namespace qaccess::reference {

/// arccos(clamp(|sum_k conj(psi_k) phi_k|, 0, 1)), summed term by term.
double fs_distance(const StateVector& psi, const StateVector& phi);

/// Row-by-row loop over fs_distance above.
DistanceMatrix pairwise_distances(std::span<const StateVector> states);

/// g_ij = Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>] from the
/// coordinate derivatives, symmetrized, then decomposed.
MetricFrame metric_tensor(const HypersphericalCoords& coords);

CriticalStepResult critical_step_length(const CriticalSearchConfig& config,
                                        std::uint64_t master_seed);

PercolationResult critical_threshold_experiment(int qubits, int points, int samples,
                                                std::uint64_t master_seed);

ConcentrationReport empirical_concentration(std::int64_t dim, double epsilon,
                                            std::int64_t samples,
                                            std::uint64_t master_seed);

}  // namespace qaccess::reference
