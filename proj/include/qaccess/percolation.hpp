#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qaccess/hilbert.hpp"

namespace qaccess {

// Disjoint sets with path compression and union by rank.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t x) noexcept;
  /// Returns the surviving root, or nullopt if a and b were already joined.
  std::optional<std::size_t> unite(std::size_t a, std::size_t b) noexcept;
  std::size_t size() const noexcept { return parent_.size(); }

  const std::vector<std::size_t>& parent() const noexcept { return parent_; }
  const std::vector<std::uint8_t>& rank() const noexcept { return rank_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

class DistanceMatrix {
 public:
  /// Checks symmetry, zero diagonal and the [0, pi/2] range.
  explicit DistanceMatrix(Eigen::MatrixXd d);

  std::size_t size() const noexcept { return static_cast<std::size_t>(d_.rows()); }
  double operator()(std::size_t m, std::size_t n) const { return d_(m, n); }
  const Eigen::MatrixXd& matrix() const noexcept { return d_; }

 private:
  Eigen::MatrixXd d_;
};

struct Cluster {
  std::size_t root;
  std::vector<std::size_t> members;  // ascending
  double span;                       // max pairwise distance, 0 for singletons
};

struct ClusterSet {
  UnionFind sets{0};
  std::vector<Cluster> clusters;  // ordered by smallest member
  double threshold = 0.0;

  std::size_t cluster_of(std::size_t point) const;
  double max_span() const noexcept;
};

/// Full symmetric matrix of Fubini-Study distances, rows in parallel.
/// Throws InsufficientPoints for fewer than two states and Shape on mixed
/// dimensions.
DistanceMatrix pairwise_distances(std::span<const StateVector> states, int workers = 0);

/// Links every pair with d <= threshold and reports each component with its
/// maximal internal distance.
ClusterSet build_clusters(const DistanceMatrix& dist, double threshold);

/// Kruskal-style sweep over pair distances in ascending order (ties in
/// ascending (row, column) order). After each union the merged span is
/// updated from the cross-pair distances; the first edge weight w at which
/// some cluster has pi/2 - L <= w is returned. nullopt if that never happens.
std::optional<double> critical_threshold(const DistanceMatrix& dist);

struct PercolationResult {
  double mean = 0.0;        // over samples with a threshold
  double std_error = 0.0;
  double none_rate = 0.0;
  std::vector<std::optional<double>> samples;
};

/// Substream seed of one percolation sample.
std::uint64_t percolation_sample_seed(std::uint64_t master_seed, int qubits, int points,
                                      int sample);

/// One sample: `points` Haar-random states drawn from the substream `seed`,
/// their pairwise distances (serial) and the critical threshold.
std::optional<double> percolation_sample(int qubits, int points, std::uint64_t seed);

/// Throws Validation / InsufficientPoints for unusable experiment arguments.
void validate_percolation_args(int qubits, int points, int samples);

/// Aggregates sample thresholds; throws ExperimentFailure if all are none.
PercolationResult summarize_samples(std::vector<std::optional<double>> samples);

/// `samples` repetitions of: `points` Haar-random states on `qubits` qubits,
/// pairwise distances, critical threshold. Throws ExperimentFailure when no
/// sample produces a threshold.
PercolationResult critical_threshold_experiment(int qubits, int points, int samples,
                                                std::uint64_t master_seed,
                                                int workers = 0);

}  // namespace qaccess
