#include "qaccess/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>

#include <fmt/format.h>
#include <omp.h>

#include "qaccess/error.hpp"
#include "qaccess/walk.hpp"

namespace qaccess {

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) noexcept {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

std::optional<std::size_t> UnionFind::unite(std::size_t a, std::size_t b) noexcept {
  a = find(a);
  b = find(b);
  if (a == b) return std::nullopt;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return a;
}

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd d) : d_(std::move(d)) {
  if (d_.rows() != d_.cols())
    throw Error(ErrorKind::Shape, "distance matrix must be square");
  constexpr double kSlack = 1e-12;
  for (Eigen::Index m = 0; m < d_.rows(); ++m) {
    if (d_(m, m) != 0.0)
      throw Error(ErrorKind::Validation, fmt::format("d({0},{0}) must be 0", m));
    for (Eigen::Index n = m + 1; n < d_.cols(); ++n) {
      if (d_(m, n) != d_(n, m))
        throw Error(ErrorKind::Validation,
                    fmt::format("distance matrix not symmetric at ({},{})", m, n));
      if (!(d_(m, n) >= 0.0 && d_(m, n) <= kHalfPi + kSlack))
        throw Error(ErrorKind::Validation,
                    fmt::format("d({},{}) = {} outside [0, pi/2]", m, n, d_(m, n)));
    }
  }
}

std::size_t ClusterSet::cluster_of(std::size_t point) const {
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& m = clusters[i].members;
    if (std::binary_search(m.begin(), m.end(), point)) return i;
  }
  throw Error(ErrorKind::Shape, fmt::format("point {} not in any cluster", point));
}

double ClusterSet::max_span() const noexcept {
  double best = 0.0;
  for (const auto& c : clusters) best = std::max(best, c.span);
  return best;
}

DistanceMatrix pairwise_distances(std::span<const StateVector> states, int workers) {
  const std::size_t m = states.size();
  if (m < 2)
    throw Error(ErrorKind::InsufficientPoints,
                fmt::format("need at least 2 states, got {}", m));
  const Eigen::Index dim = states.front().dim();
  for (const auto& s : states)
    if (s.dim() != dim)
      throw Error(ErrorKind::Shape, "states have different dimensions");

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  const auto count = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i)
    for (std::ptrdiff_t j = i + 1; j < count; ++j) {
      const double v = fs_distance(states[i], states[j]);
      d(i, j) = v;
      d(j, i) = v;
    }
  return DistanceMatrix(std::move(d));
}

ClusterSet build_clusters(const DistanceMatrix& dist, double threshold) {
  if (!(threshold >= 0.0 && threshold <= kHalfPi))
    throw Error(ErrorKind::Validation,
                fmt::format("threshold {} outside [0, pi/2]", threshold));
  const std::size_t m = dist.size();
  ClusterSet out;
  out.threshold = threshold;
  out.sets = UnionFind(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (dist(i, j) <= threshold) out.sets.unite(i, j);

  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < m; ++i) by_root[out.sets.find(i)].push_back(i);

  for (auto& [root, members] : by_root) {
    double span = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        span = std::max(span, dist(members[a], members[b]));
    out.clusters.push_back({root, std::move(members), span});
  }
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.members[0] < b.members[0]; });
  return out;
}

std::optional<double> critical_threshold(const DistanceMatrix& dist) {
  const std::size_t m = dist.size();
  struct Edge {
    double w;
    std::uint32_t i, j;
  };
  std::vector<Edge> edges;
  edges.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      edges.push_back({dist(i, j), static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(j)});
  // Edges are generated in (row, column) order, so a stable sort keeps ties there.
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& a, const Edge& b) { return a.w < b.w; });

  UnionFind sets(m);
  std::vector<std::vector<std::size_t>> members(m);
  std::vector<double> span(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) members[i] = {i};
  double widest = 0.0;

  for (const Edge& e : edges) {
    const std::size_t ra = sets.find(e.i);
    const std::size_t rb = sets.find(e.j);
    if (ra != rb) {
      double merged = std::max(span[ra], span[rb]);
      for (std::size_t a : members[ra])
        for (std::size_t b : members[rb]) merged = std::max(merged, dist(a, b));
      const std::size_t root = *sets.unite(ra, rb);
      const std::size_t other = root == ra ? rb : ra;
      auto& keep = members[root];
      keep.insert(keep.end(), members[other].begin(), members[other].end());
      members[other].clear();
      members[other].shrink_to_fit();
      span[root] = merged;
      widest = std::max(widest, merged);
    }
    if (kHalfPi - widest <= e.w) return e.w;
  }
  return std::nullopt;
}

std::uint64_t percolation_sample_seed(std::uint64_t master_seed, int qubits, int points,
                                      int sample) {
  return substream_seed(master_seed,
                        {kind_tag("percolation-critical"), static_cast<std::uint64_t>(qubits),
                         static_cast<std::uint64_t>(points),
                         static_cast<std::uint64_t>(sample)});
}

std::optional<double> percolation_sample(int qubits, int points, std::uint64_t seed) {
  const Eigen::Index dim = qubit_dimension(qubits);
  Rng rng(seed);
  std::vector<StateVector> states;
  states.reserve(points);
  for (int i = 0; i < points; ++i) states.push_back(random_state(dim, rng));
  return critical_threshold(pairwise_distances(states, 1));
}

PercolationResult summarize_samples(std::vector<std::optional<double>> samples) {
  PercolationResult result;
  result.samples = std::move(samples);
  const auto total = static_cast<int>(result.samples.size());
  double sum = 0.0;
  int n = 0;
  for (const auto& v : result.samples)
    if (v) {
      sum += *v;
      ++n;
    }
  result.none_rate = total > 0 ? static_cast<double>(total - n) / total : 1.0;
  if (n == 0)
    throw Error(ErrorKind::ExperimentFailure,
                fmt::format("no sample reached a maximal span cluster (none-rate {})",
                            result.none_rate));
  result.mean = sum / n;
  double ss = 0.0;
  for (const auto& v : result.samples)
    if (v) ss += (*v - result.mean) * (*v - result.mean);
  result.std_error = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return result;
}

void validate_percolation_args(int qubits, int points, int samples) {
  if (samples < 1)
    throw Error(ErrorKind::Validation, fmt::format("samples={} must be >= 1", samples));
  if (qubits < 1 || qubits > 24)
    throw Error(ErrorKind::Validation, fmt::format("qubits={} out of range", qubits));
  if (points < 2)
    throw Error(ErrorKind::InsufficientPoints,
                fmt::format("need at least 2 points, got {}", points));
}

PercolationResult critical_threshold_experiment(int qubits, int points, int samples,
                                                std::uint64_t master_seed, int workers) {
  validate_percolation_args(qubits, points, samples);
  std::vector<std::optional<double>> values(samples);
  std::exception_ptr failure;
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int s = 0; s < samples; ++s) {
    try {
      values[s] = percolation_sample(
          qubits, points, percolation_sample_seed(master_seed, qubits, points, s));
    } catch (...) {
#pragma omp critical(qaccess_percolation_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return summarize_samples(std::move(values));
}

}  // namespace qaccess
