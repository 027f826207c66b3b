#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "qaccess/error.hpp"
#include "qaccess/percolation.hpp"
#include "qaccess/reference.hpp"
#include "qaccess/walk.hpp"
#include "stats.hpp"

using namespace qaccess;

namespace {

std::vector<StateVector> haar_states(int m, Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<StateVector> s;
  for (int i = 0; i < m; ++i) s.push_back(random_state(dim, rng));
  return s;
}

DistanceMatrix matrix_of(std::initializer_list<std::initializer_list<double>> rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd d(m, m);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) d(i, j++) = v;
    ++i;
  }
  return DistanceMatrix(d);
}

// Label of each point under the transitive closure of d <= threshold,
// computed by Floyd-Warshall style reachability.
std::vector<std::size_t> closure_labels(const DistanceMatrix& d, double threshold) {
  const std::size_t m = d.size();
  std::vector<std::vector<bool>> reach(m, std::vector<bool>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) reach[i][j] = i == j || d(i, j) <= threshold;
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  std::vector<std::size_t> label(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (reach[i][j]) {
        label[i] = j;
        break;
      }
  return label;
}

std::vector<double> sorted_weights(const DistanceMatrix& d) {
  std::vector<double> w;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) w.push_back(d(i, j));
  std::sort(w.begin(), w.end());
  return w;
}

// Rebuilds the clusters from scratch at every edge weight.
std::optional<double> brute_force_threshold(const DistanceMatrix& d) {
  for (double w : sorted_weights(d))
    if (kHalfPi - build_clusters(d, w).max_span() <= w) return w;
  return std::nullopt;
}

double as_value(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::infinity();
}

}  // namespace

TEST_CASE("UnionFind") {
  UnionFind uf(6);
  CHECK(uf.unite(0, 1).has_value());
  CHECK(uf.unite(2, 3).has_value());
  CHECK_FALSE(uf.unite(1, 0).has_value());
  CHECK(uf.unite(1, 3).has_value());
  CHECK(uf.find(0) == uf.find(2));
  CHECK(uf.find(4) != uf.find(5));
  for (std::size_t i = 0; i < 6; ++i) CHECK(uf.find(uf.find(i)) == uf.find(i));
}

TEST_CASE("DistanceMatrix validation") {
  CHECK_THROWS_AS(DistanceMatrix(Eigen::MatrixXd::Zero(2, 3)), Error);
  CHECK_THROWS_AS(matrix_of({{0.0, 0.1}, {0.2, 0.0}}), Error);
  CHECK_THROWS_AS(matrix_of({{0.1, 0.1}, {0.1, 0.0}}), Error);
  CHECK_THROWS_AS(matrix_of({{0.0, 2.0}, {2.0, 0.0}}), Error);
}

TEST_CASE("pairwise_distances") {
  const auto s = haar_states(6, 8, 1);
  const auto d = pairwise_distances(s);
  for (std::size_t i = 0; i < 6; ++i) CHECK(d(i, i) == 0.0);

  std::vector<StateVector> twins{s[0], s[0]};
  CHECK(pairwise_distances(twins)(0, 1) <= 1e-12);

  CHECK_THROWS_AS(pairwise_distances(std::vector<StateVector>{s[0]}), Error);
  try {
    pairwise_distances(std::vector<StateVector>{});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientPoints);
  }
  Rng rng(2);
  std::vector<StateVector> mixed{s[0], random_state(4, rng)};
  CHECK_THROWS_AS(pairwise_distances(mixed), Error);

  const auto ref = reference::pairwise_distances(s);
  CHECK((ref.matrix() - d.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(pairwise_distances(s, 1).matrix() == pairwise_distances(s, 3).matrix());
}

TEST_CASE("pairwise_distances: Haar overlaps at D = 128") {
  const auto d = pairwise_distances(haar_states(50, 128, 3));
  std::vector<double> c2;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) c2.push_back(std::pow(std::cos(d(i, j)), 2));
  const auto [m, se] = qaccess::testing::mean_se(c2);
  CHECK(std::abs(m - 1.0 / 128) <= 3 * se);
}

TEST_CASE("build_clusters examples") {
  const auto d = pairwise_distances(haar_states(7, 16, 4));
  const auto none = build_clusters(d, 0.0);
  CHECK(none.clusters.size() == 7);
  for (const auto& c : none.clusters) CHECK(c.span == 0.0);

  const auto all = build_clusters(d, kHalfPi);
  REQUIRE(all.clusters.size() == 1);
  CHECK(all.clusters[0].members.size() == 7);
  CHECK(all.clusters[0].span == d.matrix().maxCoeff());

  const auto chain = build_clusters(matrix_of({{0, 0.1, 0.19}, {0.1, 0, 0.1}, {0.19, 0.1, 0}}), 0.15);
  REQUIRE(chain.clusters.size() == 1);
  CHECK(chain.clusters[0].members == std::vector<std::size_t>{0, 1, 2});
  CHECK(chain.clusters[0].span == 0.19);

  CHECK_THROWS_AS(build_clusters(d, -0.1), Error);
  CHECK_THROWS_AS(build_clusters(d, 1.6), Error);
}

TEST_CASE("build_clusters equals the transitive closure (M <= 12, 100 seeds)") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const int m = 2 + static_cast<int>(seed % 11);
    const auto d = pairwise_distances(haar_states(m, 2 + seed % 3, 1000 + seed));
    const double threshold = std::uniform_real_distribution<double>(0.3, 1.5)(rng);
    const auto cs = build_clusters(d, threshold);
    const auto label = closure_labels(d, threshold);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j)
        CHECK((cs.cluster_of(i) == cs.cluster_of(j)) == (label[i] == label[j]));
    for (const auto& c : cs.clusters) {
      double span = 0.0;
      for (auto a : c.members)
        for (auto b : c.members) span = std::max(span, d(a, b));
      CHECK(c.span == span);
    }
  }
}

TEST_CASE("critical_threshold examples") {
  CHECK(critical_threshold(matrix_of({{0, 1.5}, {1.5, 0}})) == 1.5);
  CHECK_FALSE(critical_threshold(matrix_of({{0, 0.5}, {0.5, 0}})).has_value());
  // The 0.6 edge already makes a cluster of span 0.9, but pi/2 - 0.9 = 0.67
  // exceeds 0.6; the condition first holds at the 0.9 edge.
  CHECK(critical_threshold(matrix_of({{0, 0.5, 0.9}, {0.5, 0, 0.6}, {0.9, 0.6, 0}})) == 0.9);
}

TEST_CASE("critical_threshold equals a from-scratch sweep (M <= 50)") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int m = 2 + static_cast<int>(seed % 49);
    const auto d = pairwise_distances(haar_states(m, 2 << (seed % 4), 2000 + seed));
    const auto fast = critical_threshold(d);
    CHECK(as_value(fast) == as_value(brute_force_threshold(d)));
    if (fast) {
      const auto w = sorted_weights(d);
      CHECK(std::binary_search(w.begin(), w.end(), *fast));
    }
    // The widest span never shrinks as the threshold grows.
    double prev = 0.0;
    for (double w : sorted_weights(d)) {
      const double span = build_clusters(d, w).max_span();
      CHECK(span >= prev);
      prev = span;
    }
  }
}

TEST_CASE("critical_threshold: adding a point never raises it") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto states = haar_states(15, 4, 3000 + seed);
    const double before = as_value(critical_threshold(pairwise_distances(states)));
    states.push_back(haar_states(1, 4, 4000 + seed)[0]);
    CHECK(as_value(critical_threshold(pairwise_distances(states))) <= before);
  }
}

TEST_CASE("critical_threshold_experiment: aggregation and errors") {
  const auto r = critical_threshold_experiment(3, 10, 20, 5);
  std::vector<double> v;
  for (const auto& s : r.samples)
    if (s) v.push_back(*s);
  REQUIRE_FALSE(v.empty());
  CHECK(r.mean >= *std::min_element(v.begin(), v.end()));
  CHECK(r.mean <= *std::max_element(v.begin(), v.end()));
  CHECK(r.none_rate == doctest::Approx(1.0 - v.size() / 20.0));

  try {
    summarize_samples({std::nullopt, std::nullopt});
    FAIL("expected an experiment failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ExperimentFailure);
    CHECK(std::string(e.what()).find("none-rate 1") != std::string::npos);
  }
  CHECK_THROWS_AS(critical_threshold_experiment(3, 1, 5, 1), Error);
  CHECK_THROWS_AS(critical_threshold_experiment(3, 5, 0, 1), Error);
}

TEST_CASE("critical_threshold_experiment: worker count and reference agree") {
  const auto a = critical_threshold_experiment(5, 30, 12, 6, 1);
  const auto b = critical_threshold_experiment(5, 30, 12, 6, 3);
  const auto c = reference::critical_threshold_experiment(5, 30, 12, 6);
  CHECK(a.samples == b.samples);
  REQUIRE(a.samples.size() == c.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    REQUIRE(a.samples[i].has_value() == c.samples[i].has_value());
    if (a.samples[i]) CHECK(*a.samples[i] == doctest::Approx(*c.samples[i]).epsilon(1e-12));
  }
}

TEST_CASE("critical_threshold_experiment: N = 7, M = 200 against the scaling law") {
  const double dim = 128.0;
  const double a = 1.0005 - 0.33 * std::pow(dim, -0.47);
  const double b = 0.182 * std::pow(dim, -0.522);
  const double expected = kHalfPi * a * std::pow(200.0, -b);
  const auto r = critical_threshold_experiment(7, 200, 30, 7);
  INFO("mean ", r.mean, " expected ", expected);
  CHECK(r.mean == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("critical_threshold_experiment: large D approaches pi/2") {
  const auto r = critical_threshold_experiment(14, 50, 30, 8);
  CHECK(r.mean >= 0.95 * kHalfPi);
}
