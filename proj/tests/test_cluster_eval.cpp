#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <random>

#include "kufs/feature_matrix.hpp"
#include "kufs/kmeans.hpp"
#include "kufs/metrics.hpp"
#include "test_support.hpp"

using namespace kufs;

namespace {

ClusterLabels labels_of(std::vector<int> v, int k) { return ClusterLabels{std::move(v), k}; }

/// Exhaustive minimum assignment cost over all k! permutations.
double factorial_min_cost(const Eigen::MatrixXd& cost) {
  const int k = static_cast<int>(cost.rows());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0;
    for (int i = 0; i < k; ++i) total += cost(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("lloyd_kmeans with k = 1 gives the column mean in one pass") {
  const Eigen::MatrixXd x = kufs_test::random_matrix(3, 20, 44);
  const auto res = lloyd_kmeans(x, 1, 0);
  CHECK((res.centroids.col(0) - x.rowwise().mean()).norm() <= 1e-12);
  double expect = 0;
  for (Index j = 0; j < 20; ++j) expect += (x.col(j) - x.rowwise().mean()).squaredNorm();
  CHECK(res.objective == doctest::Approx(expect).epsilon(1e-10));
  CHECK(std::all_of(res.labels.labels.begin(), res.labels.labels.end(),
                    [](int v) { return v == 0; }));
}

TEST_CASE("lloyd_kmeans separates two tight far-apart groups for any seed") {
  Eigen::MatrixXd x(2, 8);
  x << 0.0, 0.1, -0.1, 0.05, 50.0, 50.1, 49.9, 50.05,  //
      0.0, 0.1, 0.05, -0.1, 50.0, 49.9, 50.1, 50.05;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto res = lloyd_kmeans(x, 2, seed);
    const int left = res.labels.labels[0];
    for (int j = 0; j < 4; ++j) CHECK(res.labels.labels[j] == left);
    for (int j = 4; j < 8; ++j) CHECK(res.labels.labels[j] == 1 - left);
  }
}

TEST_CASE("lloyd objective is nonincreasing and bounded by the spectral relaxation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd x = kufs_test::random_matrix(4, 40, 800 + seed);
    const int k = 3;
    const auto res = lloyd_kmeans(x, k, seed);
    for (std::size_t i = 1; i < res.objective_history.size(); ++i) {
      CHECK(res.objective_history[i] <= res.objective_history[i - 1] + 1e-9);
    }
    // J_k >= Tr(X^T X) - sum of top-k eigenvalues of X X^T
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x * x.transpose());
    double bound = (x.transpose() * x).trace();
    for (int j = 0; j < k; ++j) bound -= es.eigenvalues()(x.rows() - 1 - j);
    CHECK(res.objective >= bound - 1e-8);
  }
}

TEST_CASE("lloyd_kmeans is seeded and validates k") {
  const Eigen::MatrixXd x = kufs_test::random_matrix(3, 12, 7);
  const auto a = lloyd_kmeans(x, 3, 5);
  const auto b = lloyd_kmeans(x, 3, 5);
  CHECK(a.labels.labels == b.labels.labels);
  CHECK(a.objective == b.objective);
  CHECK_THROWS_AS(lloyd_kmeans(x, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(lloyd_kmeans(x, 13, 1), std::invalid_argument);
}

TEST_CASE("lloyd_kmeans repairs empty clusters") {
  // duplicated columns make duplicate centroid picks likely; k = n forces
  // singleton clusters in the end
  Eigen::MatrixXd x(1, 4);
  x << 0, 0, 10, 20;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto res = lloyd_kmeans(x, 3, seed);
    std::vector<int> counts(3, 0);
    for (int label : res.labels.labels) counts[label]++;
    CHECK(std::all_of(counts.begin(), counts.end(), [](int c) { return c > 0; }));
  }
}

TEST_CASE("hungarian_assignment on identity-favoring costs") {
  Eigen::MatrixXd cost = Eigen::MatrixXd::Ones(3, 3);
  cost.diagonal().setZero();
  const auto perm = hungarian_assignment(cost);
  CHECK(perm == std::vector<Index>{0, 1, 2});
}

TEST_CASE("hungarian_assignment two-by-two case") {
  Eigen::MatrixXd cost(2, 2);
  cost << 1, 2, 2, 1;
  const auto perm = hungarian_assignment(cost);
  CHECK(perm == std::vector<Index>{0, 1});
}

TEST_CASE("hungarian_assignment equals factorial enumeration on random 5x5") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Eigen::MatrixXd cost = kufs_test::random_matrix(5, 5, 600 + seed);
    const auto perm = hungarian_assignment(cost);
    double total = 0;
    std::vector<char> used(5, 0);
    for (int i = 0; i < 5; ++i) {
      total += cost(i, perm[i]);
      used[perm[i]] = 1;
    }
    CHECK(std::all_of(used.begin(), used.end(), [](char c) { return c == 1; }));
    CHECK(total == doctest::Approx(factorial_min_cost(cost)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hungarian_assignment(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("clustering_accuracy is exact on relabelings") {
  const auto truth = labels_of({0, 0, 1, 1, 2, 2}, 3);
  CHECK(clustering_accuracy(truth, truth) == 1.0);
  const auto relabeled = labels_of({2, 2, 0, 0, 1, 1}, 3);
  CHECK(clustering_accuracy(relabeled, truth) == 1.0);
}

TEST_CASE("clustering_accuracy on the crossed pairs example") {
  const auto truth = labels_of({0, 0, 1, 1}, 2);
  const auto pred = labels_of({0, 1, 0, 1}, 2);
  CHECK(clustering_accuracy(pred, truth) == 0.5);
}

TEST_CASE("clustering_accuracy pads different cluster counts") {
  const auto truth = labels_of({0, 0, 1, 1}, 2);
  const auto pred = labels_of({0, 1, 2, 2}, 3);
  CHECK(clustering_accuracy(pred, truth) == 0.75);  // match 2->1, 0->0
  CHECK_THROWS_AS(clustering_accuracy(labels_of({0}, 1), truth), std::invalid_argument);
}

TEST_CASE("nmi is exactly 1 on relabelings and 0 on independent partitions") {
  const auto truth = labels_of({0, 0, 1, 1}, 2);
  CHECK(normalized_mutual_info(truth, truth) == 1.0);
  CHECK(normalized_mutual_info(labels_of({1, 1, 0, 0}, 2), truth) == 1.0);
  const auto pred = labels_of({0, 1, 0, 1}, 2);
  CHECK(std::abs(normalized_mutual_info(pred, truth)) <= 1e-12);
}

TEST_CASE("nmi zero-entropy conventions") {
  const auto constant = labels_of({0, 0, 0, 0}, 1);
  const auto balanced = labels_of({0, 0, 1, 1}, 2);
  CHECK(normalized_mutual_info(constant, balanced) == 0.0);
  CHECK(normalized_mutual_info(balanced, constant) == 0.0);
  CHECK(normalized_mutual_info(constant, constant) == 1.0);
}

TEST_CASE("nmi stays in [0,1] and is symmetric on random labelings") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> a(30), b(30);
    for (auto& v : a) v = static_cast<int>(rng() % 4);
    for (auto& v : b) v = static_cast<int>(rng() % 3);
    const auto la = labels_of(a, 4);
    const auto lb = labels_of(b, 3);
    const double ab = normalized_mutual_info(la, lb);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab == doctest::Approx(normalized_mutual_info(lb, la)).epsilon(1e-12));
  }
}

TEST_CASE("acc and nmi are invariant under relabeling permutations") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> a(24), b(24);
    for (auto& v : a) v = static_cast<int>(rng() % 3);
    for (auto& v : b) v = static_cast<int>(rng() % 3);
    const auto la = labels_of(a, 3);
    const auto lb = labels_of(b, 3);
    // permute pred's labels with the 3-cycle
    std::vector<int> permuted(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) permuted[i] = (a[i] + 1) % 3;
    const auto lp = labels_of(permuted, 3);
    CHECK(clustering_accuracy(la, lb) == clustering_accuracy(lp, lb));
    CHECK(normalized_mutual_info(la, lb) == normalized_mutual_info(lp, lb));
  }
}

TEST_CASE("evaluate_selection with one repeat has zero std") {
  ToySpec spec;
  spec.seed = 42;
  const auto toy = generate_toy(spec);
  const auto x = standardize_rows(toy.data);
  const auto rep = evaluate_selection(x, toy.informative_rows, toy.labels, 1, 42);
  CHECK(rep.acc_std == 0.0);
  CHECK(rep.nmi_std == 0.0);
  CHECK(rep.repeats == 1);
}

TEST_CASE("evaluate_selection recovers the planted partition perfectly") {
  ToySpec spec;
  spec.seed = 42;
  const auto toy = generate_toy(spec);
  const auto x = standardize_rows(toy.data);
  const auto rep = evaluate_selection(x, toy.informative_rows, toy.labels, 20, 42);
  CHECK(rep.acc_mean == 1.0);
  CHECK(rep.nmi_mean == 1.0);
  CHECK(rep.acc_std == 0.0);
  CHECK(rep.nmi_std == 0.0);
}

TEST_CASE("evaluate_selection is deterministic and computes exact mean and std") {
  ToySpec spec;
  spec.seed = 11;
  spec.cluster_separation = 1.0;  // hard instance so scores vary
  const auto toy = generate_toy(spec);
  const auto x = standardize_rows(toy.data);
  const auto a = evaluate_selection(x, IndexList{0, 2}, toy.labels, 10, 7);
  const auto b = evaluate_selection(x, IndexList{0, 2}, toy.labels, 10, 7);
  CHECK(a.acc_mean == b.acc_mean);
  CHECK(a.acc_std == b.acc_std);
  CHECK(a.nmi_mean == b.nmi_mean);
  CHECK(a.nmi_std == b.nmi_std);

  // independent recomputation from per-repeat scores
  Matrix<double> sub(2, x.n());
  sub.row(0) = x.values.row(0);
  sub.row(1) = x.values.row(2);
  std::vector<double> accs;
  for (int r = 0; r < 10; ++r) {
    const auto km = lloyd_kmeans(sub, toy.labels.k, 7 + static_cast<std::uint64_t>(r));
    accs.push_back(clustering_accuracy(km.labels, toy.labels));
  }
  double mean = 0;
  for (double v : accs) mean += v;
  mean /= 10.0;
  double var = 0;
  for (double v : accs) var += (v - mean) * (v - mean);
  CHECK(a.acc_mean == doctest::Approx(mean).epsilon(1e-15));
  CHECK(a.acc_std == doctest::Approx(std::sqrt(var / 10.0)).epsilon(1e-15));
}

TEST_CASE("evaluate_selection validates its inputs") {
  ToySpec spec;
  const auto toy = generate_toy(spec);
  const auto x = standardize_rows(toy.data);
  CHECK_THROWS_AS(evaluate_selection(x, toy.informative_rows, toy.labels, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate_selection(x, IndexList{99}, toy.labels, 5, 1),
                  std::invalid_argument);
  ClusterLabels short_labels{{0, 1}, 2};
  CHECK_THROWS_AS(evaluate_selection(x, toy.informative_rows, short_labels, 5, 1),
                  std::invalid_argument);
}
