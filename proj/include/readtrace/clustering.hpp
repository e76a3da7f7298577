#pragma once

// Z-normalization and Ward agglomerative clustering.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "readtrace/core.hpp"

namespace readtrace {

/// Centers each column and scales it to unit sample standard deviation.
/// Throws naming the first constant column (names optional).
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> znorm(
    const Eigen::MatrixBase<Derived>& m, std::span<const std::string> names = {}) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() < 2) throw Error("znorm needs at least two rows");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const Scalar mean = m.col(j).mean();
    const Scalar sd = std::sqrt((m.col(j).array() - mean).square().sum() / Scalar(m.rows() - 1));
    if (!(sd > Scalar(0))) {
      const std::string name =
          static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)] : "#" + std::to_string(j);
      throw Error("cannot z-normalize constant feature " + name);
    }
    out.col(j) = (m.col(j).array() - mean) / sd;
  }
  return out;
}

/// One agglomeration step. Leaves are 0..n-1 and the i-th merge creates node
/// n+i (the usual linkage-matrix convention). `height` is the Lance-Williams
/// Ward dissimilarity on squared Euclidean distances, i.e. twice the increase
/// in within-cluster sum of squares.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0;
  std::size_t size = 0;
};

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<int> labels;          // per row, in [0, k), numbered by descending size
  std::vector<std::size_t> sizes;   // per cluster
  Eigen::MatrixXd centroids;        // k x features
  std::vector<Merge> merges;        // full tree, n-1 merges
};

/// Greedy Ward agglomeration; equal costs go to the lowest (i, j) pair,
/// where a cluster is indexed by its smallest member row. The tree is cut
/// after n-k merges.
ClusterAssignment ward_cluster(const Eigen::MatrixXd& points, std::size_t k);

/// Sum over clusters of squared distances to the cluster mean.
double within_cluster_ss(const Eigen::MatrixXd& points, std::span<const int> labels);

}  // namespace readtrace
