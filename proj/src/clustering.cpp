#include "readtrace/clustering.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace readtrace {

ClusterAssignment ward_cluster(const Eigen::MatrixXd& points, std::size_t k) {
  const std::size_t n = static_cast<std::size_t>(points.rows());
  if (k < 1) throw Error("ward_cluster: k must be at least 1");
  if (k > n) throw Error("ward_cluster: k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " rows");
  if (!points.allFinite()) throw Error("ward_cluster: non-finite input");

  // Slot i holds the cluster whose smallest member is row i.
  Eigen::MatrixXd dist(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      dist(i, j) = (points.row(i) - points.row(j)).squaredNorm();
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> node(n);
  std::iota(node.begin(), node.end(), 0);
  std::vector<bool> active(n, true);
  std::vector<int> slot_of(n);
  std::iota(slot_of.begin(), slot_of.end(), 0);

  ClusterAssignment out;
  out.k = k;
  std::vector<int> cut_slot;

  for (std::size_t step = 0; step + 1 < n; ++step) {
    if (step == n - k) cut_slot = slot_of;
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && dist(i, j) < best) {
          best = dist(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    out.merges.push_back({node[bi], node[bj], best, size[bi] + size[bj]});

    const double ni = static_cast<double>(size[bi]);
    const double nj = static_cast<double>(size[bj]);
    for (std::size_t m = 0; m < n; ++m) {
      if (!active[m] || m == bi || m == bj) continue;
      const double nm = static_cast<double>(size[m]);
      const double d = ((ni + nm) * dist(bi, m) + (nj + nm) * dist(bj, m) - nm * dist(bi, bj)) / (ni + nj + nm);
      dist(bi, m) = d;
      dist(m, bi) = d;
    }
    size[bi] += size[bj];
    active[bj] = false;
    node[bi] = n + step;
    for (auto& s : slot_of)
      if (s == static_cast<int>(bj)) s = static_cast<int>(bi);
  }
  if (cut_slot.empty()) cut_slot = slot_of;  // k == 1

  // Number clusters by descending size, then by smallest member.
  std::map<int, std::size_t> counts;
  for (int s : cut_slot) ++counts[s];
  std::vector<std::pair<int, std::size_t>> order(counts.begin(), counts.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::map<int, int> id_of;
  for (std::size_t c = 0; c < order.size(); ++c) {
    id_of[order[c].first] = static_cast<int>(c);
    out.sizes.push_back(order[c].second);
  }
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = id_of[cut_slot[i]];

  out.centroids = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), points.cols());
  for (std::size_t i = 0; i < n; ++i) out.centroids.row(out.labels[i]) += points.row(static_cast<Eigen::Index>(i));
  for (std::size_t c = 0; c < k; ++c) out.centroids.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(out.sizes[c]);
  return out;
}

double within_cluster_ss(const Eigen::MatrixXd& points, std::span<const int> labels) {
  if (static_cast<std::size_t>(points.rows()) != labels.size()) throw Error("labels do not match rows");
  std::map<int, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(static_cast<Eigen::Index>(i));
  double total = 0;
  for (const auto& [label, rows] : members) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(points.cols());
    for (auto r : rows) mean += points.row(r);
    mean /= static_cast<double>(rows.size());
    for (auto r : rows) total += (points.row(r) - mean).squaredNorm();
  }
  return total;
}

}  // namespace readtrace
