#include "alexbench/strategies/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "alexbench/error.hpp"

namespace alexbench::strategies {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

using Fetch = std::function<MatrixXd(std::size_t start, std::size_t len)>;
constexpr std::size_t kChunk = 4096;

struct Nearest {
  std::size_t cluster = 0;
  double sq_dist = 0.0;
};

void assign_chunk(const MatrixXd& centroids, const MatrixXd& block, std::span<Nearest> out) {
  for (Index j = 0; j < block.cols(); ++j) {
    Nearest best{0, std::numeric_limits<double>::infinity()};
    for (Index c = 0; c < centroids.cols(); ++c) {
      const double d = (block.col(j) - centroids.col(c)).squaredNorm();
      if (d < best.sq_dist) best = {static_cast<std::size_t>(c), d};
    }
    out[static_cast<std::size_t>(j)] = best;
  }
}

KMeansResult run(std::size_t n, std::size_t dim, const Fetch& fetch, std::size_t clusters, Rng& rng,
                 std::size_t max_rounds) {
  if (clusters == 0 || n < clusters) {
    throw Error(ErrorCode::TooFewPoints, std::to_string(n) + " points for " + std::to_string(clusters) +
                                             " clusters");
  }
  const auto d = static_cast<Index>(dim);
  KMeansResult r;
  r.centroids.resize(d, static_cast<Index>(clusters));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < clusters; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(order[k], order[pick(rng)]);
    r.centroids.col(static_cast<Index>(k)) = fetch(order[k], 1).col(0);
  }

  std::vector<Nearest> nearest(n);
  r.assignment.assign(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t round = 0; round < max_rounds; ++round) {
    for (std::size_t start = 0; start < n; start += kChunk) {
      const std::size_t len = std::min(kChunk, n - start);
      assign_chunk(r.centroids, fetch(start, len), std::span(nearest).subspan(start, len));
    }
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i].cluster != r.assignment[i]) {
        changed = true;
        r.assignment[i] = nearest[i].cluster;
      }
    }
    if (!changed) {
      r.converged = true;
      break;
    }
    ++r.rounds;

    MatrixXd sums = MatrixXd::Zero(d, static_cast<Index>(clusters));
    std::vector<std::size_t> counts(clusters, 0);
    for (std::size_t start = 0; start < n; start += kChunk) {
      const std::size_t len = std::min(kChunk, n - start);
      const MatrixXd block = fetch(start, len);
      for (std::size_t j = 0; j < len; ++j) {
        sums.col(static_cast<Index>(r.assignment[start + j])) += block.col(static_cast<Index>(j));
        ++counts[r.assignment[start + j]];
      }
    }
    std::vector<std::size_t> donors(n);
    std::iota(donors.begin(), donors.end(), std::size_t{0});
    std::sort(donors.begin(), donors.end(), [&](std::size_t a, std::size_t b) {
      return nearest[a].sq_dist != nearest[b].sq_dist ? nearest[a].sq_dist > nearest[b].sq_dist : a < b;
    });
    std::size_t next_donor = 0;
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] > 0) {
        r.centroids.col(static_cast<Index>(c)) = sums.col(static_cast<Index>(c)) / static_cast<double>(counts[c]);
        continue;
      }
      // Empty: take the farthest point whose own cluster keeps at least one member.
      while (counts[r.assignment[donors[next_donor]]] <= 1) ++next_donor;
      const std::size_t donor = donors[next_donor++];
      --counts[r.assignment[donor]];
      r.assignment[donor] = c;
      counts[c] = 1;
      r.centroids.col(static_cast<Index>(c)) = fetch(donor, 1).col(0);
      nearest[donor] = {c, 0.0};
    }
    // Donor removals leave stale means for their old clusters; recompute those.
    sums.setZero();
    for (std::size_t start = 0; start < n; start += kChunk) {
      const std::size_t len = std::min(kChunk, n - start);
      const MatrixXd block = fetch(start, len);
      for (std::size_t j = 0; j < len; ++j) sums.col(static_cast<Index>(r.assignment[start + j])) += block.col(static_cast<Index>(j));
    }
    for (std::size_t c = 0; c < clusters; ++c) {
      r.centroids.col(static_cast<Index>(c)) = sums.col(static_cast<Index>(c)) / static_cast<double>(counts[c]);
    }

    double objective = 0.0;
    for (std::size_t start = 0; start < n; start += kChunk) {
      const std::size_t len = std::min(kChunk, n - start);
      const MatrixXd block = fetch(start, len);
      for (std::size_t j = 0; j < len; ++j) {
        objective += (block.col(static_cast<Index>(j)) - r.centroids.col(static_cast<Index>(r.assignment[start + j]))).squaredNorm();
      }
    }
    r.objective.push_back(objective);
  }
  return r;
}

}  // namespace

KMeansResult kmeans(const MatrixXd& points, std::size_t clusters, Rng& rng, std::size_t max_rounds) {
  return run(static_cast<std::size_t>(points.cols()), static_cast<std::size_t>(points.rows()),
             [&](std::size_t start, std::size_t len) -> MatrixXd {
               return points.middleCols(static_cast<Index>(start), static_cast<Index>(len));
             },
             clusters, rng, max_rounds);
}

KMeansResult kmeans(const data::FeatureTable& table, std::span<const data::SourceIndex> indices,
                    std::size_t clusters, Rng& rng, std::size_t max_rounds) {
  return run(indices.size(), table.dim(),
             [&](std::size_t start, std::size_t len) { return table.gather(indices.subspan(start, len)); },
             clusters, rng, max_rounds);
}

std::vector<std::size_t> nearest_centroid(const MatrixXd& centroids, const MatrixXd& points) {
  std::vector<Nearest> nearest(static_cast<std::size_t>(points.cols()));
  assign_chunk(centroids, points, nearest);
  std::vector<std::size_t> out(nearest.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = nearest[i].cluster;
  return out;
}

}  // namespace alexbench::strategies
