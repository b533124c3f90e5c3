#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "alexbench/data/dataset.hpp"
#include "alexbench/random.hpp"

namespace alexbench::strategies {

struct KMeansResult {
  Eigen::MatrixXd centroids;             // d x clusters
  std::vector<std::size_t> assignment;   // per point
  std::vector<double> objective;         // sum of squared distances after each round
  std::size_t rounds = 0;
  bool converged = false;                // assignments stopped changing before `max_rounds`
};

// Lloyd iterations from a random-instance initialisation. An empty cluster is
// reseeded with the point farthest from its current centroid.
KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t clusters, Rng& rng, std::size_t max_rounds);

// Same, streaming the points from a feature table in chunks.
KMeansResult kmeans(const data::FeatureTable& table, std::span<const data::SourceIndex> indices,
                    std::size_t clusters, Rng& rng, std::size_t max_rounds);

// Index of the nearest centroid for each column of `points` (ties: lowest index).
std::vector<std::size_t> nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& points);

}  // namespace alexbench::strategies
