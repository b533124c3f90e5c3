#pragma once

// Brute-force reference rankings for the selection strategies. They share no
// code with the library: full sorts on (score, id) pairs and explicit loops.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace testing_support {

struct Scored {
  double score;
  std::uint32_t id;
};

// Ids of the `count` smallest (or largest) scores, smaller id first on ties.
inline std::vector<std::uint32_t> rank_ids(std::vector<Scored> all, std::size_t count, bool largest) {
  std::sort(all.begin(), all.end(), [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return largest ? a.score > b.score : a.score < b.score;
    return a.id < b.id;
  });
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < count && i < all.size(); ++i) out.push_back(all[i].id);
  return out;
}

inline double max_of(const Eigen::VectorXd& p) {
  double m = p[0];
  for (Eigen::Index i = 1; i < p.size(); ++i) m = p[i] > m ? p[i] : m;
  return m;
}

inline double margin_of(const Eigen::VectorXd& p) {
  std::vector<double> v(p.data(), p.data() + p.size());
  std::sort(v.begin(), v.end(), std::greater<>());
  return v[0] - v[1];
}

inline std::size_t first_argmax(const Eigen::VectorXd& p) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i) {
    if (p[i] > p[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  }
  return best;
}

// Instance world for the oracles: every instance is a 1 x d image whose
// explanation under patch size 1 is weights[class] (*) pixels.
struct World {
  std::map<std::uint32_t, Eigen::VectorXd> pixels;     // normalised, length d
  std::map<std::uint32_t, Eigen::VectorXd> posterior;  // length c
  Eigen::MatrixXd weights;                             // c x d
};

inline std::vector<double> oracle_distribution(const World& w, std::uint32_t id) {
  const auto& x = w.pixels.at(id);
  const std::size_t c = first_argmax(w.posterior.at(id));
  std::vector<double> out(static_cast<std::size_t>(x.size()));
  double total = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[static_cast<std::size_t>(i)] = std::abs(w.weights(static_cast<Eigen::Index>(c), i) * x[i]) + 1e-8;
    total += out[static_cast<std::size_t>(i)];
  }
  for (auto& v : out) v /= total;
  return out;
}

inline double oracle_kld(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::log(p[i] / q[i]);
  return s;
}

inline std::vector<std::uint32_t> oracle_uncertainty(const World& w, const std::vector<std::uint32_t>& u,
                                                     std::size_t b) {
  std::vector<Scored> s;
  for (auto id : u) s.push_back({max_of(w.posterior.at(id)), id});
  return rank_ids(s, b, false);
}

inline std::vector<std::uint32_t> oracle_margin(const World& w, const std::vector<std::uint32_t>& u, std::size_t b) {
  std::vector<Scored> s;
  for (auto id : u) s.push_back({margin_of(w.posterior.at(id)), id});
  return rank_ids(s, b, false);
}

inline std::vector<std::uint32_t> oracle_alex(const World& w, const std::vector<std::uint32_t>& u,
                                              const std::vector<std::uint32_t>& labeled, std::size_t k,
                                              std::size_t b) {
  const auto candidates = oracle_uncertainty(w, u, std::min(k, u.size()));
  std::vector<Scored> s;
  for (auto id : candidates) {
    const auto p = oracle_distribution(w, id);
    double total = 0;
    for (auto l : labeled) total += oracle_kld(p, oracle_distribution(w, l));
    s.push_back({total / static_cast<double>(labeled.size()), id});
  }
  return rank_ids(s, b, true);
}

inline std::vector<std::uint32_t> oracle_density(const World& w, const Eigen::MatrixXd& centroids,
                                                 const std::vector<std::uint32_t>& u,
                                                 const std::vector<std::uint32_t>& labeled, std::size_t b) {
  auto dist = [&](const Eigen::VectorXd& x, Eigen::Index c) {
    double s = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += (x[i] - centroids(i, c)) * (x[i] - centroids(i, c));
    return std::sqrt(s);
  };
  std::vector<bool> occupied(static_cast<std::size_t>(centroids.cols()), false);
  for (auto l : labeled) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < centroids.cols(); ++c) {
      if (dist(w.pixels.at(l), c) < dist(w.pixels.at(l), best)) best = c;
    }
    occupied[static_cast<std::size_t>(best)] = true;
  }
  std::vector<Scored> s;
  for (auto id : u) {
    double best = INFINITY;
    for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
      if (occupied[static_cast<std::size_t>(c)]) best = std::min(best, dist(w.pixels.at(id), c));
    }
    s.push_back({best, id});
  }
  return rank_ids(s, b, true);
}

}  // namespace testing_support
