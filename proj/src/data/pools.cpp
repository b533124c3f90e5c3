#include "alexbench/data/pools.hpp"

#include <algorithm>
#include <numeric>

#include "alexbench/error.hpp"

namespace alexbench::data {

LabeledPool::LabeledPool(std::vector<LabeledEntry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const LabeledEntry& a, const LabeledEntry& b) { return a.index < b.index; });
  const auto dup = std::adjacent_find(entries_.begin(), entries_.end(),
                                      [](const auto& a, const auto& b) { return a.index == b.index; });
  if (dup != entries_.end()) {
    throw Error(ErrorCode::InvalidConfig, "duplicate labeled index " + std::to_string(dup->index));
  }
}

std::vector<SourceIndex> LabeledPool::indices() const {
  std::vector<SourceIndex> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.index);
  return out;
}

bool LabeledPool::contains(SourceIndex index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const LabeledEntry& e, SourceIndex i) { return e.index < i; });
  return it != entries_.end() && it->index == index;
}

void LabeledPool::add(LabeledEntry entry) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), entry.index,
                             [](const LabeledEntry& e, SourceIndex i) { return e.index < i; });
  if (it != entries_.end() && it->index == entry.index) {
    throw Error(ErrorCode::InvalidConfig, "index " + std::to_string(entry.index) + " already labeled");
  }
  entries_.insert(it, entry);
}

UnlabeledPool::UnlabeledPool(std::vector<SourceIndex> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw Error(ErrorCode::InvalidConfig, "duplicate unlabeled index");
  }
}

bool UnlabeledPool::contains(SourceIndex index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

void UnlabeledPool::remove(std::span<const SourceIndex> chosen) {
  std::vector<SourceIndex> sorted(chosen.begin(), chosen.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidConfig, "duplicate index in selection");
  }
  for (SourceIndex i : sorted) {
    if (!contains(i)) {
      throw Error(ErrorCode::InvalidConfig, "index " + std::to_string(i) + " not in unlabeled pool");
    }
  }
  std::vector<SourceIndex> kept;
  kept.reserve(indices_.size() - sorted.size());
  std::set_difference(indices_.begin(), indices_.end(), sorted.begin(), sorted.end(),
                      std::back_inserter(kept));
  indices_ = std::move(kept);
}

void Oracle::annotate(std::span<const SourceIndex> chosen, UnlabeledPool& unlabeled,
                      LabeledPool& labeled) const {
  unlabeled.remove(chosen);
  for (SourceIndex i : chosen) labeled.add({i, labels_[i]});
}

SeedSplit stratified_seed(std::span<const std::uint8_t> labels, std::span<const SourceIndex> universe,
                          std::size_t q, Rng& rng, std::uint8_t num_classes) {
  std::vector<SourceIndex> all;
  if (universe.empty()) {
    all.resize(labels.size());
    std::iota(all.begin(), all.end(), SourceIndex{0});
    universe = all;
  }
  std::vector<std::vector<SourceIndex>> by_class(num_classes);
  for (SourceIndex i : universe) by_class.at(labels[i]).push_back(i);

  std::vector<LabeledEntry> seed;
  seed.reserve(q * num_classes);
  for (std::uint8_t c = 0; c < num_classes; ++c) {
    auto& members = by_class[c];
    if (members.size() < q) {
      throw Error(ErrorCode::InsufficientClassCount,
                  "class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                      " instances, need " + std::to_string(q));
    }
    // Partial Fisher-Yates over the class members.
    for (std::size_t k = 0; k < q; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, members.size() - 1);
      std::swap(members[k], members[pick(rng)]);
      seed.push_back({members[k], c});
    }
  }
  LabeledPool labeled(std::move(seed));
  std::vector<SourceIndex> rest;
  rest.reserve(universe.size() - labeled.size());
  for (SourceIndex i : universe) {
    if (!labeled.contains(i)) rest.push_back(i);
  }
  return {std::move(labeled), UnlabeledPool(std::move(rest))};
}

SeedSplit stratified_seed(const RawDataset& dataset, std::size_t q, Rng& rng) {
  return stratified_seed(dataset.labels, {}, q, rng);
}

std::vector<SourceIndex> subsample_universe(std::size_t total, std::size_t limit, Rng& rng) {
  std::vector<SourceIndex> all(total);
  std::iota(all.begin(), all.end(), SourceIndex{0});
  if (limit == 0 || limit >= total) return all;
  for (std::size_t k = 0; k < limit; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, total - 1);
    std::swap(all[k], all[pick(rng)]);
  }
  all.resize(limit);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace alexbench::data
