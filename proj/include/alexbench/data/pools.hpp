#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "alexbench/data/dataset.hpp"
#include "alexbench/random.hpp"

namespace alexbench::data {

struct LabeledEntry {
  SourceIndex index = 0;
  std::uint8_t label = 0;

  friend bool operator==(const LabeledEntry&, const LabeledEntry&) = default;
};

// Annotated instances, kept sorted by source index.
class LabeledPool {
 public:
  LabeledPool() = default;
  explicit LabeledPool(std::vector<LabeledEntry> entries);

  const std::vector<LabeledEntry>& entries() const { return entries_; }
  std::vector<SourceIndex> indices() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(SourceIndex index) const;

  void add(LabeledEntry entry);

  friend bool operator==(const LabeledPool&, const LabeledPool&) = default;

 private:
  std::vector<LabeledEntry> entries_;
};

// Unannotated instances. Holds indices only; labels are unreachable from here.
class UnlabeledPool {
 public:
  UnlabeledPool() = default;
  explicit UnlabeledPool(std::vector<SourceIndex> indices);

  const std::vector<SourceIndex>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(SourceIndex index) const;

  // Removes every listed index; each must be present.
  void remove(std::span<const SourceIndex> chosen);

  friend bool operator==(const UnlabeledPool&, const UnlabeledPool&) = default;

 private:
  std::vector<SourceIndex> indices_;
};

// Simulated annotator: reveals ground-truth labels at annotation time and
// moves the chosen indices from U to S.
class Oracle {
 public:
  explicit Oracle(std::span<const std::uint8_t> labels) : labels_(labels) {}

  void annotate(std::span<const SourceIndex> chosen, UnlabeledPool& unlabeled,
                LabeledPool& labeled) const;

 private:
  std::span<const std::uint8_t> labels_;
};

struct SeedSplit {
  LabeledPool labeled;
  UnlabeledPool unlabeled;
};

// Draws exactly q instances per class from `universe` (the whole train split
// when empty); everything else in the universe becomes unlabeled.
SeedSplit stratified_seed(std::span<const std::uint8_t> labels, std::span<const SourceIndex> universe,
                          std::size_t q, Rng& rng, std::uint8_t num_classes = kNumClasses);

SeedSplit stratified_seed(const RawDataset& dataset, std::size_t q, Rng& rng);

// Uniform subset of {0..total-1} of size min(limit, total), sorted. limit 0
// keeps everything.
std::vector<SourceIndex> subsample_universe(std::size_t total, std::size_t limit, Rng& rng);

}  // namespace alexbench::data
