#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace csp {

/// Indices are 1-based throughout: a structure over n covers {1, ..., n}.
using Block = std::vector<int>;

/// A partition of [n]: disjoint, nonempty blocks whose union is [n].
/// Blocks are kept sorted internally and ordered by least element, which is
/// also the order of appearance.
class Partition {
 public:
  Partition() = default;

  /// Validates and canonicalizes. Throws std::invalid_argument if the blocks
  /// are not a partition of [n].
  Partition(int n, std::vector<Block> blocks);

  int n() const { return n_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }

  /// Block sizes in canonical (appearance) order.
  std::vector<int> block_sizes() const;

  /// z_i in 1..K: the order-of-appearance label of each index.
  std::vector<int> appearance_labels() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  int n_ = 0;
  std::vector<Block> blocks_;
};

/// A feature allocation of [n]: a multiset of nonempty subsets of [n].
/// Duplicate blocks are stored once with a multiplicity. Unique blocks are
/// ordered by (size descending, lexicographic).
class FeatureAllocation {
 public:
  struct Feature {
    Block indices;
    int multiplicity = 1;
    friend bool operator==(const Feature&, const Feature&) = default;
  };

  FeatureAllocation() = default;

  /// Blocks may repeat; repeats are folded into multiplicities. Throws
  /// std::invalid_argument for empty blocks, out-of-range or repeated
  /// indices within a block.
  FeatureAllocation(int n, std::vector<Block> blocks);

  int n() const { return n_; }
  const std::vector<Feature>& features() const { return features_; }

  /// K: number of blocks counted with multiplicity.
  int num_blocks() const;

  /// H: number of distinct blocks.
  int num_unique() const { return static_cast<int>(features_.size()); }

  /// All blocks, duplicates repeated, canonical order.
  std::vector<Block> blocks() const;

  /// Sizes of all blocks with multiplicity, descending.
  std::vector<int> block_sizes() const;

  friend bool operator==(const FeatureAllocation&, const FeatureAllocation&) = default;

 private:
  int n_ = 0;
  std::vector<Feature> features_;
};

/// A feature allocation together with an ordering of its K blocks.
class OrderedFeatureAllocation {
 public:
  /// order[j] is the position (0-based, into base.blocks()) of the j-th block.
  /// Throws std::invalid_argument unless order is a permutation of 0..K-1.
  OrderedFeatureAllocation(FeatureAllocation base, std::vector<int> order);

  const FeatureAllocation& base() const { return base_; }
  const std::vector<int>& order() const { return order_; }
  std::vector<Block> ordered_blocks() const;

 private:
  FeatureAllocation base_;
  std::vector<int> order_;
};

struct Multiplicities {
  int unique = 0;         // H
  std::vector<int> rho;   // descending, sums to K
};

Multiplicities multiplicities(const FeatureAllocation& f);

/// Restriction to [m]: intersect every block with [m] and drop empties.
/// Throws std::domain_error if m > n or m < 0.
Partition restrict(const Partition& p, int m);
FeatureAllocation restrict(const FeatureAllocation& f, int m);

/// True iff every element restricts to its predecessor.
bool check_consistency(std::span<const Partition> seq);
bool check_consistency(std::span<const FeatureAllocation> seq);

/// Unvalidated partition candidate, as read from an external source.
struct RawPartition {
  int n = 0;
  std::vector<Block> blocks;
};

bool is_partition_of(int n, const std::vector<Block>& blocks);

/// Consistency over unvalidated records: false if any record is not a
/// partition of its [n], or if the sequence does not restrict correctly.
bool check_consistency(std::span<const RawPartition> seq);

/// Partition induced by one label per index: i ~ j iff labels match.
/// Labels only need operator<.
template <class Label>
Partition induced_partition(std::span<const Label> labels) {
  std::map<Label, int> slot;
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(labels[i], static_cast<int>(blocks.size()));
    if (inserted) blocks.emplace_back();
    blocks[it->second].push_back(static_cast<int>(i) + 1);
  }
  return Partition(static_cast<int>(labels.size()), std::move(blocks));
}

template <class Label>
Partition induced_partition(const std::vector<Label>& labels) {
  return induced_partition(std::span<const Label>(labels));
}

/// Feature allocation induced by a finite label set per index: one block per
/// distinct label. Indices with empty label sets belong to no block.
template <class Label>
FeatureAllocation induced_feature_allocation(std::span<const std::vector<Label>> label_sets) {
  std::map<Label, Block> by_label;
  for (std::size_t i = 0; i < label_sets.size(); ++i) {
    for (const Label& label : label_sets[i]) {
      Block& block = by_label[label];
      if (block.empty() || block.back() != static_cast<int>(i) + 1) {
        block.push_back(static_cast<int>(i) + 1);
      }
    }
  }
  std::vector<Block> blocks;
  blocks.reserve(by_label.size());
  for (auto& [label, block] : by_label) blocks.push_back(std::move(block));
  return FeatureAllocation(static_cast<int>(label_sets.size()), std::move(blocks));
}

template <class Label>
FeatureAllocation induced_feature_allocation(const std::vector<std::vector<Label>>& label_sets) {
  return induced_feature_allocation(std::span<const std::vector<Label>>(label_sets));
}

/// n x K binary membership matrix, columns in canonical block order.
Eigen::MatrixXi membership_matrix(const FeatureAllocation& f);

/// Feature allocation from the nonzero columns of a binary matrix.
FeatureAllocation from_membership_matrix(const Eigen::Ref<const Eigen::MatrixXi>& z);

// Text records.
//
// A structure is written as a JSON array of blocks, each block a JSON array of
// ascending 1-based indices, in canonical order, with no whitespace:
//
//   record := "[" [ block { "," block } ] "]"
//   block  := "[" index { "," index } "]"
//   index  := positive decimal integer
//
// Feature allocations repeat duplicate blocks. Parsing accepts any JSON
// whitespace and any block order, then canonicalizes.

std::string format(const Partition& p);
std::string format(const FeatureAllocation& f);

/// n is inferred from the record, which must cover 1..n exactly.
Partition parse_partition(std::string_view text);

/// n cannot be recovered from the record when trailing indices belong to no
/// block, so it is supplied by the caller; n < 0 means "largest index seen".
FeatureAllocation parse_feature_allocation(std::string_view text, int n = -1);

}  // namespace csp
