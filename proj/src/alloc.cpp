#include "csp/alloc.hpp"

#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace csp {

namespace {

bool feature_order(const Block& a, const Block& b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return a < b;
}

void append_block(std::string& out, const Block& block) {
  out += '[';
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(block[i]);
  }
  out += ']';
}

std::vector<Block> parse_blocks(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("structure record: ") + e.what());
  }
  if (!doc.is_array()) throw std::invalid_argument("structure record: expected an array of blocks");
  std::vector<Block> blocks;
  for (const auto& item : doc) {
    if (!item.is_array()) throw std::invalid_argument("structure record: block is not an array");
    Block block;
    for (const auto& index : item) {
      if (!index.is_number_integer()) {
        throw std::invalid_argument("structure record: index is not an integer");
      }
      block.push_back(index.get<int>());
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(int n, std::vector<Block> blocks) : n_(n), blocks_(std::move(blocks)) {
  if (n_ < 0) throw std::invalid_argument("Partition: negative n");
  std::vector<char> seen(static_cast<std::size_t>(n_) + 1, 0);
  int covered = 0;
  for (Block& block : blocks_) {
    if (block.empty()) throw std::invalid_argument("Partition: empty block");
    std::sort(block.begin(), block.end());
    for (int index : block) {
      if (index < 1 || index > n_) throw std::invalid_argument("Partition: index out of range");
      if (seen[index]) throw std::invalid_argument("Partition: index in more than one block");
      seen[index] = 1;
      ++covered;
    }
  }
  if (covered != n_) throw std::invalid_argument("Partition: blocks do not cover [n]");
  std::sort(blocks_.begin(), blocks_.end(),
            [](const Block& a, const Block& b) { return a.front() < b.front(); });
}

std::vector<int> Partition::block_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(blocks_.size());
  for (const Block& b : blocks_) sizes.push_back(static_cast<int>(b.size()));
  return sizes;
}

std::vector<int> Partition::appearance_labels() const {
  std::vector<int> labels(n_, 0);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    for (int index : blocks_[k]) labels[index - 1] = static_cast<int>(k) + 1;
  }
  return labels;
}

// ---------------------------------------------------------------------------
// FeatureAllocation

FeatureAllocation::FeatureAllocation(int n, std::vector<Block> blocks) : n_(n) {
  if (n_ < 0) throw std::invalid_argument("FeatureAllocation: negative n");
  for (Block& block : blocks) {
    if (block.empty()) throw std::invalid_argument("FeatureAllocation: empty block");
    std::sort(block.begin(), block.end());
    if (std::adjacent_find(block.begin(), block.end()) != block.end()) {
      throw std::invalid_argument("FeatureAllocation: repeated index within a block");
    }
    if (block.front() < 1 || block.back() > n_) {
      throw std::invalid_argument("FeatureAllocation: index out of range");
    }
  }
  std::sort(blocks.begin(), blocks.end(), feature_order);
  for (Block& block : blocks) {
    if (!features_.empty() && features_.back().indices == block) {
      ++features_.back().multiplicity;
    } else {
      features_.push_back({std::move(block), 1});
    }
  }
}

int FeatureAllocation::num_blocks() const {
  int k = 0;
  for (const Feature& f : features_) k += f.multiplicity;
  return k;
}

std::vector<Block> FeatureAllocation::blocks() const {
  std::vector<Block> out;
  for (const Feature& f : features_) {
    for (int r = 0; r < f.multiplicity; ++r) out.push_back(f.indices);
  }
  return out;
}

std::vector<int> FeatureAllocation::block_sizes() const {
  std::vector<int> sizes;
  for (const Feature& f : features_) {
    sizes.insert(sizes.end(), f.multiplicity, static_cast<int>(f.indices.size()));
  }
  return sizes;
}

OrderedFeatureAllocation::OrderedFeatureAllocation(FeatureAllocation base, std::vector<int> order)
    : base_(std::move(base)), order_(std::move(order)) {
  const int k = base_.num_blocks();
  if (static_cast<int>(order_.size()) != k) {
    throw std::invalid_argument("OrderedFeatureAllocation: order length differs from K");
  }
  std::vector<char> used(k, 0);
  for (int position : order_) {
    if (position < 0 || position >= k || used[position]) {
      throw std::invalid_argument("OrderedFeatureAllocation: order is not a permutation");
    }
    used[position] = 1;
  }
}

std::vector<Block> OrderedFeatureAllocation::ordered_blocks() const {
  const std::vector<Block> all = base_.blocks();
  std::vector<Block> out;
  out.reserve(all.size());
  for (int position : order_) out.push_back(all[position]);
  return out;
}

Multiplicities multiplicities(const FeatureAllocation& f) {
  Multiplicities m;
  m.unique = f.num_unique();
  for (const auto& feature : f.features()) m.rho.push_back(feature.multiplicity);
  std::sort(m.rho.begin(), m.rho.end(), std::greater<>());
  return m;
}

// ---------------------------------------------------------------------------
// Restriction and consistency

Partition restrict(const Partition& p, int m) {
  if (m < 0 || m > p.n()) throw std::domain_error("restrict: m outside [0, n]");
  std::vector<Block> blocks;
  for (const Block& block : p.blocks()) {
    Block kept;
    for (int index : block) {
      if (index <= m) kept.push_back(index);
    }
    if (!kept.empty()) blocks.push_back(std::move(kept));
  }
  return Partition(m, std::move(blocks));
}

FeatureAllocation restrict(const FeatureAllocation& f, int m) {
  if (m < 0 || m > f.n()) throw std::domain_error("restrict: m outside [0, n]");
  std::vector<Block> blocks;
  for (const auto& feature : f.features()) {
    Block kept;
    for (int index : feature.indices) {
      if (index <= m) kept.push_back(index);
    }
    if (kept.empty()) continue;
    for (int r = 0; r < feature.multiplicity; ++r) blocks.push_back(kept);
  }
  return FeatureAllocation(m, std::move(blocks));
}

namespace {

template <class Structure>
bool consistent_sequence(std::span<const Structure> seq) {
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i].n() < seq[i - 1].n()) return false;
    if (!(restrict(seq[i], seq[i - 1].n()) == seq[i - 1])) return false;
  }
  return true;
}

}  // namespace

bool check_consistency(std::span<const Partition> seq) { return consistent_sequence(seq); }

bool check_consistency(std::span<const FeatureAllocation> seq) {
  return consistent_sequence(seq);
}

bool is_partition_of(int n, const std::vector<Block>& blocks) {
  try {
    Partition(n, blocks);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

bool check_consistency(std::span<const RawPartition> seq) {
  std::vector<Partition> validated;
  validated.reserve(seq.size());
  for (const RawPartition& raw : seq) {
    if (!is_partition_of(raw.n, raw.blocks)) return false;
    validated.emplace_back(raw.n, raw.blocks);
  }
  return check_consistency(std::span<const Partition>(validated));
}

// ---------------------------------------------------------------------------
// Matrices

Eigen::MatrixXi membership_matrix(const FeatureAllocation& f) {
  const std::vector<Block> blocks = f.blocks();
  Eigen::MatrixXi z = Eigen::MatrixXi::Zero(f.n(), static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    for (int index : blocks[k]) z(index - 1, static_cast<Eigen::Index>(k)) = 1;
  }
  return z;
}

FeatureAllocation from_membership_matrix(const Eigen::Ref<const Eigen::MatrixXi>& z) {
  std::vector<Block> blocks;
  for (Eigen::Index k = 0; k < z.cols(); ++k) {
    Block block;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      if (z(i, k) != 0) block.push_back(static_cast<int>(i) + 1);
    }
    if (!block.empty()) blocks.push_back(std::move(block));
  }
  return FeatureAllocation(static_cast<int>(z.rows()), std::move(blocks));
}

// ---------------------------------------------------------------------------
// Text records

std::string format(const Partition& p) {
  std::string out = "[";
  for (std::size_t k = 0; k < p.blocks().size(); ++k) {
    if (k > 0) out += ',';
    append_block(out, p.blocks()[k]);
  }
  out += ']';
  return out;
}

std::string format(const FeatureAllocation& f) {
  std::string out = "[";
  bool first = true;
  for (const auto& feature : f.features()) {
    for (int r = 0; r < feature.multiplicity; ++r) {
      if (!first) out += ',';
      first = false;
      append_block(out, feature.indices);
    }
  }
  out += ']';
  return out;
}

Partition parse_partition(std::string_view text) {
  std::vector<Block> blocks = parse_blocks(text);
  std::size_t n = 0;
  for (const Block& b : blocks) n += b.size();
  return Partition(static_cast<int>(n), std::move(blocks));
}

FeatureAllocation parse_feature_allocation(std::string_view text, int n) {
  std::vector<Block> blocks = parse_blocks(text);
  if (n < 0) {
    n = 0;
    for (const Block& b : blocks) {
      for (int index : b) n = std::max(n, index);
    }
  }
  return FeatureAllocation(n, std::move(blocks));
}

}  // namespace csp
