#pragma once

#include <algorithm>
#include <unordered_map>
#include <utility>
#include <vector>

#include "condfield/detail/master_index.hpp"

namespace condfield::detail {

// One dense slab of conditional distributions q_V^z for a fixed conditioned
// mask V and boundary-support mask S: probabilities indexed [zrank*nx + xrank].
struct Block {
  std::uint64_t nz = 0;
  std::uint64_t nx = 0;
  std::vector<double> p;

  double at(std::uint64_t z, std::uint64_t x) const {
    return p[static_cast<std::size_t>(z * nx + x)];
  }
  const double* row(std::uint64_t z) const { return p.data() + z * nx; }
  double* row(std::uint64_t z) { return p.data() + z * nx; }
};

inline std::uint64_t block_key(Mask v, Mask s) {
  return (static_cast<std::uint64_t>(v) << 32) | s;
}

// Shared storage of every specification container. Lookup is by hash;
// anything order-sensitive must go through sorted_keys().
struct SpecTable {
  MasterIndex idx;
  std::unordered_map<std::uint64_t, Block> blocks;

  explicit SpecTable(MasterIndex index) : idx(std::move(index)) {}

  const Block* find(Mask v, Mask s) const {
    auto it = blocks.find(block_key(v, s));
    return it == blocks.end() ? nullptr : &it->second;
  }
  Block* find(Mask v, Mask s) {
    auto it = blocks.find(block_key(v, s));
    return it == blocks.end() ? nullptr : &it->second;
  }

  void emplace(Mask v, Mask s, Block b) { blocks.emplace(block_key(v, s), std::move(b)); }

  // (vmask, smask) pairs in canonical ascending order.
  std::vector<std::pair<Mask, Mask>> sorted_keys() const {
    std::vector<std::pair<Mask, Mask>> keys;
    keys.reserve(blocks.size());
    for (const auto& [key, b] : blocks) {
      keys.emplace_back(static_cast<Mask>(key >> 32), static_cast<Mask>(key));
    }
    std::sort(keys.begin(), keys.end());
    return keys;
  }

  std::uint64_t key_count() const {
    std::uint64_t c = 0;
    for (const auto& [key, b] : blocks) c += b.nz;
    return c;
  }

  std::uint64_t entry_count() const {
    std::uint64_t c = 0;
    for (const auto& [key, b] : blocks) c += b.nz * b.nx;
    return c;
  }

  double min_probability() const {
    double m = 1.0;
    for (const auto& [key, b] : blocks) {
      for (double v : b.p) m = std::min(m, v);
    }
    return m;
  }
};

}  // namespace condfield::detail
