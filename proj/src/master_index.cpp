#include "condfield/detail/master_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace condfield::detail {

MasterIndex::MasterIndex(Window master, Alphabet alphabet)
    : master_(std::move(master)),
      alphabet_(std::move(alphabet)),
      n_(static_cast<int>(master_.size())),
      k_(static_cast<int>(alphabet_.size())) {
  if (n_ > 32) {
    throw ResourceError("master window of " + std::to_string(n_) +
                        " sites exceeds the 32-site limit");
  }
  kpow_.resize(static_cast<std::size_t>(n_) + 1);
  kpow_[0] = 1;
  for (int e = 1; e <= n_; ++e) {
    const std::uint64_t prev = kpow_[static_cast<std::size_t>(e - 1)];
    if (prev > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(k_)) {
      throw ResourceError("configuration space of the master window overflows 64 bits");
    }
    kpow_[static_cast<std::size_t>(e)] = prev * static_cast<std::uint64_t>(k_);
  }
}

std::uint64_t MasterIndex::weight_in(Mask m, int site) const {
  const Mask higher = site >= 31 ? Mask{0} : (m & ~((Mask{1} << (site + 1)) - 1));
  return kpow(popcount(higher));
}

std::uint64_t MasterIndex::partial_rank(Mask part, Mask whole, const std::uint8_t* digits) const {
  std::uint64_t r = 0;
  for (Mask rest = part; rest;) {
    const int site = std::countr_zero(rest);
    rest &= rest - 1;
    r += digits[site] * weight_in(whole, site);
  }
  return r;
}

void MasterIndex::digits_of_rank(Mask m, std::uint64_t rank, std::uint8_t* digits) const {
  // peel from the least significant digit (highest site index)
  int sites_arr[32];
  int cnt = 0;
  for (Mask rest = m; rest;) {
    sites_arr[cnt++] = std::countr_zero(rest);
    rest &= rest - 1;
  }
  for (int i = cnt - 1; i >= 0; --i) {
    digits[sites_arr[i]] = static_cast<std::uint8_t>(rank % static_cast<std::uint64_t>(k_));
    rank /= static_cast<std::uint64_t>(k_);
  }
}

void MasterIndex::merge_offsets(Mask a, Mask union_mask, std::vector<std::uint64_t>& ofs) const {
  const std::uint64_t na = count(a);
  ofs.assign(static_cast<std::size_t>(na), 0);
  // per-digit weights of a's sites inside the union indexing
  std::uint64_t weights[32];
  int cnt = 0;
  for (Mask rest = a; rest;) {
    const int site = std::countr_zero(rest);
    rest &= rest - 1;
    weights[cnt] = weight_in(union_mask, site);
    ++cnt;
  }
  std::uint8_t digits[32] = {};
  std::uint64_t acc = 0;
  for (std::uint64_t r = 0; r < na; ++r) {
    ofs[static_cast<std::size_t>(r)] = acc;
    // increment the big-endian digit string (last site of a least significant)
    for (int i = cnt - 1; i >= 0; --i) {
      acc += weights[i];
      if (++digits[i] < k_) break;
      digits[i] = 0;
      acc -= static_cast<std::uint64_t>(k_) * weights[i];
    }
  }
}

Mask MasterIndex::mask_of(const Window& w) const {
  Mask m = 0;
  for (const LatticePoint& t : w) {
    auto pos = master_.index_of(t);
    if (!pos) {
      throw DomainError("point " + t.to_string() + " lies outside the master window " +
                        master_.to_string());
    }
    m |= Mask{1} << *pos;
  }
  return m;
}

Window MasterIndex::window_of(Mask m) const {
  std::vector<LatticePoint> pts;
  pts.reserve(static_cast<std::size_t>(popcount(m)));
  for (Mask rest = m; rest;) {
    const int site = std::countr_zero(rest);
    rest &= rest - 1;
    pts.push_back(master_.point(static_cast<std::size_t>(site)));
  }
  return Window(std::move(pts));
}

std::uint64_t MasterIndex::rank_of(const Configuration& c) const {
  std::uint8_t digits[32] = {};
  Mask m = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto pos = master_.index_of(c.support().point(i));
    if (!pos) {
      throw DomainError("configuration point " + c.support().point(i).to_string() +
                        " lies outside the master window");
    }
    if (c.value_at(i) >= k_) {
      throw DomainError("configuration value exceeds the alphabet size");
    }
    digits[*pos] = c.value_at(i);
    m |= Mask{1} << *pos;
  }
  return rank_of_digits(m, digits);
}

Configuration MasterIndex::config_of(Mask m, std::uint64_t rank) const {
  std::uint8_t digits[32] = {};
  digits_of_rank(m, rank, digits);
  std::vector<std::uint8_t> vals;
  vals.reserve(static_cast<std::size_t>(popcount(m)));
  for (Mask rest = m; rest;) {
    const int site = std::countr_zero(rest);
    rest &= rest - 1;
    vals.push_back(digits[site]);
  }
  return Configuration(window_of(m), std::move(vals));
}

std::string MasterIndex::describe_config(Mask m, std::uint64_t rank) const {
  if (!m) return "{}";
  return config_of(m, rank).to_string(alphabet_);
}

std::string MasterIndex::describe_key(Mask v, Mask s, std::uint64_t zrank) const {
  return "V=" + window_of(v).to_string() + " z=" + describe_config(s, zrank);
}

MarginalTable::MarginalTable(const MasterIndex& idx, const std::vector<double>& joint,
                             std::uint64_t budget)
    : idx_(&idx) {
  const int n = idx.sites();
  const Mask full = idx.full_mask();
  if (joint.size() != idx.count(full)) {
    throw DomainError("joint table size does not match the master window");
  }
  // total doubles stored = (k+1)^n
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    total *= static_cast<std::uint64_t>(idx.radix()) + 1;
    if (total > budget) {
      throw ResourceError("marginal table would exceed the budget of " +
                          std::to_string(budget) + " entries");
    }
  }

  tables_.resize(std::size_t{1} << n);
  tables_[full] = joint;

  std::vector<Mask> order(std::size_t{1} << n);
  std::iota(order.begin(), order.end(), Mask{0});
  std::sort(order.begin(), order.end(),
            [](Mask a, Mask b) { return popcount(a) > popcount(b); });

  std::vector<std::uint64_t> ofs;
  for (Mask m : order) {
    if (m == full) continue;
    const int t = std::countr_zero(~m & full);  // peel the lowest missing site
    const Mask parent = m | (Mask{1} << t);
    const std::uint64_t tw = idx.weight_in(parent, t);
    idx.merge_offsets(m, parent, ofs);
    const std::vector<double>& src = tables_[parent];
    std::vector<double>& dst = tables_[m];
    dst.assign(static_cast<std::size_t>(idx.count(m)), 0.0);
    const int k = idx.radix();
    for (std::uint64_t r = 0; r < dst.size(); ++r) {
      double acc = 0.0;
      const std::uint64_t base = ofs[static_cast<std::size_t>(r)];
      for (int a = 0; a < k; ++a) {
        acc += src[static_cast<std::size_t>(base + static_cast<std::uint64_t>(a) * tw)];
      }
      dst[static_cast<std::size_t>(r)] = acc;
    }
  }
}

double MarginalTable::conditional(Mask v, std::uint64_t xrank, Mask s,
                                  std::uint64_t zrank) const {
  const Mask u = v | s;
  std::uint8_t digits[32] = {};
  idx_->digits_of_rank(v, xrank, digits);
  std::uint8_t zdigits[32] = {};
  idx_->digits_of_rank(s, zrank, zdigits);
  for (Mask rest = s; rest;) {
    const int site = std::countr_zero(rest);
    rest &= rest - 1;
    digits[site] = zdigits[site];
  }
  const std::uint64_t joint_rank = idx_->rank_of_digits(u, digits);
  return tables_[u][joint_rank] / tables_[s][zrank];
}

void MarginalTable::fill_conditional(Mask v, Mask s, std::uint64_t zrank, double* out) const {
  const Mask u = v | s;
  std::vector<std::uint64_t> vofs, sofs;
  idx_->merge_offsets(v, u, vofs);
  idx_->merge_offsets(s, u, sofs);
  const std::vector<double>& num = tables_[u];
  const double denom = tables_[s][zrank];
  const std::uint64_t base = sofs[static_cast<std::size_t>(zrank)];
  for (std::size_t x = 0; x < vofs.size(); ++x) {
    out[x] = num[static_cast<std::size_t>(base + vofs[x])] / denom;
  }
}

Mask Rng::submask(Mask allowed, int size) {
  int sites_arr[32];
  int cnt = 0;
  for (Mask rest = allowed; rest;) {
    sites_arr[cnt++] = std::countr_zero(rest);
    rest &= rest - 1;
  }
  // partial Fisher-Yates
  Mask out = 0;
  for (int i = 0; i < size && i < cnt; ++i) {
    const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(cnt - i)));
    std::swap(sites_arr[i], sites_arr[j]);
    out |= Mask{1} << sites_arr[i];
  }
  return out;
}

Mask Rng::any_submask(Mask allowed) {
  return static_cast<Mask>(next()) & allowed;
}

}  // namespace condfield::detail
