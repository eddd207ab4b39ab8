#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "condfield/errors.hpp"
#include "condfield/lattice.hpp"

namespace condfield::detail {

// Site subsets of one fixed window as bitmasks, bit i = i-th point in
// canonical order.
using Mask = std::uint32_t;

inline int popcount(Mask m) { return std::popcount(m); }

inline constexpr std::uint64_t kDefaultMarginalBudget = std::uint64_t{1} << 26;

// Rank/mask arithmetic over a fixed window and alphabet. A configuration on
// the sites of `mask` is identified with its rank: digits in site order,
// first (lowest-index) site most significant, matching the canonical
// lexicographic enumeration of configurations.
class MasterIndex {
 public:
  MasterIndex(Window master, Alphabet alphabet);

  const Window& master() const { return master_; }
  const Alphabet& alphabet() const { return alphabet_; }
  int sites() const { return n_; }
  int radix() const { return k_; }
  Mask full_mask() const { return n_ == 32 ? ~Mask{0} : ((Mask{1} << n_) - 1); }

  std::uint64_t kpow(int e) const { return kpow_[static_cast<std::size_t>(e)]; }
  std::uint64_t count(Mask m) const { return kpow(popcount(m)); }

  // k^(number of sites of m with index greater than `site`)
  std::uint64_t weight_in(Mask m, int site) const;

  std::uint64_t rank_of_digits(Mask m, const std::uint8_t* digits) const {
    return partial_rank(m, m, digits);
  }
  void digits_of_rank(Mask m, std::uint64_t rank, std::uint8_t* digits) const;
  // Contribution of the sites of `part` to a rank over `whole` ⊇ part.
  std::uint64_t partial_rank(Mask part, Mask whole, const std::uint8_t* digits) const;

  // Offsets realizing rank composition on disjoint masks:
  // rank_{a|b}(x,z) = ofs_a[rank_a(x)] + ofs_b[rank_b(z)].
  void merge_offsets(Mask a, Mask union_mask, std::vector<std::uint64_t>& ofs) const;

  Mask mask_of(const Window& w) const;
  Window window_of(Mask m) const;
  std::uint64_t rank_of(const Configuration& c) const;
  Configuration config_of(Mask m, std::uint64_t rank) const;

  std::string describe_key(Mask v, Mask s, std::uint64_t zrank) const;
  std::string describe_config(Mask m, std::uint64_t rank) const;

 private:
  Window master_;
  Alphabet alphabet_;
  int n_;
  int k_;
  std::vector<std::uint64_t> kpow_;
};

// Dense marginals of a joint table for every subset of sites.
class MarginalTable {
 public:
  MarginalTable(const MasterIndex& idx, const std::vector<double>& joint,
                std::uint64_t budget = kDefaultMarginalBudget);

  const std::vector<double>& table(Mask m) const { return tables_[m]; }
  double value(Mask m, std::uint64_t rank) const { return tables_[m][rank]; }

  // q_V^z(x) as the literal ratio of marginals.
  double conditional(Mask v, std::uint64_t xrank, Mask s, std::uint64_t zrank) const;
  // Fills out[x] for all x in rank order; out must have size count(v).
  void fill_conditional(Mask v, Mask s, std::uint64_t zrank, double* out) const;

  const MasterIndex& index() const { return *idx_; }

 private:
  const MasterIndex* idx_;
  std::vector<std::vector<double>> tables_;
};

// Deterministic RNG helpers; raw engine outputs only, so results never depend
// on library-specific distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  std::uint64_t below(std::uint64_t n) {
    if (!n) return 0;
    // multiply-shift range reduction; avoids the 64-bit division
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * static_cast<unsigned __int128>(n)) >> 64);
  }
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform random mask with `size` bits chosen from `allowed`.
  Mask submask(Mask allowed, int size);
  // Uniform random submask of `allowed` (any size).
  Mask any_submask(Mask allowed);

 private:
  std::mt19937_64 eng_;
};

// Iterates v = all submasks of m, ascending, including 0 and m itself.
template <class Fn>
void for_each_submask(Mask m, Fn&& fn) {
  Mask v = 0;
  while (true) {
    fn(v);
    if (v == m) break;
    v = (v - m) & m;  // next submask: (v | ~m) + 1 masked back
  }
}

// Advances the digit string of mask m to the next configuration in canonical
// rank order; returns false after wrapping back to all zeros.
inline bool next_config(Mask m, int k, std::uint8_t* digits) {
  Mask rest = m;
  while (rest) {
    const int site = 31 - std::countl_zero(rest);  // least significant digit
    rest &= ~(Mask{1} << site);
    if (static_cast<int>(++digits[site]) < k) return true;
    digits[site] = 0;
  }
  return false;
}

}  // namespace condfield::detail
