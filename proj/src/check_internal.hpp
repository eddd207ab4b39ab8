#pragma once

#include <array>
#include <cmath>
#include <cstring>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "condfield/detail/spec_table.hpp"
#include "condfield/report.hpp"

namespace condfield::detail {

// Accumulates violations of one check; keeps the first witness among the
// maximal violations in enumeration order.
class ReportBuilder {
 public:
  ReportBuilder(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}

  template <class WitnessFn>
  void record(double violation, WitnessFn&& witness) {
    ++count_;
    if (violation > worst_) {
      worst_ = violation;
      witness_ = witness();
    }
  }

  void structural(const std::string& what) {
    if (!structural_) structural_ = what;
  }

  bool has_structural() const { return structural_.has_value(); }
  double worst() const { return worst_; }

  Report finish(bool sampled, std::string note = "") const {
    Report r;
    r.check_name = name_;
    r.tolerance = tol_;
    r.worst_violation = worst_;
    r.count_checked = count_;
    r.sampled = sampled;
    r.passed = !structural_ && worst_ <= tol_;
    if (structural_) {
      r.note = "structural: " + *structural_ + (note.empty() ? "" : "; " + note);
      r.witness = *structural_;
    } else {
      r.note = std::move(note);
      if (witness_ && worst_ > 0.0) r.witness = witness_;
    }
    return r;
  }

 private:
  std::string name_;
  double tol_;
  double worst_ = 0.0;
  std::uint64_t count_ = 0;
  std::optional<std::string> witness_;
  std::optional<std::string> structural_;
};

// One quantifier role: a window drawn from the remaining sites, carrying
// `cfg` enumerated configurations and `summed` configurations that the
// identity itself sums over.
struct RoleSpec {
  int min_size = 0;
  int max_size = 32;
  int cfg = 1;
  int summed = 0;
  bool rest = false;  // absorbs all remaining sites; must be the last role
};

inline constexpr int kMaxRoles = 4;

struct Sample {
  std::array<Mask, kMaxRoles> mask{};
  std::uint8_t dig[kMaxRoles][2][32];
};

struct Stratum {
  std::array<int, kMaxRoles> sizes{};
  long double instances = 0;
  long double work = 0;
};

inline long double binomial_ld(int n, int r) {
  if (r < 0 || r > n) return 0.0L;
  long double acc = 1.0L;
  for (int i = 0; i < r; ++i) acc = acc * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
  return acc;
}

// All size assignments with per-stratum instance and work weights.
inline std::vector<Stratum> build_strata(int n, int k, const std::vector<RoleSpec>& roles) {
  std::vector<Stratum> out;
  Stratum cur;
  auto rec = [&](auto&& self, std::size_t role, int avail, long double ways) -> void {
    if (role == roles.size()) {
      Stratum s = cur;
      long double inst = ways, work = ways;
      for (std::size_t r = 0; r < roles.size(); ++r) {
        inst *= std::pow(static_cast<long double>(k), roles[r].cfg * s.sizes[r]);
        work *= std::pow(static_cast<long double>(k), (roles[r].cfg + roles[r].summed) * s.sizes[r]);
      }
      s.instances = inst;
      s.work = work;
      if (inst > 0) out.push_back(s);
      return;
    }
    const RoleSpec& spec = roles[role];
    if (spec.rest) {
      cur.sizes[role] = avail;
      self(self, role + 1, 0, ways);
      return;
    }
    const int hi = std::min(spec.max_size, avail);
    for (int sz = spec.min_size; sz <= hi; ++sz) {
      cur.sizes[role] = sz;
      self(self, role + 1, avail - sz, ways * binomial_ld(avail, sz));
    }
    cur.sizes[role] = 0;
  };
  rec(rec, 0, n, 1.0L);
  return out;
}

// Enumerates mask assignments for the roles, canonical submask order.
template <class Fn>
void for_each_assignment(const MasterIndex& idx, const std::vector<RoleSpec>& roles,
                         Fn&& fn) {
  std::array<Mask, kMaxRoles> masks{};
  auto rec = [&](auto&& self, std::size_t role, Mask avail) -> void {
    if (role == roles.size()) {
      fn(masks);
      return;
    }
    const RoleSpec& spec = roles[role];
    if (spec.rest) {
      masks[role] = avail;
      self(self, role + 1, Mask{0});
      return;
    }
    for_each_submask(avail, [&](Mask m) {
      const int pc = popcount(m);
      if (pc < spec.min_size || pc > spec.max_size) return;
      masks[role] = m;
      self(self, role + 1, avail & ~m);
    });
  };
  rec(rec, 0, idx.full_mask());
}

// Advances the enumerated configurations of the sample; row-major over
// (role, copy) slots.
inline bool advance_sample(const MasterIndex& idx, const std::vector<RoleSpec>& roles,
                           Sample& s) {
  for (std::size_t r = 0; r < roles.size(); ++r) {
    for (int c = 0; c < roles[r].cfg; ++c) {
      if (next_config(s.mask[r], idx.radix(), s.dig[r][c])) return true;
      // wrapped; carry on to the next slot
    }
  }
  return false;
}

// Direct-indexed block lookup; falls back to the hash map on wide masters
// where the flat table would not fit.
class BlockIndex {
 public:
  explicit BlockIndex(const SpecTable& tab) : tab_(&tab), n_(tab.idx.sites()) {
    if (n_ <= 10) {
      flat_.assign(std::size_t{1} << (2 * n_), nullptr);
      for (const auto& [key, b] : tab.blocks) {
        const Mask v = static_cast<Mask>(key >> 32);
        const Mask s = static_cast<Mask>(key);
        flat_[(static_cast<std::size_t>(v) << n_) | s] = &b;
      }
    }
  }
  const Block* find(Mask v, Mask s) const {
    if (!flat_.empty()) return flat_[(static_cast<std::size_t>(v) << n_) | s];
    return tab_->find(v, s);
  }

 private:
  const SpecTable* tab_;
  int n_;
  std::vector<const Block*> flat_;
};

struct SpaceResult {
  bool sampled = false;
  long double total_work = 0;
  long double total_instances = 0;
};

// Runs `eval` over the quantifier space: exhaustively when the estimated
// work fits the budget, otherwise by deterministic stratified sampling with
// samples allocated proportionally to per-stratum work.
template <class EvalFn>
SpaceResult run_space(const MasterIndex& idx, const std::vector<RoleSpec>& roles,
                      const CheckOptions& opts, std::string_view tag, double work_scale,
                      EvalFn&& eval) {
  SpaceResult res;
  const auto strata = build_strata(idx.sites(), idx.radix(), roles);
  for (const Stratum& s : strata) {
    res.total_work += s.work * work_scale;
    res.total_instances += s.instances;
  }

  if (res.total_work <= static_cast<long double>(opts.work_budget)) {
    for_each_assignment(idx, roles, [&](const std::array<Mask, kMaxRoles>& masks) {
      Sample s;
      std::memset(s.dig, 0, sizeof(s.dig));
      s.mask = masks;
      do {
        eval(s);
      } while (advance_sample(idx, roles, s));
    });
    return res;
  }

  res.sampled = true;
  Rng rng(seed_for(opts.seed, tag));
  // digits_of_rank overwrites every masked site, and evaluators only read
  // masked sites, so the sample buffer is reused without clearing
  Sample s;
  std::memset(s.dig, 0, sizeof(s.dig));
  for (const Stratum& st : strata) {
    long double per_sample = work_scale;
    for (std::size_t r = 0; r < roles.size(); ++r) {
      per_sample *= std::pow(static_cast<long double>(idx.radix()), roles[r].summed * st.sizes[r]);
    }
    const long double share =
        static_cast<long double>(opts.work_budget) * (st.work * work_scale / res.total_work);
    long double want = share / per_sample;
    if (want > st.instances) want = st.instances;
    std::uint64_t draws = static_cast<std::uint64_t>(want);
    if (draws == 0) draws = 1;
    for (std::uint64_t d = 0; d < draws; ++d) {
      Mask avail = idx.full_mask();
      for (std::size_t r = 0; r < roles.size(); ++r) {
        s.mask[r] = roles[r].rest ? avail : rng.submask(avail, st.sizes[r]);
        avail &= ~s.mask[r];
        for (int c = 0; c < roles[r].cfg; ++c) {
          idx.digits_of_rank(s.mask[r], rng.below(idx.count(s.mask[r])), s.dig[r][c]);
        }
      }
      eval(s);
    }
  }
  return res;
}

inline std::string sampled_note(const SpaceResult& res) {
  if (!res.sampled) return "";
  std::ostringstream os;
  os << "sampled; full space has ~" << static_cast<double>(res.total_instances)
     << " instances";
  return os.str();
}

// Formats a configuration given by global digit array and support mask.
inline std::string describe_digits(const MasterIndex& idx, Mask m, const std::uint8_t* d) {
  if (!m) return "{}";
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (Mask rest = m; rest;) {
    const int site = std::countr_zero(rest);
    rest &= rest - 1;
    if (!first) os << ',';
    first = false;
    os << idx.master().point(static_cast<std::size_t>(site)).to_string() << ':'
       << idx.alphabet().symbol(d[site]);
  }
  os << '}';
  return os.str();
}

inline std::string describe_window(const MasterIndex& idx, Mask m) {
  return idx.window_of(m).to_string();
}

}  // namespace condfield::detail
