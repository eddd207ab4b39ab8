#include "condfield/specifications.hpp"

#include <cmath>

namespace condfield {

using detail::Block;
using detail::Mask;
using detail::MasterIndex;
using detail::SpecTable;

namespace detail_spec {

double SpecBase::value(const Window& V, const Configuration& z, const Configuration& x) const {
  const MasterIndex& idx = table_.idx;
  const Mask v = idx.mask_of(V);
  const Mask s = idx.mask_of(z.support());
  if (v & s) {
    throw DomainError("boundary condition overlaps the conditioned window");
  }
  const Block* b = table_.find(v, s);
  if (!b) {
    throw DomainError("no stored distribution for " + idx.describe_key(v, s, 0));
  }
  if (x.support() != V) {
    throw DomainError("configuration support must equal the conditioned window");
  }
  return b->at(idx.rank_of(z), idx.rank_of(x));
}

Distribution SpecBase::distribution(const Window& V, const Configuration& z) const {
  const MasterIndex& idx = table_.idx;
  const Mask v = idx.mask_of(V);
  const Mask s = idx.mask_of(z.support());
  const Block* b = table_.find(v, s);
  if (!b) {
    throw DomainError("no stored distribution for " + idx.describe_key(v, s, 0));
  }
  const std::uint64_t zr = idx.rank_of(z);
  std::vector<double> row(b->row(zr), b->row(zr) + b->nx);
  return Distribution(V, alphabet(), std::move(row));
}

bool SpecBase::has_key(const Window& V, const Configuration& z) const {
  const MasterIndex& idx = table_.idx;
  return table_.find(idx.mask_of(V), idx.mask_of(z.support())) != nullptr;
}

}  // namespace detail_spec

namespace {

void check_state_cap(const MasterIndex& idx, const SpecOptions& opts) {
  if (idx.count(idx.full_mask()) > opts.state_cap) {
    throw ResourceError("master window has " + std::to_string(idx.count(idx.full_mask())) +
                        " joint states, cap is " + std::to_string(opts.state_cap));
  }
}

// Adds the (v, s) block of field conditionals to the table, against a
// running entry budget.
void emit_block(SpecTable& table, const detail::MarginalTable& marginals, Mask v, Mask s,
                std::uint64_t budget, std::uint64_t& used) {
  const MasterIndex& idx = table.idx;
  const Mask u = v | s;
  Block b;
  b.nz = idx.count(s);
  b.nx = idx.count(v);
  const std::uint64_t need = b.nz * b.nx;
  if (used + need > budget) {
    throw ResourceError("specification table exceeds the budget of " + std::to_string(budget) +
                        " entries; rerun with a larger budget or a smaller window");
  }
  used += need;
  b.p.resize(static_cast<std::size_t>(need));

  std::vector<std::uint64_t> vofs, sofs;
  idx.merge_offsets(v, u, vofs);
  idx.merge_offsets(s, u, sofs);
  const std::vector<double>& num = marginals.table(u);
  const std::vector<double>& den = marginals.table(s);
  for (std::uint64_t z = 0; z < b.nz; ++z) {
    const std::uint64_t base = sofs[static_cast<std::size_t>(z)];
    const double pz = den[static_cast<std::size_t>(z)];
    double* row = b.row(z);
    for (std::uint64_t x = 0; x < b.nx; ++x) {
      row[static_cast<std::size_t>(x)] =
          num[static_cast<std::size_t>(base + vofs[static_cast<std::size_t>(x)])] / pz;
    }
  }
  table.emplace(v, s, std::move(b));
}

}  // namespace

FSpec fspec_from_field(const FiniteField& field, const SpecOptions& opts) {
  MasterIndex idx(field.master(), field.alphabet());
  check_state_cap(idx, opts);
  detail::MarginalTable marginals(idx, field.joint().table());
  SpecTable table(idx);
  std::uint64_t used = 0;
  const Mask full = idx.full_mask();
  for (Mask v = 1; v <= full; ++v) {
    if (static_cast<std::size_t>(detail::popcount(v)) > opts.max_window) continue;
    const Mask comp = full & ~v;
    detail::for_each_submask(comp, [&](Mask s) {
      emit_block(table, marginals, v, s, opts.table_budget, used);
    });
    if (v == full) break;
  }
  return FSpec(std::move(table));
}

OneFSpec onefspec_from_field(const FiniteField& field, const SpecOptions& opts) {
  MasterIndex idx(field.master(), field.alphabet());
  check_state_cap(idx, opts);
  detail::MarginalTable marginals(idx, field.joint().table());
  SpecTable table(idx);
  std::uint64_t used = 0;
  const Mask full = idx.full_mask();
  for (int t = 0; t < idx.sites(); ++t) {
    const Mask v = Mask{1} << t;
    detail::for_each_submask(full & ~v, [&](Mask s) {
      emit_block(table, marginals, v, s, opts.table_budget, used);
    });
  }
  return OneFSpec(std::move(table));
}

PalmSpec palm_from_field(const FiniteField& field, const SpecOptions& opts) {
  MasterIndex idx(field.master(), field.alphabet());
  check_state_cap(idx, opts);
  detail::MarginalTable marginals(idx, field.joint().table());
  SpecTable table(idx);
  std::uint64_t used = 0;
  const Mask full = idx.full_mask();
  for (Mask v = 1; v <= full; ++v) {
    if (static_cast<std::size_t>(detail::popcount(v)) <= opts.max_window) {
      for (int t = 0; t < idx.sites(); ++t) {
        const Mask s = Mask{1} << t;
        if (v & s) continue;
        emit_block(table, marginals, v, s, opts.table_budget, used);
      }
    }
    if (v == full) break;
  }
  return PalmSpec(std::move(table));
}

DSpecFinite dspec_from_field(const FiniteField& field, const SpecOptions& opts) {
  MasterIndex idx(field.master(), field.alphabet());
  check_state_cap(idx, opts);
  detail::MarginalTable marginals(idx, field.joint().table());
  SpecTable table(idx);
  std::uint64_t used = 0;
  const Mask full = idx.full_mask();
  for (Mask v = 1; v <= full; ++v) {
    if (static_cast<std::size_t>(detail::popcount(v)) <= opts.max_window) {
      emit_block(table, marginals, v, full & ~v, opts.table_budget, used);
    }
    if (v == full) break;
  }
  return DSpecFinite(std::move(table));
}

OneFSpec onefspec_from_potential(const Window& master, const Alphabet& X,
                                 const Potential& phi, double beta, const SpecOptions& opts) {
  MasterIndex idx(master, X);
  check_state_cap(idx, opts);
  const int n = idx.sites();
  const int k = idx.radix();

  // incident pair matrices per site position
  struct Incident {
    int other;
    const std::vector<double>* e;  // k x k, row = value at the own site
    bool own_first;
  };
  std::vector<std::vector<Incident>> incident(static_cast<std::size_t>(n));
  for (const auto& [pair, e] : phi.pair_terms) {
    if (!master.contains(pair.first) || !master.contains(pair.second)) {
      throw DomainError("potential pair term outside the master window");
    }
    const int a = static_cast<int>(*master.index_of(pair.first));
    const int b = static_cast<int>(*master.index_of(pair.second));
    incident[static_cast<std::size_t>(a)].push_back({b, &e, true});
    incident[static_cast<std::size_t>(b)].push_back({a, &e, false});
  }
  std::vector<const std::vector<double>*> site_of(static_cast<std::size_t>(n), nullptr);
  for (const auto& [t, e] : phi.site_terms) {
    if (!master.contains(t)) {
      throw DomainError("potential site term outside the master window");
    }
    site_of[*master.index_of(t)] = &e;
  }

  SpecTable table(idx);
  std::uint64_t used = 0;
  const Mask full = idx.full_mask();
  for (int t = 0; t < n; ++t) {
    const Mask v = Mask{1} << t;
    detail::for_each_submask(full & ~v, [&](Mask s) {
      Block b;
      b.nz = idx.count(s);
      b.nx = static_cast<std::uint64_t>(k);
      const std::uint64_t need = b.nz * b.nx;
      if (used + need > opts.table_budget) {
        throw ResourceError("specification table exceeds the budget of " +
                            std::to_string(opts.table_budget) + " entries");
      }
      used += need;
      b.p.resize(static_cast<std::size_t>(need));
      std::uint8_t zdigits[32] = {};
      for (std::uint64_t z = 0; z < b.nz; ++z) {
        idx.digits_of_rank(s, z, zdigits);
        double* row = b.row(z);
        double wsum = 0.0;
        for (int x = 0; x < k; ++x) {
          double h = site_of[static_cast<std::size_t>(t)]
                         ? (*site_of[static_cast<std::size_t>(t)])[static_cast<std::size_t>(x)]
                         : 0.0;
          for (const auto& inc : incident[static_cast<std::size_t>(t)]) {
            if (!(s >> inc.other & 1)) continue;
            const int zo = zdigits[inc.other];
            h += inc.own_first ? (*inc.e)[static_cast<std::size_t>(x * k + zo)]
                               : (*inc.e)[static_cast<std::size_t>(zo * k + x)];
          }
          const double w = std::exp(-beta * h);
          row[x] = w;
          wsum += w;
        }
        for (int x = 0; x < k; ++x) row[x] /= wsum;
      }
      table.emplace(v, s, std::move(b));
    });
  }
  return OneFSpec(std::move(table));
}

}  // namespace condfield
