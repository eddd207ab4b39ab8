#include "condfield/reconstruct.hpp"

#include <algorithm>
#include <numeric>

#include "check_internal.hpp"

namespace condfield {

using detail::Block;
using detail::Mask;
using detail::MasterIndex;
using detail::SpecTable;

namespace {

std::string config_str(const MasterIndex& idx, Mask m, std::uint64_t rank) {
  return idx.describe_config(m, rank);
}

// P_V over probe (I, y) from blocks (V, I) and (I, V):
// P_V(x) = [q_V^y(x)/q_I^x(y)] / sum_a [q_V^y(a)/q_I^a(y)].
std::vector<double> window_marginal_via_probe(const SpecTable& tab, Mask V, Mask I,
                                              std::uint64_t yrank) {
  const Block* bV = tab.find(V, I);
  const Block* bI = tab.find(I, V);
  if (!bV || !bI) {
    throw ReconstructError("table lacks the probe entries for V=" +
                           tab.idx.window_of(V).to_string() + " I=" +
                           tab.idx.window_of(I).to_string());
  }
  const std::uint64_t nx = bV->nx;
  std::vector<double> out(static_cast<std::size_t>(nx));
  double sum = 0.0;
  for (std::uint64_t a = 0; a < nx; ++a) {
    const double r = bV->at(yrank, a) / bI->at(a, yrank);
    out[static_cast<std::size_t>(a)] = r;
    sum += r;
  }
  for (double& p : out) p /= sum;
  return out;
}

// The flipped single-probe form P_V(x) = (sum_b q_I^x(b)/q_V^b(x))^-1.
std::vector<double> window_marginal_flip(const SpecTable& tab, Mask V, Mask I) {
  const Block* bV = tab.find(V, I);
  const Block* bI = tab.find(I, V);
  if (!bV || !bI) {
    throw ReconstructError("table lacks the probe entries for the flipped form");
  }
  std::vector<double> out(static_cast<std::size_t>(bV->nx));
  for (std::uint64_t x = 0; x < bV->nx; ++x) {
    double acc = 0.0;
    for (std::uint64_t b = 0; b < bI->nx; ++b) {
      acc += bI->at(x, b) / bV->at(b, x);
    }
    out[static_cast<std::size_t>(x)] = 1.0 / acc;
  }
  return out;
}

double max_abs_dev(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Assembled joints are renormalized once; a defect beyond rounding scale is
// inconsistency of the input system.
std::vector<double> finalize_joint(std::vector<double> joint, const ReconstructOptions& opts,
                                   ReconstructionInfo* info) {
  double sum = 0.0;
  for (double p : joint) sum += p;
  const double defect = std::abs(sum - 1.0);
  if (info) info->norm_defect = defect;
  if (defect > opts.norm_defect_factor * opts.tol.norm) {
    throw ReconstructError("assembled joint misses normalization by " + std::to_string(defect));
  }
  for (double& p : joint) p /= sum;
  return joint;
}

void bump(ReconstructionInfo* info, double dev) {
  if (info && dev > info->probe_spread) info->probe_spread = dev;
}

// Cross-checks marginals of the rebuilt field against the probe formula for
// every (V, I, y) probe triple within the budget, a seeded sample beyond it.
void verify_fspec_probes(const SpecTable& tab, const detail::MarginalTable& marg,
                         const ReconstructOptions& opts, ReconstructionInfo* info) {
  const MasterIndex& idx = tab.idx;
  const Mask full = idx.full_mask();
  // total probe tasks
  long double total = 0;
  for (Mask v = 1; v < full; ++v) {
    const Mask comp = full & ~v;
    detail::for_each_submask(comp, [&](Mask i) {
      if (i) total += static_cast<long double>(idx.count(i));
    });
  }
  auto run_task = [&](Mask v, Mask i, std::uint64_t y) {
    const std::vector<double> probe = window_marginal_via_probe(tab, v, i, y);
    double dev = 0.0;
    const std::vector<double>& ref = marg.table(v);
    for (std::uint64_t x = 0; x < probe.size(); ++x) {
      dev = std::max(dev, residual(probe[static_cast<std::size_t>(x)],
                                   ref[static_cast<std::size_t>(x)]));
    }
    bump(info, dev);
    if (info) ++info->probes_checked;
    if (dev > opts.tol.eq) {
      throw ReconstructError(
          "probe disagreement at V=" + idx.window_of(v).to_string() + ": probe I=" +
          idx.window_of(i).to_string() + ",y=" + config_str(idx, i, y) +
          " deviates from the assembled marginals by " + std::to_string(dev));
    }
  };

  // the stored empty-boundary entries must be the marginals themselves
  for (Mask v = 1; v <= full; ++v) {
    const Block* b = tab.find(v, 0);
    if (!b) throw ReconstructError("missing empty-boundary entry during verification");
    const std::vector<double>& ref = marg.table(v);
    double dev = 0.0;
    for (std::uint64_t x = 0; x < b->nx; ++x) {
      dev = std::max(dev, residual(b->at(0, x), ref[static_cast<std::size_t>(x)]));
    }
    bump(info, dev);
    if (dev > opts.tol.eq) {
      throw ReconstructError("empty-boundary entry at V=" + idx.window_of(v).to_string() +
                             " deviates from the assembled marginals by " + std::to_string(dev));
    }
    if (v == full) break;
  }

  if (total <= static_cast<long double>(opts.probe_budget)) {
    for (Mask v = 1; v < full; ++v) {
      const Mask comp = full & ~v;
      detail::for_each_submask(comp, [&](Mask i) {
        if (!i) return;
        for (std::uint64_t y = 0; y < idx.count(i); ++y) run_task(v, i, y);
      });
    }
    return;
  }
  if (info) info->verification_sampled = true;
  detail::Rng rng(seed_for(opts.seed, "fspec_probes"));
  for (int d = 0; d < opts.sampled_probes; ++d) {
    // nonempty proper V, nonempty I in the complement
    Mask v = 0;
    while (!v || v == full) v = rng.any_submask(full);
    Mask i = 0;
    while (!i) i = rng.any_submask(full & ~v);
    run_task(v, i, rng.below(idx.count(i)));
  }
}

}  // namespace

FiniteField field_from_fspec(const FSpec& spec, const ReconstructOptions& opts,
                             ReconstructionInfo* info) {
  const SpecTable& tab = spec.table();
  const MasterIndex& idx = tab.idx;
  const Mask full = idx.full_mask();
  const int n = idx.sites();

  if (n == 1) {
    // no probe site exists; the empty-boundary entry is the field itself
    const Block* b = tab.find(full, 0);
    if (!b) throw ReconstructError("missing empty-boundary entry on a one-site master");
    std::vector<double> joint(b->row(0), b->row(0) + b->nx);
    return FiniteField(idx.master(), idx.alphabet(), finalize_joint(std::move(joint), opts, info));
  }

  // P at the first site via the smallest probe, then one conditional slice
  const Mask t0 = 1;
  const Mask probe_i = 2;  // next site in canonical order
  const std::vector<double> p0 = window_marginal_via_probe(tab, t0, probe_i, 0);
  const Mask rest = full & ~t0;
  const Block* brest = tab.find(rest, t0);
  if (!brest) throw ReconstructError("table lacks the conditional slice off the first site");

  std::vector<double> joint(static_cast<std::size_t>(idx.count(full)));
  std::vector<std::uint64_t> rofs, tofs;
  idx.merge_offsets(rest, full, rofs);
  idx.merge_offsets(t0, full, tofs);
  for (std::uint64_t a = 0; a < idx.count(t0); ++a) {
    for (std::uint64_t r = 0; r < idx.count(rest); ++r) {
      joint[static_cast<std::size_t>(tofs[static_cast<std::size_t>(a)] +
                                     rofs[static_cast<std::size_t>(r)])] =
          p0[static_cast<std::size_t>(a)] * brest->at(a, r);
    }
  }
  joint = finalize_joint(std::move(joint), opts, info);

  FiniteField out(idx.master(), idx.alphabet(), std::move(joint));
  detail::MarginalTable marg(idx, out.joint().table());
  verify_fspec_probes(tab, marg, opts, info);
  return out;
}

namespace {

// P_t via probe (s, y) from singleton blocks; works for one-point and Palm
// tables alike.
std::vector<double> point_marginal(const SpecTable& tab, int t, int s, std::uint64_t y) {
  return window_marginal_via_probe(tab, Mask{1} << t, Mask{1} << s, y);
}

// Joint from one-point entries along the site order `order`; the first
// entry's marginal comes from the probe formula.
std::vector<double> telescoped_joint(const SpecTable& tab, const std::vector<int>& order) {
  const MasterIndex& idx = tab.idx;
  const int n = idx.sites();
  const int k = idx.radix();
  const int t0 = order[0];
  int s0 = -1;  // smallest probe site other than t0
  for (int s = 0; s < n; ++s) {
    if (s != t0) {
      s0 = s;
      break;
    }
  }
  const std::vector<double> p0 = point_marginal(tab, t0, s0, 0);

  // factor blocks: site order[j] conditioned on all earlier sites
  std::vector<const Block*> factor(static_cast<std::size_t>(n), nullptr);
  std::vector<Mask> prefix(static_cast<std::size_t>(n), 0);
  Mask seen = Mask{1} << t0;
  for (int j = 1; j < n; ++j) {
    prefix[static_cast<std::size_t>(j)] = seen;
    factor[static_cast<std::size_t>(j)] = tab.find(Mask{1} << order[j], seen);
    if (!factor[static_cast<std::size_t>(j)]) {
      throw ReconstructError("table lacks the one-point entry for the telescoping product");
    }
    seen |= Mask{1} << order[j];
  }

  std::vector<double> joint(static_cast<std::size_t>(idx.count(idx.full_mask())));
  std::uint8_t digits[32] = {};
  const Mask full = idx.full_mask();
  do {
    double p = p0[digits[t0]];
    for (int j = 1; j < n; ++j) {
      const Mask pm = prefix[static_cast<std::size_t>(j)];
      const Block* b = factor[static_cast<std::size_t>(j)];
      p *= b->at(idx.rank_of_digits(pm, digits), digits[order[j]]);
    }
    joint[static_cast<std::size_t>(idx.rank_of_digits(full, digits))] = p;
  } while (detail::next_config(full, k, digits));
  return joint;
}

}  // namespace

FiniteField field_from_1fspec(const OneFSpec& spec, const ReconstructOptions& opts,
                              ReconstructionInfo* info) {
  const SpecTable& tab = spec.table();
  const MasterIndex& idx = tab.idx;
  const int n = idx.sites();

  if (n == 1) {
    const Block* b = tab.find(1, 0);
    if (!b) throw ReconstructError("missing empty-boundary entry on a one-site master");
    std::vector<double> joint(b->row(0), b->row(0) + b->nx);
    return FiniteField(idx.master(), idx.alphabet(), finalize_joint(std::move(joint), opts, info));
  }

  // probe independence and route agreement for the first-site marginal
  const std::vector<double> p0 = point_marginal(tab, 0, 1, 0);
  for (int s = 1; s < n; ++s) {
    for (std::uint64_t y = 0; y < static_cast<std::uint64_t>(idx.radix()); ++y) {
      const double dev = max_abs_dev(p0, point_marginal(tab, 0, s, y));
      bump(info, dev);
      if (info) ++info->probes_checked;
      if (dev > opts.tol.eq) {
        throw ReconstructError("probe disagreement for the first-site marginal: probe s=" +
                               idx.master().point(static_cast<std::size_t>(s)).to_string() +
                               ",y=" + std::to_string(y) + " deviates by " + std::to_string(dev));
      }
    }
    const double dev2 = max_abs_dev(p0, window_marginal_flip(tab, 1, Mask{1} << s));
    bump(info, dev2);
    if (dev2 > opts.tol.eq) {
      throw ReconstructError("the two single-site formulas disagree by " + std::to_string(dev2));
    }
  }

  // stored empty-boundary entries must be the single-site marginals the
  // probe formula yields
  for (int t = 0; t < n; ++t) {
    const Block* b = tab.find(Mask{1} << t, 0);
    if (!b) throw ReconstructError("missing empty-boundary one-point entry");
    const std::vector<double> pt = point_marginal(tab, t, t == 0 ? 1 : 0, 0);
    double dev = 0.0;
    for (std::uint64_t x = 0; x < b->nx; ++x) {
      dev = std::max(dev, residual(b->at(0, x), pt[static_cast<std::size_t>(x)]));
    }
    bump(info, dev);
    if (dev > opts.tol.eq) {
      throw ReconstructError("empty-boundary entry at " +
                             idx.master().point(static_cast<std::size_t>(t)).to_string() +
                             " deviates from the probe marginal by " + std::to_string(dev));
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> joint = telescoped_joint(tab, order);

  // enumeration-order independence
  auto compare_order = [&](const std::vector<int>& alt) {
    const std::vector<double> other = telescoped_joint(tab, alt);
    double dev = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i) {
      dev = std::max(dev, residual(joint[i], other[i]));
    }
    bump(info, dev);
    if (dev > opts.tol.eq) {
      std::string o;
      for (int site : alt) o += std::to_string(site) + " ";
      throw ReconstructError("enumeration-order disagreement (order " + o + "): deviation " +
                             std::to_string(dev));
    }
  };
  if (static_cast<std::size_t>(n) <= opts.full_order_limit) {
    std::vector<int> perm = order;
    while (std::next_permutation(perm.begin(), perm.end())) compare_order(perm);
  } else {
    if (info) info->verification_sampled = true;
    detail::Rng rng(seed_for(opts.seed, "1f_orders"));
    for (int d = 0; d < opts.sampled_orders; ++d) {
      std::vector<int> perm = order;
      for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.below(i))]);
      }
      compare_order(perm);
    }
  }

  return FiniteField(idx.master(), idx.alphabet(), finalize_joint(std::move(joint), opts, info));
}

FiniteField field_from_palm(const PalmSpec& spec, const ReconstructOptions& opts,
                            ReconstructionInfo* info) {
  const SpecTable& tab = spec.table();
  const MasterIndex& idx = tab.idx;
  const int n = idx.sites();
  if (n < 2) {
    throw DomainError("palm reconstruction needs at least two sites");
  }
  const Mask full = idx.full_mask();

  auto assemble = [&](int t) {
    const int s0 = t == 0 ? 1 : 0;
    const std::vector<double> pt = point_marginal(tab, t, s0, 0);
    // the single-site marginal must not depend on the probe
    for (int s = 0; s < n; ++s) {
      if (s == t) continue;
      for (std::uint64_t y = 0; y < static_cast<std::uint64_t>(idx.radix()); ++y) {
        const double dev = max_abs_dev(pt, point_marginal(tab, t, s, y));
        bump(info, dev);
        if (dev > opts.tol.eq) {
          throw ReconstructError(
              "probe disagreement for the anchor marginal at " +
              idx.master().point(static_cast<std::size_t>(t)).to_string() + ": probe s=" +
              idx.master().point(static_cast<std::size_t>(s)).to_string() + ",y=" +
              std::to_string(y) + " deviates by " + std::to_string(dev));
        }
      }
    }
    const Mask tm = Mask{1} << t;
    const Mask rest = full & ~tm;
    const Block* b = tab.find(rest, tm);
    if (!b) throw ReconstructError("palm table lacks the conditional slice off the anchor");
    std::vector<std::uint64_t> rofs, tofs;
    idx.merge_offsets(rest, full, rofs);
    idx.merge_offsets(tm, full, tofs);
    std::vector<double> joint(static_cast<std::size_t>(idx.count(full)));
    for (std::uint64_t a = 0; a < idx.count(tm); ++a) {
      for (std::uint64_t r = 0; r < idx.count(rest); ++r) {
        joint[static_cast<std::size_t>(tofs[static_cast<std::size_t>(a)] +
                                       rofs[static_cast<std::size_t>(r)])] =
            pt[static_cast<std::size_t>(a)] * b->at(a, r);
      }
    }
    return joint;
  };

  std::vector<double> joint = assemble(0);
  for (int t = 1; t < n; ++t) {
    const std::vector<double> other = assemble(t);
    double dev = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i) {
      dev = std::max(dev, residual(joint[i], other[i]));
    }
    bump(info, dev);
    if (info) ++info->probes_checked;
    if (dev > opts.tol.eq) {
      throw ReconstructError("anchor disagreement: anchor " +
                             idx.master().point(static_cast<std::size_t>(t)).to_string() +
                             " deviates by " + std::to_string(dev));
    }
  }
  return FiniteField(idx.master(), idx.alphabet(), finalize_joint(std::move(joint), opts, info));
}

namespace {

void check_lift_budget(const MasterIndex& idx, const SpecOptions& opts) {
  if (idx.count(idx.full_mask()) > opts.state_cap) {
    throw ResourceError("master window exceeds the joint-state cap");
  }
}

// q_V^z(x) as the telescoping product of one-point entries along the
// canonical order of V's sites restricted by `order` (positions into V).
double product_entry(const SpecTable& tab, const std::vector<int>& sites, Mask smask,
                     const std::uint8_t* zd, const std::uint8_t* xd,
                     const std::vector<int>& order) {
  const MasterIndex& idx = tab.idx;
  double p = 1.0;
  Mask seen = 0;
  for (int j : order) {
    const int site = sites[static_cast<std::size_t>(j)];
    const Mask boundary = smask | seen;
    const Block* b = tab.find(Mask{1} << site, boundary);
    if (!b) throw ReconstructError("one-point entry missing during the lift");
    std::uint8_t merged[32];
    std::memcpy(merged, zd, sizeof(merged));
    for (Mask rest = seen; rest;) {
      const int q = std::countr_zero(rest);
      rest &= rest - 1;
      merged[q] = xd[q];
    }
    p *= b->at(idx.rank_of_digits(boundary, merged), xd[site]);
    seen |= Mask{1} << site;
  }
  return p;
}

std::vector<int> identity_order(std::size_t m) {
  std::vector<int> o(m);
  std::iota(o.begin(), o.end(), 0);
  return o;
}

}  // namespace

FSpec lift_1f_to_f_product(const OneFSpec& spec, const ReconstructOptions& opts,
                           const SpecOptions& table_opts, ReconstructionInfo* info) {
  const SpecTable& in = spec.table();
  const MasterIndex& idx = in.idx;
  check_lift_budget(idx, table_opts);
  const Mask full = idx.full_mask();

  SpecTable out(idx);
  std::uint64_t used = 0;
  for (Mask v = 1; v <= full; ++v) {
    if (static_cast<std::size_t>(detail::popcount(v)) > table_opts.max_window) {
      if (v == full) break;
      continue;
    }
    std::vector<int> sites;
    for (Mask rest = v; rest;) {
      sites.push_back(std::countr_zero(rest));
      rest &= rest - 1;
    }
    const std::vector<int> order = identity_order(sites.size());
    detail::for_each_submask(full & ~v, [&](Mask s) {
      if (detail::popcount(v) == 1) {
        const Block* src = in.find(v, s);
        if (!src) throw ReconstructError("one-point entry missing during the lift");
        used += src->nz * src->nx;
        if (used > table_opts.table_budget) {
          throw ResourceError("lifted table exceeds the entry budget");
        }
        out.emplace(v, s, *src);  // exact copy: the one-point slice is the input
        return;
      }
      Block b;
      b.nz = idx.count(s);
      b.nx = idx.count(v);
      used += b.nz * b.nx;
      if (used > table_opts.table_budget) {
        throw ResourceError("lifted table exceeds the entry budget");
      }
      b.p.resize(static_cast<std::size_t>(b.nz * b.nx));
      std::uint8_t zd[32] = {};
      std::uint64_t zr = 0;
      do {
        std::uint8_t xd[32] = {};
        std::uint64_t xr = 0;
        double* row = b.row(zr);
        do {
          row[xr] = product_entry(in, sites, s, zd, xd, order);
          ++xr;
        } while (detail::next_config(v, idx.radix(), xd));
        ++zr;
      } while (detail::next_config(s, idx.radix(), zd));
      out.emplace(v, s, std::move(b));
    });
    if (v == full) break;
  }

  // order independence on a seeded sample of keys
  detail::Rng rng(seed_for(opts.seed, "lift_orders"));
  const auto keys = out.sorted_keys();
  for (int d = 0; d < opts.sampled_probes; ++d) {
    const auto [v, s] = keys[static_cast<std::size_t>(rng.below(keys.size()))];
    if (detail::popcount(v) < 2) continue;
    std::vector<int> sites;
    for (Mask rest = v; rest;) {
      sites.push_back(std::countr_zero(rest));
      rest &= rest - 1;
    }
    std::vector<int> alt = identity_order(sites.size());
    for (std::size_t i = alt.size(); i > 1; --i) {
      std::swap(alt[i - 1], alt[static_cast<std::size_t>(rng.below(i))]);
    }
    const Block* b = out.find(v, s);
    const std::uint64_t zr = rng.below(b->nz);
    std::uint8_t zd[32] = {};
    idx.digits_of_rank(s, zr, zd);
    std::uint8_t xd[32] = {};
    std::uint64_t xr = 0;
    do {
      const double alt_val = product_entry(in, sites, s, zd, xd, alt);
      const double dev = residual(b->at(zr, xr), alt_val);
      bump(info, dev);
      if (dev > opts.tol.eq) {
        throw ReconstructError("enumeration-order disagreement in the lift at V=" +
                               idx.window_of(v).to_string() + " z=" + config_str(idx, s, zr));
      }
      ++xr;
    } while (detail::next_config(v, idx.radix(), xd));
    if (info) ++info->probes_checked;
  }
  if (info) info->verification_sampled = true;
  return FSpec(std::move(out));
}

namespace {

// One row of the ratio lift: q_V^z(.) with reference configuration u.
// Boundary of the j-th factor carries z, x before position j, u after it.
void ratio_row(const SpecTable& in, Mask v, const std::vector<int>& sites, Mask smask,
               const std::uint8_t* zd, const std::uint8_t* ud, double* row) {
  const MasterIndex& idx = in.idx;
  const int k = idx.radix();
  const std::size_t m = sites.size();

  std::vector<const Block*> factors(m);
  std::vector<Mask> boundary(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Mask rest_of_v = v & ~(Mask{1} << sites[j]);
    boundary[j] = smask | rest_of_v;
    factors[j] = in.find(Mask{1} << sites[j], boundary[j]);
    if (!factors[j]) throw ReconstructError("one-point entry missing during the ratio lift");
  }

  std::uint8_t xd[32] = {};
  std::uint64_t xr = 0;
  double sum = 0.0;
  do {
    double term = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      std::uint8_t merged[32];
      std::memcpy(merged, zd, sizeof(merged));
      for (std::size_t i = 0; i < m; ++i) {
        if (i == j) continue;
        const int site = sites[i];
        merged[site] = i < j ? xd[site] : ud[site];
      }
      const std::uint64_t br = idx.rank_of_digits(boundary[j], merged);
      const Block* b = factors[j];
      term *= b->at(br, xd[sites[j]]) / b->at(br, ud[sites[j]]);
    }
    row[xr] = term;
    sum += term;
    ++xr;
  } while (detail::next_config(v, k, xd));
  const std::uint64_t nx = xr;
  for (std::uint64_t i = 0; i < nx; ++i) row[i] /= sum;
}

}  // namespace

FSpec lift_1f_to_f_ratio(const OneFSpec& spec, const ReconstructOptions& opts,
                         const SpecOptions& table_opts, ReconstructionInfo* info) {
  const SpecTable& in = spec.table();
  const MasterIndex& idx = in.idx;
  check_lift_budget(idx, table_opts);
  const Mask full = idx.full_mask();

  SpecTable out(idx);
  std::uint64_t used = 0;
  const std::uint8_t uzero[32] = {};
  for (Mask v = 1; v <= full; ++v) {
    if (static_cast<std::size_t>(detail::popcount(v)) > table_opts.max_window) {
      if (v == full) break;
      continue;
    }
    std::vector<int> sites;
    for (Mask rest = v; rest;) {
      sites.push_back(std::countr_zero(rest));
      rest &= rest - 1;
    }
    detail::for_each_submask(full & ~v, [&](Mask s) {
      if (detail::popcount(v) == 1) {
        const Block* src = in.find(v, s);
        if (!src) throw ReconstructError("one-point entry missing during the ratio lift");
        used += src->nz * src->nx;
        if (used > table_opts.table_budget) {
          throw ResourceError("lifted table exceeds the entry budget");
        }
        out.emplace(v, s, *src);  // the formula degenerates to the identity here
        return;
      }
      Block b;
      b.nz = idx.count(s);
      b.nx = idx.count(v);
      used += b.nz * b.nx;
      if (used > table_opts.table_budget) {
        throw ResourceError("lifted table exceeds the entry budget");
      }
      b.p.resize(static_cast<std::size_t>(b.nz * b.nx));
      std::uint8_t zd[32] = {};
      std::uint64_t zr = 0;
      do {
        ratio_row(in, v, sites, s, zd, uzero, b.row(zr));
        ++zr;
      } while (detail::next_config(s, idx.radix(), zd));
      out.emplace(v, s, std::move(b));
    });
    if (v == full) break;
  }

  // reference-configuration independence on a seeded sample of keys
  detail::Rng rng(seed_for(opts.seed, "lift_reference"));
  const auto keys = out.sorted_keys();
  std::vector<double> alt_row;
  for (int d = 0; d < opts.sampled_probes; ++d) {
    const auto [v, s] = keys[static_cast<std::size_t>(rng.below(keys.size()))];
    if (detail::popcount(v) < 2) continue;
    std::vector<int> sites;
    for (Mask rest = v; rest;) {
      sites.push_back(std::countr_zero(rest));
      rest &= rest - 1;
    }
    const Block* b = out.find(v, s);
    const std::uint64_t zr = rng.below(b->nz);
    std::uint8_t zd[32] = {};
    idx.digits_of_rank(s, zr, zd);
    std::uint8_t ud[32] = {};
    idx.digits_of_rank(v, rng.below(b->nx), ud);
    alt_row.assign(static_cast<std::size_t>(b->nx), 0.0);
    ratio_row(in, v, sites, s, zd, ud, alt_row.data());
    for (std::uint64_t x = 0; x < b->nx; ++x) {
      const double dev = residual(b->at(zr, x), alt_row[static_cast<std::size_t>(x)]);
      bump(info, dev);
      if (dev > opts.tol.eq) {
        throw ReconstructError("reference-configuration disagreement in the ratio lift at V=" +
                               idx.window_of(v).to_string());
      }
    }
    if (info) ++info->probes_checked;
  }
  if (info) info->verification_sampled = true;
  return FSpec(std::move(out));
}

FSpec lift_palm_to_f(const PalmSpec& spec, const ReconstructOptions& opts,
                     const SpecOptions& table_opts, ReconstructionInfo* info) {
  const SpecTable& in = spec.table();
  const MasterIndex& idx = in.idx;
  check_lift_budget(idx, table_opts);
  const int n = idx.sites();
  if (n < 2) throw DomainError("palm lift needs at least two sites");
  const Mask full = idx.full_mask();

  // anchored quotient entry for |s(z)| >= 2
  auto quotient_entry = [&](Mask v, Mask s, int anchor, std::uint64_t zr, std::uint64_t xr) {
    const Mask am = Mask{1} << anchor;
    const Mask srest = s & ~am;
    const Block* bnum = in.find(v | srest, am);
    const Block* bden = in.find(srest, am);
    if (!bnum || !bden) throw ReconstructError("palm entry missing during the lift");
    std::uint8_t zd[32] = {};
    idx.digits_of_rank(s, zr, zd);
    std::uint8_t xd[32] = {};
    idx.digits_of_rank(v, xr, xd);
    const std::uint64_t arank = zd[anchor];
    const std::uint64_t den_rank = idx.rank_of_digits(srest, zd);
    const std::uint64_t num_rank =
        idx.partial_rank(v, v | srest, xd) + idx.partial_rank(srest, v | srest, zd);
    return bnum->at(arank, num_rank) / bden->at(arank, den_rank);
  };

  // marginals for the empty-boundary entries, anchored at each window's
  // first site
  std::vector<std::vector<double>> point_marg(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    point_marg[static_cast<std::size_t>(t)] = point_marginal(in, t, t == 0 ? 1 : 0, 0);
  }
  auto marginal_entry = [&](Mask v, std::uint64_t xr) {
    const int t = std::countr_zero(v);
    std::uint8_t xd[32] = {};
    idx.digits_of_rank(v, xr, xd);
    double p = point_marg[static_cast<std::size_t>(t)][xd[t]];
    const Mask rest = v & ~(Mask{1} << t);
    if (rest) {
      const Block* b = in.find(rest, Mask{1} << t);
      if (!b) throw ReconstructError("palm entry missing during the lift");
      p *= b->at(xd[t], idx.rank_of_digits(rest, xd));
    }
    return p;
  };

  SpecTable out(idx);
  std::uint64_t used = 0;
  for (Mask v = 1; v <= full; ++v) {
    if (static_cast<std::size_t>(detail::popcount(v)) > table_opts.max_window) {
      if (v == full) break;
      continue;
    }
    detail::for_each_submask(full & ~v, [&](Mask s) {
      const int sc = detail::popcount(s);
      if (sc == 1) {
        const Block* src = in.find(v, s);
        if (!src) throw ReconstructError("palm entry missing during the lift");
        used += src->nz * src->nx;
        if (used > table_opts.table_budget) {
          throw ResourceError("lifted table exceeds the entry budget");
        }
        out.emplace(v, s, *src);  // the Palm slice is the input
        return;
      }
      Block b;
      b.nz = idx.count(s);
      b.nx = idx.count(v);
      used += b.nz * b.nx;
      if (used > table_opts.table_budget) {
        throw ResourceError("lifted table exceeds the entry budget");
      }
      b.p.resize(static_cast<std::size_t>(b.nz * b.nx));
      if (sc == 0) {
        double* row = b.row(0);
        for (std::uint64_t x = 0; x < b.nx; ++x) row[x] = marginal_entry(v, x);
      } else {
        const int anchor = std::countr_zero(s);
        for (std::uint64_t z = 0; z < b.nz; ++z) {
          double* row = b.row(z);
          for (std::uint64_t x = 0; x < b.nx; ++x) row[x] = quotient_entry(v, s, anchor, z, x);
        }
      }
      out.emplace(v, s, std::move(b));
    });
    if (v == full) break;
  }

  // anchor independence on a seeded sample of keys with |s(z)| >= 2
  detail::Rng rng(seed_for(opts.seed, "palm_anchor"));
  const auto keys = out.sorted_keys();
  for (int d = 0; d < opts.sampled_probes; ++d) {
    const auto [v, s] = keys[static_cast<std::size_t>(rng.below(keys.size()))];
    if (detail::popcount(s) < 2) continue;
    const Block* b = out.find(v, s);
    const std::uint64_t zr = rng.below(b->nz);
    const std::uint64_t xr = rng.below(b->nx);
    for (Mask rest = s; rest;) {
      const int anchor = std::countr_zero(rest);
      rest &= rest - 1;
      const double dev = residual(b->at(zr, xr), quotient_entry(v, s, anchor, zr, xr));
      bump(info, dev);
      if (dev > opts.tol.eq) {
        throw ReconstructError("anchor disagreement in the palm lift at V=" +
                               idx.window_of(v).to_string() + " z=" + config_str(idx, s, zr));
      }
    }
    if (info) ++info->probes_checked;
  }
  if (info) info->verification_sampled = true;
  return FSpec(std::move(out));
}

double dlr_residual(const FSpec& spec, const FiniteField& field, const CheckOptions& opts,
                    bool* sampled) {
  const SpecTable& tab = spec.table();
  const MasterIndex& idx = tab.idx;
  if (field.master() != idx.master() || field.alphabet() != idx.alphabet()) {
    throw DomainError("dlr residual needs a shared master window and alphabet");
  }
  detail::MarginalTable marg(idx, field.joint().table());

  double worst = 0.0;
  const std::vector<detail::RoleSpec> roles = {
      {.min_size = 1, .cfg = 1},               // V carries x
      {.min_size = 0, .cfg = 0, .summed = 1},  // Λ is averaged over
  };
  auto res = detail::run_space(idx, roles, opts, "dlr_residual", 1.0, [&](const detail::Sample& s) {
    const Mask V = s.mask[0], L = s.mask[1];
    const std::uint8_t* xd = s.dig[0][0];
    const Block* b = tab.find(V, L);
    if (!b) throw DomainError("specification lacks the (V, boundary) entry for the DLR sum");
    const std::uint64_t xr = idx.rank_of_digits(V, xd);
    const std::vector<double>& pl = marg.table(L);
    double acc = 0.0;
    for (std::uint64_t z = 0; z < b->nz; ++z) {
      acc += b->at(z, xr) * pl[static_cast<std::size_t>(z)];
    }
    worst = std::max(worst, std::abs(marg.table(V)[static_cast<std::size_t>(xr)] - acc));
  });
  if (sampled) *sampled = res.sampled;
  return worst;
}

}  // namespace condfield
