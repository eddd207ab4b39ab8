#include "condfield/analysis.hpp"

#include <unordered_map>

#include "check_internal.hpp"
#include "condfield/consistency.hpp"
#include "condfield/reconstruct.hpp"

namespace condfield {

using detail::Block;
using detail::Mask;
using detail::MarginalTable;
using detail::MasterIndex;
using detail::ReportBuilder;
using detail::SpecTable;

double RhoMatrix::value(const LatticePoint& t, const LatticePoint& s) const {
  auto ti = master.index_of(t);
  auto si = master.index_of(s);
  if (!ti || !si) throw DomainError("rho matrix does not cover " + t.to_string());
  return value(*ti, *si);
}

namespace {

// Boundary of V under the neighborhood system, clipped to the master window,
// as a site mask.
Mask boundary_mask(const MasterIndex& idx, const NeighborhoodSystem& nb, Mask v) {
  const Window w = idx.window_of(v);
  const Window b = boundary(nb, w).set_intersect(idx.master());
  return idx.mask_of(b);
}

// Shared Markov checker: compares q_V^z against q_V^{z_B} for every boundary
// condition covering B = neighborhood boundary of V. Exhaustive under the
// budget, deterministic draws beyond it.
Report markov_impl(const SpecTable& tab, const NeighborhoodSystem& nb, bool one_point,
                   const std::string& name, const CheckOptions& opts) {
  const MasterIndex& idx = tab.idx;
  const Mask full = idx.full_mask();
  const int k = idx.radix();
  ReportBuilder rb(name, opts.tol.eq);

  struct Job {
    Mask v;
    Mask b;
    Mask ext;
  };
  std::vector<Job> jobs;
  long double total_work = 0;
  for (Mask v = 1; v <= full; ++v) {
    if (!one_point || detail::popcount(v) == 1) {
      const Mask b = boundary_mask(idx, nb, v);
      const Mask ext = full & ~v & ~b;
      if (ext) {
        jobs.push_back({v, b, ext});
        // strict supersets of B: k^{|B|} (sum over nonempty S' of k^{|S'|}) x values
        total_work += static_cast<long double>(idx.count(b)) *
                      (std::pow(static_cast<long double>(1 + k), detail::popcount(ext)) - 1.0L) *
                      static_cast<long double>(idx.count(v));
      }
    }
    if (v == full) break;
  }

  auto eval = [&](Mask v, Mask b, Mask s, const std::uint8_t* zd) {
    const Block* bs = tab.find(v, s);
    const Block* bb = tab.find(v, b);
    if (!bs || !bb) {
      rb.structural("missing table entry for V=" + idx.window_of(v).to_string());
      return;
    }
    const std::uint64_t zr = idx.rank_of_digits(s, zd);
    const std::uint64_t zb = idx.rank_of_digits(b, zd);
    for (std::uint64_t x = 0; x < bs->nx; ++x) {
      rb.record(residual(bs->at(zr, x), bb->at(zb, x)), [&] {
        return "V=" + idx.window_of(v).to_string() + " z=" + detail::describe_digits(idx, s, zd) +
               " boundary=" + idx.window_of(b).to_string() +
               " x=" + idx.describe_config(v, x);
      });
    }
  };

  bool sampled = false;
  if (total_work <= static_cast<long double>(opts.work_budget)) {
    for (const Job& job : jobs) {
      detail::for_each_submask(job.ext, [&](Mask extra) {
        if (!extra) return;  // z supported exactly on B repeats the base entry
        const Mask s = job.b | extra;
        std::uint8_t zd[32] = {};
        do {
          eval(job.v, job.b, s, zd);
        } while (detail::next_config(s, k, zd));
      });
    }
  } else if (!jobs.empty()) {
    sampled = true;
    detail::Rng rng(seed_for(opts.seed, name));
    long double done = 0;
    std::uint64_t attempts = 0;
    const std::uint64_t max_attempts = 64 * opts.work_budget;
    while (done < static_cast<long double>(opts.work_budget) && attempts < max_attempts) {
      ++attempts;
      const Job& job = jobs[static_cast<std::size_t>(rng.below(jobs.size()))];
      Mask extra = rng.any_submask(job.ext);
      if (!extra) continue;
      const Mask s = job.b | extra;
      std::uint8_t zd[32] = {};
      idx.digits_of_rank(s, rng.below(idx.count(s)), zd);
      eval(job.v, job.b, s, zd);
      done += static_cast<long double>(idx.count(job.v));
    }
  }

  std::string note;
  if (jobs.empty()) {
    note = "no boundary condition extends past the neighborhood";
  } else if (sampled) {
    note = "sampled";
  }
  return rb.finish(sampled, note);
}

}  // namespace

Report is_markov_fspec(const FSpec& spec, const NeighborhoodSystem& nb,
                       const CheckOptions& opts) {
  return markov_impl(spec.table(), nb, false, "fspec_markov", opts);
}

Report is_markov_1f(const OneFSpec& spec, const NeighborhoodSystem& nb,
                    const CheckOptions& opts) {
  return markov_impl(spec.table(), nb, true, "onefspec_markov", opts);
}

Report markov_lift_preservation(const OneFSpec& spec, const NeighborhoodSystem& nb,
                                const CheckOptions& opts) {
  const Report one = is_markov_1f(spec, nb, opts);
  const FSpec lifted = lift_1f_to_f_product(spec, ReconstructOptions{.tol = opts.tol, .seed = opts.seed});
  const Report full = is_markov_fspec(lifted, nb, opts);

  Report r;
  r.check_name = "markov_lift_preservation";
  r.tolerance = opts.tol.eq;
  r.count_checked = one.count_checked + full.count_checked;
  r.sampled = one.sampled || full.sampled;
  r.passed = one.passed == full.passed;
  r.worst_violation = r.passed ? 0.0 : 1.0;
  r.note = std::string("one-point verdict ") + (one.passed ? "pass" : "fail") +
           ", lifted verdict " + (full.passed ? "pass" : "fail");
  if (!r.passed) r.witness = r.note;
  return r;
}

namespace {

Report markov_full_boundary(const FiniteField& field, const NeighborhoodSystem& nb,
                            const CheckOptions& opts) {
  MasterIndex idx(field.master(), field.alphabet());
  MarginalTable marg(idx, field.joint().table());
  const Mask full = idx.full_mask();
  const int k = idx.radix();
  ReportBuilder rb("dspec_markov_full", opts.tol.eq);

  long double total_work = 0;
  for (Mask v = 1; v <= full; ++v) {
    total_work += static_cast<long double>(idx.count(full & ~v)) *
                  static_cast<long double>(idx.count(v));
    if (v == full) break;
  }
  const bool sampled = total_work > static_cast<long double>(opts.work_budget);

  auto eval = [&](Mask v, const std::uint8_t* zd) {
    const Mask comp = full & ~v;
    const Mask b = boundary_mask(idx, nb, v);
    const std::uint64_t zfull = idx.rank_of_digits(comp, zd);
    const std::uint64_t zb = idx.rank_of_digits(b, zd);
    for (std::uint64_t x = 0; x < idx.count(v); ++x) {
      const double lhs = marg.conditional(v, x, comp, zfull);
      const double rhs = marg.conditional(v, x, b, zb);
      rb.record(residual(lhs, rhs), [&] {
        return "V=" + idx.window_of(v).to_string() + " z=" +
               detail::describe_digits(idx, comp, zd) + " x=" + idx.describe_config(v, x);
      });
    }
  };

  if (!sampled) {
    for (Mask v = 1; v <= full; ++v) {
      const Mask comp = full & ~v;
      std::uint8_t zd[32] = {};
      do {
        eval(v, zd);
      } while (detail::next_config(comp, k, zd));
      if (v == full) break;
    }
  } else {
    detail::Rng rng(seed_for(opts.seed, "dspec_markov_full"));
    long double done = 0;
    while (done < static_cast<long double>(opts.work_budget)) {
      Mask v = 0;
      while (!v) v = rng.any_submask(full);
      std::uint8_t zd[32] = {};
      idx.digits_of_rank(full & ~v, rng.below(idx.count(full & ~v)), zd);
      eval(v, zd);
      done += static_cast<long double>(idx.count(v));
    }
  }
  return rb.finish(sampled, sampled ? "sampled" : "");
}

}  // namespace

std::vector<Report> markov_equivalence_check(const FiniteField& field,
                                             const NeighborhoodSystem& nb,
                                             const CheckOptions& opts) {
  std::vector<Report> out;
  const FSpec fs = fspec_from_field(field);
  out.push_back(is_markov_fspec(fs, nb, opts));
  out.push_back(markov_full_boundary(field, nb, opts));

  Report agree;
  agree.check_name = "markov_verdict_agreement";
  agree.tolerance = opts.tol.eq;
  agree.count_checked = out[0].count_checked + out[1].count_checked;
  agree.sampled = out[0].sampled || out[1].sampled;
  agree.passed = out[0].passed == out[1].passed;
  agree.worst_violation = agree.passed ? 0.0 : 1.0;
  agree.note = std::string("partial-boundary verdict ") + (out[0].passed ? "pass" : "fail") +
               ", full-boundary verdict " + (out[1].passed ? "pass" : "fail");
  if (!agree.passed) agree.witness = agree.note;
  out.push_back(agree);

  out.push_back(sullivan_check(field, opts));
  return out;
}

RhoMatrix mixing_rho_matrix(const FiniteField& field, const CheckOptions& opts) {
  MasterIndex idx(field.master(), field.alphabet());
  MarginalTable marg(idx, field.joint().table());
  const int n = idx.sites();
  const int k = idx.radix();
  const Mask full = idx.full_mask();

  RhoMatrix rho;
  rho.master = field.master();
  rho.values.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);

  const long double per_pair =
      std::pow(static_cast<long double>(1 + k), n - 2) * static_cast<long double>(k) *
      static_cast<long double>(k);
  const long double total_work = per_pair * static_cast<long double>(n) *
                                 static_cast<long double>(n - 1);
  rho.sampled = total_work > static_cast<long double>(opts.work_budget);

  // sup over (S, w) of max_x [max_y - min_y] of Q_t^{wy}(x)
  auto scan_pair = [&](int t, int s, auto&& draw_supports) {
    const Mask tm = Mask{1} << t;
    const Mask sm = Mask{1} << s;
    double best = 0.0;
    draw_supports([&](Mask S, const std::uint8_t* wd) {
      const Mask num_mask = tm | S | sm;
      const Mask den_mask = S | sm;
      for (int x = 0; x < k; ++x) {
        double lo = 2.0, hi = -1.0;
        for (int y = 0; y < k; ++y) {
          std::uint8_t d[32];
          std::memcpy(d, wd, sizeof(d));
          d[t] = static_cast<std::uint8_t>(x);
          d[s] = static_cast<std::uint8_t>(y);
          const double q = marg.value(num_mask, idx.rank_of_digits(num_mask, d)) /
                           marg.value(den_mask, idx.rank_of_digits(den_mask, d));
          lo = std::min(lo, q);
          hi = std::max(hi, q);
        }
        best = std::max(best, hi - lo);
      }
    });
    return best;
  };

  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < n; ++s) {
      if (s == t) continue;
      const Mask rest = full & ~(Mask{1} << t) & ~(Mask{1} << s);
      double val = 0.0;
      if (!rho.sampled) {
        val = scan_pair(t, s, [&](auto&& visit) {
          detail::for_each_submask(rest, [&](Mask S) {
            std::uint8_t wd[32] = {};
            do {
              visit(S, wd);
            } while (detail::next_config(S, k, wd));
          });
        });
      } else {
        detail::Rng rng(seed_for(opts.seed ^ (static_cast<std::uint64_t>(t) << 8 | s),
                                 "mixing_rho"));
        const std::uint64_t draws =
            std::max<std::uint64_t>(1, opts.work_budget / (static_cast<std::uint64_t>(n) *
                                                           static_cast<std::uint64_t>(n - 1) *
                                                           static_cast<std::uint64_t>(k) * k));
        val = scan_pair(t, s, [&](auto&& visit) {
          for (std::uint64_t d = 0; d < draws; ++d) {
            const Mask S = rng.any_submask(rest);
            std::uint8_t wd[32] = {};
            idx.digits_of_rank(S, rng.below(idx.count(S)), wd);
            visit(S, wd);
          }
        });
      }
      rho.values[static_cast<std::size_t>(t) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(s)] = val;
    }
  }
  return rho;
}

Report mixing_bound_check(const FiniteField& field, const Window& V, const Window& L,
                          const CheckOptions& opts) {
  if (V.empty() || L.empty() || !V.disjoint_with(L)) {
    throw DomainError("mixing bound needs disjoint nonempty windows");
  }
  MasterIndex idx(field.master(), field.alphabet());
  MarginalTable marg(idx, field.joint().table());
  const Mask vm = idx.mask_of(V);
  const Mask lm = idx.mask_of(L);

  // lhs: sup over x, z of |P_V(x) - Q_V^z(x)|
  double lhs = 0.0;
  const std::vector<double>& pv = marg.table(vm);
  for (std::uint64_t z = 0; z < idx.count(lm); ++z) {
    for (std::uint64_t x = 0; x < idx.count(vm); ++x) {
      lhs = std::max(lhs, std::abs(pv[static_cast<std::size_t>(x)] -
                                   marg.conditional(vm, x, lm, z)));
    }
  }

  const RhoMatrix rho = mixing_rho_matrix(field, opts);
  double rhs = 0.0;
  for (const LatticePoint& t : V) {
    for (const LatticePoint& s : L) {
      rhs += rho.value(t, s);
    }
  }

  Report r;
  r.check_name = "mixing_bound";
  r.tolerance = opts.tol.eq;
  r.worst_violation = std::max(0.0, lhs - rhs);
  r.count_checked = idx.count(vm) * idx.count(lm);
  r.sampled = rho.sampled;
  r.passed = r.worst_violation <= r.tolerance;
  r.note = "lhs=" + std::to_string(lhs) + " rhs=" + std::to_string(rhs) +
           (rho.sampled ? "; rho sampled (lower bound)" : "");
  if (!r.passed) {
    r.witness = "V=" + V.to_string() + " L=" + L.to_string();
  }
  return r;
}

Report mixing_bound_sweep(const FiniteField& field, const CheckOptions& opts) {
  MasterIndex idx(field.master(), field.alphabet());
  MarginalTable marg(idx, field.joint().table());
  const RhoMatrix rho = mixing_rho_matrix(field, opts);
  const Mask full = idx.full_mask();
  ReportBuilder rb("mixing_bound_sweep", opts.tol.eq);

  long double total_work = 0;
  for (Mask v = 1; v <= full; ++v) {
    detail::for_each_submask(full & ~v, [&](Mask l) {
      if (l) total_work += static_cast<long double>(idx.count(v) * idx.count(l));
    });
    if (v == full) break;
  }
  const bool truncated = total_work > static_cast<long double>(opts.work_budget);

  long double done = 0;
  for (Mask v = 1; v <= full && !(truncated && done >= static_cast<long double>(opts.work_budget));
       ++v) {
    const Mask compv = full & ~v;
    detail::for_each_submask(compv, [&](Mask l) {
      if (!l) return;
      if (truncated && done >= static_cast<long double>(opts.work_budget)) return;
      done += static_cast<long double>(idx.count(v) * idx.count(l));

      double rhs = 0.0;
      for (Mask rt = v; rt;) {
        const int t = std::countr_zero(rt);
        rt &= rt - 1;
        for (Mask rs = l; rs;) {
          const int s = std::countr_zero(rs);
          rs &= rs - 1;
          rhs += rho.value(static_cast<std::size_t>(t), static_cast<std::size_t>(s));
        }
      }
      double lhs = 0.0;
      const std::vector<double>& pv = marg.table(v);
      for (std::uint64_t z = 0; z < idx.count(l); ++z) {
        for (std::uint64_t x = 0; x < idx.count(v); ++x) {
          lhs = std::max(lhs, std::abs(pv[static_cast<std::size_t>(x)] -
                                       marg.conditional(v, x, l, z)));
        }
      }
      rb.record(std::max(0.0, lhs - rhs), [&] {
        return "V=" + idx.window_of(v).to_string() + " L=" + idx.window_of(l).to_string();
      });
    });
    if (v == full) break;
  }

  std::string note = rho.sampled ? "rho sampled (lower bound)" : "";
  if (truncated) note += std::string(note.empty() ? "" : "; ") + "budget truncation";
  // each record covers one (V, L) pair
  return rb.finish(truncated || rho.sampled, note);
}

double dobrushin_coefficient(const FiniteField& field, const LatticePoint& t,
                             const CheckOptions& opts, bool* sampled) {
  MasterIndex idx(field.master(), field.alphabet());
  auto tpos = field.master().index_of(t);
  if (!tpos) throw DomainError("site " + t.to_string() + " is not in the master window");
  MarginalTable marg(idx, field.joint().table());
  const int n = idx.sites();
  const int k = idx.radix();
  const Mask full = idx.full_mask();
  const Mask tm = Mask{1} << static_cast<int>(*tpos);

  const long double per_site = std::pow(static_cast<long double>(k), n - 2) *
                               static_cast<long double>(k) * static_cast<long double>(k) *
                               static_cast<long double>(k);
  const bool sample_mode =
      per_site * static_cast<long double>(n - 1) > static_cast<long double>(opts.work_budget);
  if (sampled) *sampled = sample_mode;

  double coeff = 0.0;
  for (int s = 0; s < n; ++s) {
    if ((Mask{1} << s) & tm) continue;
    const Mask sm = Mask{1} << s;
    const Mask rest = full & ~tm & ~sm;
    const Mask comp = full & ~tm;  // full boundary support of Q_t

    // sup over w and value pairs (y, v) at s of TV between the two
    // conditioned one-point distributions
    double best = 0.0;
    auto visit = [&](const std::uint8_t* wd_in) {
      std::uint8_t d[32];
      std::memcpy(d, wd_in, sizeof(d));
      std::vector<double> q(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
      for (int y = 0; y < k; ++y) {
        d[s] = static_cast<std::uint8_t>(y);
        const std::uint64_t zr = idx.rank_of_digits(comp, d);
        for (int x = 0; x < k; ++x) {
          q[static_cast<std::size_t>(y) * k + x] =
              marg.conditional(tm, static_cast<std::uint64_t>(x), comp, zr);
        }
      }
      for (int y = 0; y < k; ++y) {
        for (int v = y + 1; v < k; ++v) {
          double tv = 0.0;
          for (int x = 0; x < k; ++x) {
            tv += std::abs(q[static_cast<std::size_t>(y) * k + x] -
                           q[static_cast<std::size_t>(v) * k + x]);
          }
          best = std::max(best, 0.5 * tv);
        }
      }
    };

    if (!sample_mode) {
      std::uint8_t wd[32] = {};
      do {
        visit(wd);
      } while (detail::next_config(rest, k, wd));
    } else {
      detail::Rng rng(seed_for(opts.seed ^ static_cast<std::uint64_t>(s), "dobrushin"));
      const std::uint64_t draws = std::max<std::uint64_t>(
          1, opts.work_budget / (static_cast<std::uint64_t>(n - 1) *
                                 static_cast<std::uint64_t>(k) * k * k));
      for (std::uint64_t dcount = 0; dcount < draws; ++dcount) {
        std::uint8_t wd[32] = {};
        idx.digits_of_rank(rest, rng.below(idx.count(rest)), wd);
        visit(wd);
      }
    }
    coeff += best;
  }
  return coeff;
}

Report sullivan_check(const FiniteField& field, const CheckOptions& opts) {
  MasterIndex idx(field.master(), field.alphabet());
  MarginalTable marg(idx, field.joint().table());
  const Mask full = idx.full_mask();
  const int k = idx.radix();
  ReportBuilder rb("sullivan_bounds", opts.sullivan_slack);

  long double total_work = 0;
  for (Mask v = 1; v <= full; ++v) {
    total_work += 2.0L * static_cast<long double>(idx.count(v)) *
                  std::pow(static_cast<long double>(1 + k), detail::popcount(full & ~v));
    if (v == full) break;
  }
  const bool truncated = total_work > static_cast<long double>(opts.work_budget);

  long double done = 0;
  std::uint64_t windows_covered = 0;
  for (Mask v = 1; v <= full; ++v) {
    if (truncated && done >= static_cast<long double>(opts.work_budget)) break;
    const Mask comp = full & ~v;
    const std::uint64_t nx = idx.count(v);
    done += 2.0L * static_cast<long double>(nx) *
            std::pow(static_cast<long double>(1 + k), detail::popcount(comp));
    ++windows_covered;

    // envelope[L][z*nx + x]: min/max of the full-boundary conditional over
    // extensions of z; peeled one site at a time from L = comp downward
    std::unordered_map<Mask, std::vector<double>> lo, hi;
    std::vector<Mask> order;
    detail::for_each_submask(comp, [&](Mask m) { order.push_back(m); });
    std::sort(order.begin(), order.end(),
              [](Mask a, Mask b) { return detail::popcount(a) > detail::popcount(b); });

    {
      std::vector<double> base(static_cast<std::size_t>(idx.count(comp) * nx));
      std::vector<std::uint64_t> vofs, cofs;
      idx.merge_offsets(v, full, vofs);
      idx.merge_offsets(comp, full, cofs);
      const std::vector<double>& joint = marg.table(full);
      const std::vector<double>& den = marg.table(comp);
      for (std::uint64_t z = 0; z < idx.count(comp); ++z) {
        for (std::uint64_t x = 0; x < nx; ++x) {
          base[static_cast<std::size_t>(z * nx + x)] =
              joint[static_cast<std::size_t>(cofs[static_cast<std::size_t>(z)] +
                                             vofs[static_cast<std::size_t>(x)])] /
              den[static_cast<std::size_t>(z)];
        }
      }
      lo[comp] = base;
      hi[comp] = std::move(base);
    }

    std::vector<std::uint64_t> ofs;
    for (Mask m : order) {
      if (m == comp) continue;
      const int t = std::countr_zero(comp & ~m);
      const Mask parent = m | (Mask{1} << t);
      const std::uint64_t tw = idx.weight_in(parent, t);
      idx.merge_offsets(m, parent, ofs);
      const std::vector<double>& plo = lo[parent];
      const std::vector<double>& phi = hi[parent];
      std::vector<double> mlo(static_cast<std::size_t>(idx.count(m) * nx));
      std::vector<double> mhi(mlo.size());
      for (std::uint64_t z = 0; z < idx.count(m); ++z) {
        const std::uint64_t base = ofs[static_cast<std::size_t>(z)];
        for (std::uint64_t x = 0; x < nx; ++x) {
          double l = plo[static_cast<std::size_t>((base + 0 * tw) * nx + x)];
          double h = phi[static_cast<std::size_t>((base + 0 * tw) * nx + x)];
          for (int a = 1; a < k; ++a) {
            l = std::min(l, plo[static_cast<std::size_t>(
                                (base + static_cast<std::uint64_t>(a) * tw) * nx + x)]);
            h = std::max(h, phi[static_cast<std::size_t>(
                                (base + static_cast<std::uint64_t>(a) * tw) * nx + x)]);
          }
          mlo[static_cast<std::size_t>(z * nx + x)] = l;
          mhi[static_cast<std::size_t>(z * nx + x)] = h;
        }
      }
      lo[m] = std::move(mlo);
      hi[m] = std::move(mhi);
    }

    // compare the partial-boundary conditionals against their envelopes
    std::vector<std::uint64_t> vofs2, lofs;
    for (Mask m : order) {
      if (m == comp) continue;  // the envelope is the value itself there
      const Mask u = v | m;
      idx.merge_offsets(v, u, vofs2);
      idx.merge_offsets(m, u, lofs);
      const std::vector<double>& num = marg.table(u);
      const std::vector<double>& den = marg.table(m);
      const std::vector<double>& mlo = lo[m];
      const std::vector<double>& mhi = hi[m];
      for (std::uint64_t z = 0; z < idx.count(m); ++z) {
        const double pz = den[static_cast<std::size_t>(z)];
        for (std::uint64_t x = 0; x < nx; ++x) {
          const double q =
              num[static_cast<std::size_t>(lofs[static_cast<std::size_t>(z)] +
                                           vofs2[static_cast<std::size_t>(x)])] /
              pz;
          const double viol = std::max(mlo[static_cast<std::size_t>(z * nx + x)] - q,
                                       q - mhi[static_cast<std::size_t>(z * nx + x)]);
          rb.record(std::max(0.0, viol), [&] {
            return "V=" + idx.window_of(v).to_string() + " z=" + idx.describe_config(m, z) +
                   " x=" + idx.describe_config(v, x);
          });
        }
      }
    }
    if (v == full) break;
  }

  std::string note;
  if (truncated) {
    note = "budget truncation; covered the first " + std::to_string(windows_covered) +
           " windows in canonical order";
  }
  return rb.finish(truncated, note);
}

namespace {

Report positivity_from_min(const std::string& name, double min_entry, std::string where,
                           const CheckOptions& opts, std::uint64_t count) {
  Report r;
  r.check_name = name;
  r.tolerance = opts.tol.eq;
  r.count_checked = count;
  r.passed = min_entry > 0.0;
  r.worst_violation = r.passed ? 0.0 : 1.0 + std::abs(min_entry);
  r.note = "min entry = " + std::to_string(min_entry);
  if (!r.passed) r.witness = std::move(where);
  return r;
}

template <class SpecT>
Report positivity_spec(const std::string& name, const SpecT& spec, const CheckOptions& opts) {
  const SpecTable& tab = spec.table();
  double min_entry = 1.0;
  std::string where = "all entries positive";
  for (const auto& [v, s] : tab.sorted_keys()) {
    const Block* b = tab.find(v, s);
    for (std::uint64_t z = 0; z < b->nz; ++z) {
      for (std::uint64_t x = 0; x < b->nx; ++x) {
        if (b->at(z, x) < min_entry) {
          min_entry = b->at(z, x);
          where = tab.idx.describe_key(v, s, z) + " x=" + tab.idx.describe_config(v, x);
        }
      }
    }
  }
  return positivity_from_min(name, min_entry, std::move(where), opts, tab.entry_count());
}

}  // namespace

Report positivity_check(const FiniteField& field, const CheckOptions& opts) {
  const std::vector<double>& joint = field.joint().table();
  double min_entry = 1.0;
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (joint[i] < min_entry) {
      min_entry = joint[i];
      argmin = i;
    }
  }
  MasterIndex idx(field.master(), field.alphabet());
  return positivity_from_min("field_positivity", min_entry,
                             "joint at " + idx.describe_config(idx.full_mask(), argmin), opts,
                             joint.size());
}

Report positivity_check(const FSpec& spec, const CheckOptions& opts) {
  return positivity_spec("fspec_positivity", spec, opts);
}
Report positivity_check(const OneFSpec& spec, const CheckOptions& opts) {
  return positivity_spec("onefspec_positivity", spec, opts);
}
Report positivity_check(const PalmSpec& spec, const CheckOptions& opts) {
  return positivity_spec("palm_positivity", spec, opts);
}
Report positivity_check(const DSpecFinite& spec, const CheckOptions& opts) {
  return positivity_spec("dspec_positivity", spec, opts);
}

}  // namespace condfield
