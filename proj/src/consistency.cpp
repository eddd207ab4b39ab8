#include "condfield/consistency.hpp"

#include "check_internal.hpp"

namespace condfield {

using detail::Block;
using detail::describe_digits;
using detail::describe_window;
using detail::Mask;
using detail::MasterIndex;
using detail::ReportBuilder;
using detail::RoleSpec;
using detail::run_space;
using detail::Sample;
using detail::sampled_note;
using detail::SpecTable;

namespace {

struct Ctx {
  const SpecTable& tab;
  const MasterIndex& idx;
  detail::BlockIndex bi;
  ReportBuilder& rb;
  Ctx(const SpecTable& t, ReportBuilder& r) : tab(t), idx(t.idx), bi(t), rb(r) {}
};

const Block* need(Ctx& ctx, Mask v, Mask s) {
  const Block* b = ctx.bi.find(v, s);
  if (!b) {
    ctx.rb.structural("missing table entry for V=" + describe_window(ctx.idx, v) +
                      " with boundary support " + describe_window(ctx.idx, s));
  }
  return b;
}

// q_{V∪I}^z(xy) = q_V^z(x) q_I^{zx}(y) evaluated from digit slots
// xd on V, yd on I, zd on S.
void eval_product_split(Ctx& ctx, Mask V, Mask I, Mask S,
                        const std::uint8_t* xd, const std::uint8_t* yd,
                        const std::uint8_t* zd) {
  const MasterIndex& idx = ctx.idx;
  const Block* bU = need(ctx, V | I, S);
  const Block* bV = need(ctx, V, S);
  const Block* bI = need(ctx, I, S | V);
  if (!bU || !bV || !bI) return;
  const std::uint64_t zr = idx.rank_of_digits(S, zd);
  const std::uint64_t xyr = idx.partial_rank(V, V | I, xd) + idx.partial_rank(I, V | I, yd);
  const std::uint64_t zxr = idx.partial_rank(S, S | V, zd) + idx.partial_rank(V, S | V, xd);
  const double lhs = bU->at(zr, xyr);
  const double rhs = bV->at(zr, idx.rank_of_digits(V, xd)) * bI->at(zxr, idx.rank_of_digits(I, yd));
  ctx.rb.record(residual(lhs, rhs), [&] {
    return "V=" + describe_window(idx, V) + " I=" + describe_window(idx, I) +
           " z=" + describe_digits(idx, S, zd) + " x=" + describe_digits(idx, V, xd) +
           " y=" + describe_digits(idx, I, yd);
  });
}

// q_V^{zy}(x) q_I^{zx}(v) q_V^{zv}(u) q_I^{zu}(y) =
// q_V^{zy}(u) q_I^{zu}(v) q_V^{zv}(x) q_I^{zx}(y)
void eval_four_factor(Ctx& ctx, Mask V, Mask I, Mask S,
                      const std::uint8_t* xd, const std::uint8_t* ud,
                      const std::uint8_t* yd, const std::uint8_t* vd,
                      const std::uint8_t* zd) {
  const MasterIndex& idx = ctx.idx;
  const Block* bV = need(ctx, V, S | I);
  const Block* bI = need(ctx, I, S | V);
  if (!bV || !bI) return;
  const std::uint64_t zpartV = idx.partial_rank(S, S | I, zd);  // boundary of V entries
  const std::uint64_t zpartI = idx.partial_rank(S, S | V, zd);  // boundary of I entries
  const std::uint64_t zy = zpartV + idx.partial_rank(I, S | I, yd);
  const std::uint64_t zv = zpartV + idx.partial_rank(I, S | I, vd);
  const std::uint64_t zx = zpartI + idx.partial_rank(V, S | V, xd);
  const std::uint64_t zu = zpartI + idx.partial_rank(V, S | V, ud);
  const std::uint64_t xr = idx.rank_of_digits(V, xd);
  const std::uint64_t ur = idx.rank_of_digits(V, ud);
  const std::uint64_t yr = idx.rank_of_digits(I, yd);
  const std::uint64_t vr = idx.rank_of_digits(I, vd);
  const double lhs = bV->at(zy, xr) * bI->at(zx, vr) * bV->at(zv, ur) * bI->at(zu, yr);
  const double rhs = bV->at(zy, ur) * bI->at(zu, vr) * bV->at(zv, xr) * bI->at(zx, yr);
  ctx.rb.record(residual(lhs, rhs), [&] {
    return "V=" + describe_window(idx, V) + " I=" + describe_window(idx, I) +
           " z=" + describe_digits(idx, S, zd) + " x=" + describe_digits(idx, V, xd) +
           " u=" + describe_digits(idx, V, ud) + " y=" + describe_digits(idx, I, yd) +
           " v=" + describe_digits(idx, I, vd);
  });
}

// q_{V∪W}^z(xy) q_V^{zy}(u) = q_{V∪W}^z(uy) q_V^{zy}(x); the boundary mask B
// may be a partial support or the full complement.
void eval_exchange_pair(Ctx& ctx, Mask V, Mask W, Mask B,
                        const std::uint8_t* xd, const std::uint8_t* ud,
                        const std::uint8_t* yd, const std::uint8_t* zd) {
  const MasterIndex& idx = ctx.idx;
  const Block* bU = need(ctx, V | W, B);
  const Block* bV = need(ctx, V, B | W);
  if (!bU || !bV) return;
  const std::uint64_t zr = idx.rank_of_digits(B, zd);
  const std::uint64_t zy = idx.partial_rank(B, B | W, zd) + idx.partial_rank(W, B | W, yd);
  const std::uint64_t pyU = idx.partial_rank(W, V | W, yd);
  const std::uint64_t xy = idx.partial_rank(V, V | W, xd) + pyU;
  const std::uint64_t uy = idx.partial_rank(V, V | W, ud) + pyU;
  const double lhs = bU->at(zr, xy) * bV->at(zy, idx.rank_of_digits(V, ud));
  const double rhs = bU->at(zr, uy) * bV->at(zy, idx.rank_of_digits(V, xd));
  ctx.rb.record(residual(lhs, rhs), [&] {
    return "V=" + describe_window(idx, V) + " I=" + describe_window(idx, W) +
           " z=" + describe_digits(idx, B, zd) + " x=" + describe_digits(idx, V, xd) +
           " u=" + describe_digits(idx, V, ud) + " y=" + describe_digits(idx, W, yd);
  });
}

}  // namespace

Report check_fspec(const FSpec& spec, const CheckOptions& opts) {
  const SpecTable& tab = spec.table();
  ReportBuilder rb("fspec_consistency", opts.tol.eq);
  Ctx ctx(tab, rb);
  const std::vector<RoleSpec> roles = {
      {.min_size = 1, .cfg = 1},                // V carries x
      {.min_size = 1, .cfg = 1},                // I carries y
      {.min_size = 0, .cfg = 1},                // S carries z, may be empty
  };
  auto res = run_space(tab.idx, roles, opts, "fspec_consistency", 1.0, [&](const Sample& s) {
    eval_product_split(ctx, s.mask[0], s.mask[1], s.mask[2], s.dig[0][0], s.dig[1][0],
                       s.dig[2][0]);
  });
  return rb.finish(res.sampled, sampled_note(res));
}

std::vector<Report> check_fspec_derived(const FSpec& spec, const CheckOptions& opts) {
  const SpecTable& tab = spec.table();
  const MasterIndex& idx = tab.idx;
  std::vector<Report> out;

  {  // four-factor exchange, empty boundary included
    ReportBuilder rb("fspec_lemma_4x4", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .cfg = 2},  // V carries x, u
        {.min_size = 1, .cfg = 2},  // I carries y, v
        {.min_size = 0, .cfg = 1},  // S carries z
    };
    auto res = run_space(idx, roles, opts, "fspec_lemma_4x4", 1.0, [&](const Sample& s) {
      eval_four_factor(ctx, s.mask[0], s.mask[1], s.mask[2], s.dig[0][0], s.dig[0][1],
                       s.dig[1][0], s.dig[1][1], s.dig[2][0]);
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  {  // three-window cycle q_V^w(x) q_I^x(y) q_J^y(w) = q_I^w(y) q_V^y(x) q_J^x(w)
    ReportBuilder rb("fspec_lemma_3x3", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .cfg = 1},  // V carries x
        {.min_size = 1, .cfg = 1},  // I carries y
        {.min_size = 1, .cfg = 1},  // J carries w
    };
    auto res = run_space(idx, roles, opts, "fspec_lemma_3x3", 1.0, [&](const Sample& s) {
      const Mask V = s.mask[0], I = s.mask[1], J = s.mask[2];
      const std::uint8_t* xd = s.dig[0][0];
      const std::uint8_t* yd = s.dig[1][0];
      const std::uint8_t* wd = s.dig[2][0];
      const Block* bVJ = need(ctx, V, J);
      const Block* bIV = need(ctx, I, V);
      const Block* bJI = need(ctx, J, I);
      const Block* bIJ = need(ctx, I, J);
      const Block* bVI = need(ctx, V, I);
      const Block* bJV = need(ctx, J, V);
      if (!bVJ || !bIV || !bJI || !bIJ || !bVI || !bJV) return;
      const std::uint64_t xr = idx.rank_of_digits(V, xd);
      const std::uint64_t yr = idx.rank_of_digits(I, yd);
      const std::uint64_t wr = idx.rank_of_digits(J, wd);
      const double lhs = bVJ->at(wr, xr) * bIV->at(xr, yr) * bJI->at(yr, wr);
      const double rhs = bIJ->at(wr, yr) * bVI->at(yr, xr) * bJV->at(xr, wr);
      rb.record(residual(lhs, rhs), [&] {
        return "V=" + describe_window(idx, V) + " I=" + describe_window(idx, I) +
               " J=" + describe_window(idx, J) + " x=" + describe_digits(idx, V, xd) +
               " y=" + describe_digits(idx, I, yd) + " w=" + describe_digits(idx, J, wd);
      });
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  {  // fraction identity q_{V∪L}^y(xz) / q_{I∪L}^x(yz) = q_V^y(x) / q_I^x(y)
    ReportBuilder rb("fspec_fraction", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .cfg = 1},  // V carries x
        {.min_size = 1, .cfg = 1},  // I carries y
        {.min_size = 1, .cfg = 1},  // L carries z
    };
    auto res = run_space(idx, roles, opts, "fspec_fraction", 1.0, [&](const Sample& s) {
      const Mask V = s.mask[0], I = s.mask[1], L = s.mask[2];
      const std::uint8_t* xd = s.dig[0][0];
      const std::uint8_t* yd = s.dig[1][0];
      const std::uint8_t* zd = s.dig[2][0];
      const Block* bVL = need(ctx, V | L, I);
      const Block* bIL = need(ctx, I | L, V);
      const Block* bV = need(ctx, V, I);
      const Block* bI = need(ctx, I, V);
      if (!bVL || !bIL || !bV || !bI) return;
      const std::uint64_t xr = idx.rank_of_digits(V, xd);
      const std::uint64_t yr = idx.rank_of_digits(I, yd);
      const std::uint64_t xz = idx.partial_rank(V, V | L, xd) + idx.partial_rank(L, V | L, zd);
      const std::uint64_t yz = idx.partial_rank(I, I | L, yd) + idx.partial_rank(L, I | L, zd);
      const double lhs = bVL->at(yr, xz) / bIL->at(xr, yz);
      const double rhs = bV->at(yr, xr) / bI->at(xr, yr);
      rb.record(residual(lhs, rhs), [&] {
        return "V=" + describe_window(idx, V) + " I=" + describe_window(idx, I) +
               " L=" + describe_window(idx, L) + " x=" + describe_digits(idx, V, xd) +
               " y=" + describe_digits(idx, I, yd) + " z=" + describe_digits(idx, L, zd);
      });
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  {  // fixed-boundary Kolmogorov consistency: sum_y q_{V∪I}^z(xy) = q_V^z(x)
    ReportBuilder rb("fspec_kolmogorov", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .cfg = 1},               // V carries x
        {.min_size = 1, .cfg = 0, .summed = 1},  // I is summed over
        {.min_size = 0, .cfg = 1},               // L carries z
    };
    auto res = run_space(idx, roles, opts, "fspec_kolmogorov", 1.0, [&](const Sample& s) {
      const Mask V = s.mask[0], I = s.mask[1], L = s.mask[2];
      const std::uint8_t* xd = s.dig[0][0];
      const std::uint8_t* zd = s.dig[2][0];
      const Block* bU = need(ctx, V | I, L);
      const Block* bV = need(ctx, V, L);
      if (!bU || !bV) return;
      const std::uint64_t zr = idx.rank_of_digits(L, zd);
      const std::uint64_t xpart = idx.partial_rank(V, V | I, xd);
      double sum = 0.0;
      std::uint8_t yd[32] = {};
      do {
        sum += bU->at(zr, xpart + idx.partial_rank(I, V | I, yd));
      } while (detail::next_config(I, idx.radix(), yd));
      const double rhs = bV->at(zr, idx.rank_of_digits(V, xd));
      rb.record(residual(sum, rhs), [&] {
        return "V=" + describe_window(idx, V) + " I=" + describe_window(idx, I) +
               " z=" + describe_digits(idx, L, zd) + " x=" + describe_digits(idx, V, xd);
      });
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  {  // exchange form: q_{V∪I}^z(xy) q_I^{zx}(v) = q_{V∪I}^z(xv) q_I^{zx}(y)
    ReportBuilder rb("fspec_exchange", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .cfg = 1},  // V carries x
        {.min_size = 1, .cfg = 2},  // I carries y, v
        {.min_size = 0, .cfg = 1},  // S carries z
    };
    auto res = run_space(idx, roles, opts, "fspec_exchange", 1.0, [&](const Sample& s) {
      const Mask V = s.mask[0], I = s.mask[1], S = s.mask[2];
      const std::uint8_t* xd = s.dig[0][0];
      const std::uint8_t* yd = s.dig[1][0];
      const std::uint8_t* vd = s.dig[1][1];
      const std::uint8_t* zd = s.dig[2][0];
      const Block* bU = need(ctx, V | I, S);
      const Block* bI = need(ctx, I, S | V);
      if (!bU || !bI) return;
      const std::uint64_t zr = idx.rank_of_digits(S, zd);
      const std::uint64_t zx = idx.partial_rank(S, S | V, zd) + idx.partial_rank(V, S | V, xd);
      const std::uint64_t xpart = idx.partial_rank(V, V | I, xd);
      const std::uint64_t xy = xpart + idx.partial_rank(I, V | I, yd);
      const std::uint64_t xv = xpart + idx.partial_rank(I, V | I, vd);
      const double lhs = bU->at(zr, xy) * bI->at(zx, idx.rank_of_digits(I, vd));
      const double rhs = bU->at(zr, xv) * bI->at(zx, idx.rank_of_digits(I, yd));
      rb.record(residual(lhs, rhs), [&] {
        return "V=" + describe_window(idx, V) + " I=" + describe_window(idx, I) +
               " z=" + describe_digits(idx, S, zd) + " x=" + describe_digits(idx, V, xd) +
               " y=" + describe_digits(idx, I, yd) + " v=" + describe_digits(idx, I, vd);
      });
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  {  // single-site exchange: q_{V∪s}^z(xy) q_V^{zy}(u) = q_{V∪s}^z(uy) q_V^{zy}(x)
    ReportBuilder rb("fspec_exchange_single", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .cfg = 2},                // V carries x, u
        {.min_size = 1, .max_size = 1, .cfg = 1},  // single site s carries y
        {.min_size = 0, .cfg = 1},                // S carries z
    };
    auto res = run_space(idx, roles, opts, "fspec_exchange_single", 1.0, [&](const Sample& s) {
      eval_exchange_pair(ctx, s.mask[0], s.mask[1], s.mask[2], s.dig[0][0], s.dig[0][1],
                         s.dig[1][0], s.dig[2][0]);
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  {  // boundary reduction: q_V^z from the zy-extended entries
    ReportBuilder rb("fspec_boundary_reduction", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .cfg = 0, .summed = 1},  // V: x reported, alpha summed
        {.min_size = 1, .cfg = 1},               // I carries y
        {.min_size = 0, .cfg = 1},               // S carries z
    };
    auto res = run_space(idx, roles, opts, "fspec_boundary_reduction", 2.0, [&](const Sample& s) {
      const Mask V = s.mask[0], I = s.mask[1], S = s.mask[2];
      const std::uint8_t* yd = s.dig[1][0];
      const std::uint8_t* zd = s.dig[2][0];
      const Block* bV = need(ctx, V, S);            // q_V^z
      const Block* bVzy = need(ctx, V, S | I);      // q_V^{zy}
      const Block* bIzx = need(ctx, I, S | V);      // q_I^{zx}
      if (!bV || !bVzy || !bIzx) return;
      const std::uint64_t zr = idx.rank_of_digits(S, zd);
      const std::uint64_t yr = idx.rank_of_digits(I, yd);
      const std::uint64_t zy = idx.partial_rank(S, S | I, zd) + idx.partial_rank(I, S | I, yd);
      const std::uint64_t zpart = idx.partial_rank(S, S | V, zd);
      // one pass for the normalizer, one for the comparisons
      double denom = 0.0;
      std::uint8_t ad[32] = {};
      std::uint64_t ar = 0;
      do {
        denom += bVzy->at(zy, ar) / bIzx->at(zpart + idx.partial_rank(V, S | V, ad), yr);
        ++ar;
      } while (detail::next_config(V, idx.radix(), ad));
      std::memset(ad, 0, sizeof(ad));
      ar = 0;
      do {
        const double lhs = bV->at(zr, ar);
        const double rhs =
            bVzy->at(zy, ar) / bIzx->at(zpart + idx.partial_rank(V, S | V, ad), yr) / denom;
        rb.record(residual(lhs, rhs), [&] {
          return "V=" + describe_window(idx, V) + " I=" + describe_window(idx, I) +
                 " z=" + describe_digits(idx, S, zd) + " y=" + describe_digits(idx, I, yd) +
                 " x=" + describe_digits(idx, V, ad);
        });
        ++ar;
      } while (detail::next_config(V, idx.radix(), ad));
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  return out;
}

Report check_1fspec(const OneFSpec& spec, const CheckOptions& opts) {
  const SpecTable& tab = spec.table();
  ReportBuilder rb("onefspec_consistency", opts.tol.eq);
  Ctx ctx(tab, rb);
  const std::vector<RoleSpec> roles = {
      {.min_size = 1, .max_size = 1, .cfg = 1},  // t carries x
      {.min_size = 1, .max_size = 1, .cfg = 1},  // s carries y
      {.min_size = 0, .cfg = 1},                 // S carries z
  };
  auto res = run_space(tab.idx, roles, opts, "onefspec_consistency", 1.0, [&](const Sample& s) {
    const MasterIndex& idx = tab.idx;
    const Mask T = s.mask[0], S2 = s.mask[1], S = s.mask[2];
    const std::uint8_t* xd = s.dig[0][0];
    const std::uint8_t* yd = s.dig[1][0];
    const std::uint8_t* zd = s.dig[2][0];
    const Block* bT = need(ctx, T, S);
    const Block* bSzx = need(ctx, S2, S | T);
    const Block* bS = need(ctx, S2, S);
    const Block* bTzy = need(ctx, T, S | S2);
    if (!bT || !bSzx || !bS || !bTzy) return;
    const std::uint64_t zr = idx.rank_of_digits(S, zd);
    const std::uint64_t xr = idx.rank_of_digits(T, xd);
    const std::uint64_t yr = idx.rank_of_digits(S2, yd);
    const std::uint64_t zx = idx.partial_rank(S, S | T, zd) + idx.partial_rank(T, S | T, xd);
    const std::uint64_t zy = idx.partial_rank(S, S | S2, zd) + idx.partial_rank(S2, S | S2, yd);
    const double lhs = bT->at(zr, xr) * bSzx->at(zx, yr);
    const double rhs = bS->at(zr, yr) * bTzy->at(zy, xr);
    rb.record(residual(lhs, rhs), [&] {
      return "t=" + describe_window(idx, T) + " s=" + describe_window(idx, S2) +
             " z=" + describe_digits(idx, S, zd) + " x=" + describe_digits(idx, T, xd) +
             " y=" + describe_digits(idx, S2, yd);
    });
  });
  return rb.finish(res.sampled, sampled_note(res));
}

std::vector<Report> check_1f_derived(const OneFSpec& spec, const CheckOptions& opts) {
  const SpecTable& tab = spec.table();
  const MasterIndex& idx = tab.idx;
  std::vector<Report> out;

  {
    ReportBuilder rb("onefspec_lemma_4x4", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .max_size = 1, .cfg = 2},
        {.min_size = 1, .max_size = 1, .cfg = 2},
        {.min_size = 0, .cfg = 1},
    };
    auto res = run_space(idx, roles, opts, "onefspec_lemma_4x4", 1.0, [&](const Sample& s) {
      eval_four_factor(ctx, s.mask[0], s.mask[1], s.mask[2], s.dig[0][0], s.dig[0][1],
                       s.dig[1][0], s.dig[1][1], s.dig[2][0]);
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  {  // q_t^w(x) q_s^x(y) q_r^y(w) = q_s^w(y) q_t^y(x) q_r^x(w)
    ReportBuilder rb("onefspec_lemma_3x3", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .max_size = 1, .cfg = 1},
        {.min_size = 1, .max_size = 1, .cfg = 1},
        {.min_size = 1, .max_size = 1, .cfg = 1},
    };
    auto res = run_space(idx, roles, opts, "onefspec_lemma_3x3", 1.0, [&](const Sample& s) {
      const Mask T = s.mask[0], S2 = s.mask[1], R = s.mask[2];
      const std::uint8_t* xd = s.dig[0][0];
      const std::uint8_t* yd = s.dig[1][0];
      const std::uint8_t* wd = s.dig[2][0];
      const Block* bTR = need(ctx, T, R);
      const Block* bST = need(ctx, S2, T);
      const Block* bRS = need(ctx, R, S2);
      const Block* bSR = need(ctx, S2, R);
      const Block* bTS = need(ctx, T, S2);
      const Block* bRT = need(ctx, R, T);
      if (!bTR || !bST || !bRS || !bSR || !bTS || !bRT) return;
      const std::uint64_t xr = idx.rank_of_digits(T, xd);
      const std::uint64_t yr = idx.rank_of_digits(S2, yd);
      const std::uint64_t wr = idx.rank_of_digits(R, wd);
      const double lhs = bTR->at(wr, xr) * bST->at(xr, yr) * bRS->at(yr, wr);
      const double rhs = bSR->at(wr, yr) * bTS->at(yr, xr) * bRT->at(xr, wr);
      rb.record(residual(lhs, rhs), [&] {
        return "t=" + describe_window(idx, T) + " s=" + describe_window(idx, S2) +
               " r=" + describe_window(idx, R) + " x=" + describe_digits(idx, T, xd) +
               " y=" + describe_digits(idx, S2, yd) + " w=" + describe_digits(idx, R, wd);
      });
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  return out;
}

std::vector<Report> check_palm(const PalmSpec& spec, const CheckOptions& opts) {
  const SpecTable& tab = spec.table();
  const MasterIndex& idx = tab.idx;
  std::vector<Report> out;

  {  // q_t^y(x) q_{s∪V}^x(yu) = q_s^x(y) q_{t∪V}^y(xu)
    ReportBuilder rb("palm_exchange", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .max_size = 1, .cfg = 1},  // t carries x
        {.min_size = 1, .max_size = 1, .cfg = 1},  // s carries y
        {.min_size = 0, .cfg = 1},                 // V carries u
    };
    auto res = run_space(idx, roles, opts, "palm_exchange", 1.0, [&](const Sample& s) {
      const Mask T = s.mask[0], S2 = s.mask[1], V = s.mask[2];
      const std::uint8_t* xd = s.dig[0][0];
      const std::uint8_t* yd = s.dig[1][0];
      const std::uint8_t* ud = s.dig[2][0];
      const Block* bT = need(ctx, T, S2);        // q_t^y
      const Block* bSV = need(ctx, S2 | V, T);   // q_{s∪V}^x
      const Block* bS = need(ctx, S2, T);        // q_s^x
      const Block* bTV = need(ctx, T | V, S2);   // q_{t∪V}^y
      if (!bT || !bSV || !bS || !bTV) return;
      const std::uint64_t xr = idx.rank_of_digits(T, xd);
      const std::uint64_t yr = idx.rank_of_digits(S2, yd);
      const std::uint64_t yu = idx.partial_rank(S2, S2 | V, yd) + idx.partial_rank(V, S2 | V, ud);
      const std::uint64_t xu = idx.partial_rank(T, T | V, xd) + idx.partial_rank(V, T | V, ud);
      const double lhs = bT->at(yr, xr) * bSV->at(xr, yu);
      const double rhs = bS->at(xr, yr) * bTV->at(yr, xu);
      rb.record(residual(lhs, rhs), [&] {
        return "t=" + describe_window(idx, T) + " s=" + describe_window(idx, S2) +
               " V=" + describe_window(idx, V) + " x=" + describe_digits(idx, T, xd) +
               " y=" + describe_digits(idx, S2, yd) + " u=" + describe_digits(idx, V, ud);
      });
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  {  // sum_y q_{V∪I}^z(xy) = q_V^z(x) under a single-site boundary
    ReportBuilder rb("palm_marginalization", opts.tol.eq);
  Ctx ctx(tab, rb);
    const std::vector<RoleSpec> roles = {
        {.min_size = 1, .max_size = 1, .cfg = 1},  // t carries z
        {.min_size = 1, .cfg = 1},                 // V carries x
        {.min_size = 1, .cfg = 0, .summed = 1},    // I summed
    };
    auto res = run_space(idx, roles, opts, "palm_marginalization", 1.0, [&](const Sample& s) {
      const Mask T = s.mask[0], V = s.mask[1], I = s.mask[2];
      const std::uint8_t* zd = s.dig[0][0];
      const std::uint8_t* xd = s.dig[1][0];
      const Block* bU = need(ctx, V | I, T);
      const Block* bV = need(ctx, V, T);
      if (!bU || !bV) return;
      const std::uint64_t zr = idx.rank_of_digits(T, zd);
      const std::uint64_t xpart = idx.partial_rank(V, V | I, xd);
      double sum = 0.0;
      std::uint8_t yd[32] = {};
      do {
        sum += bU->at(zr, xpart + idx.partial_rank(I, V | I, yd));
      } while (detail::next_config(I, idx.radix(), yd));
      const double rhs = bV->at(zr, idx.rank_of_digits(V, xd));
      rb.record(residual(sum, rhs), [&] {
        return "t=" + describe_window(idx, T) + " V=" + describe_window(idx, V) +
               " I=" + describe_window(idx, I) + " z=" + describe_digits(idx, T, zd) +
               " x=" + describe_digits(idx, V, xd);
      });
    });
    out.push_back(rb.finish(res.sampled, sampled_note(res)));
  }

  return out;
}

Report check_dspec(const DSpecFinite& spec, const CheckOptions& opts) {
  const SpecTable& tab = spec.table();
  const MasterIndex& idx = tab.idx;
  ReportBuilder rb("dspec_consistency", opts.tol.eq);
  Ctx ctx(tab, rb);
  const std::vector<RoleSpec> roles = {
      {.min_size = 1, .cfg = 1},                           // V carries x
      {.min_size = 1, .cfg = 1, .summed = 1},              // I carries y, beta summed
      {.min_size = 0, .cfg = 1, .rest = true},             // full-complement boundary
  };
  auto res = run_space(idx, roles, opts, "dspec_consistency", 1.0, [&](const Sample& s) {
    const Mask V = s.mask[0], I = s.mask[1], R = s.mask[2];
    const std::uint8_t* xd = s.dig[0][0];
    const std::uint8_t* yd = s.dig[1][0];
    const std::uint8_t* zd = s.dig[2][0];
    const Block* bU = need(ctx, V | I, R);
    const Block* bI = need(ctx, I, R | V);
    if (!bU || !bI) return;
    const std::uint64_t zr = idx.rank_of_digits(R, zd);
    const std::uint64_t xpart = idx.partial_rank(V, V | I, xd);
    const std::uint64_t zx = idx.partial_rank(R, R | V, zd) + idx.partial_rank(V, R | V, xd);
    double beta_sum = 0.0;
    std::uint8_t bd[32] = {};
    do {
      beta_sum += bU->at(zr, xpart + idx.partial_rank(I, V | I, bd));
    } while (detail::next_config(I, idx.radix(), bd));
    const double lhs = bU->at(zr, xpart + idx.partial_rank(I, V | I, yd));
    const double rhs = bI->at(zx, idx.rank_of_digits(I, yd)) * beta_sum;
    rb.record(residual(lhs, rhs), [&] {
      return "V=" + describe_window(idx, V) + " I=" + describe_window(idx, I) +
             " z=" + describe_digits(idx, R, zd) + " x=" + describe_digits(idx, V, xd) +
             " y=" + describe_digits(idx, I, yd);
    });
  });
  return rb.finish(res.sampled, sampled_note(res));
}

Report check_dspec_equivalent(const DSpecFinite& spec, const CheckOptions& opts) {
  const SpecTable& tab = spec.table();
  ReportBuilder rb("dspec_exchange", opts.tol.eq);
  Ctx ctx(tab, rb);
  const std::vector<RoleSpec> roles = {
      {.min_size = 1, .cfg = 2},                // V carries x, u
      {.min_size = 1, .cfg = 1},                // I carries y
      {.min_size = 0, .cfg = 1, .rest = true},  // boundary
  };
  auto res = run_space(tab.idx, roles, opts, "dspec_exchange", 1.0, [&](const Sample& s) {
    eval_exchange_pair(ctx, s.mask[0], s.mask[1], s.mask[2], s.dig[0][0], s.dig[0][1],
                       s.dig[1][0], s.dig[2][0]);
  });
  return rb.finish(res.sampled, sampled_note(res));
}

Report check_1dspec(const DSpecFinite& spec, const CheckOptions& opts) {
  const SpecTable& tab = spec.table();
  ReportBuilder rb("onedspec_consistency", opts.tol.eq);
  Ctx ctx(tab, rb);
  const std::vector<RoleSpec> roles = {
      {.min_size = 1, .max_size = 1, .cfg = 2},  // t carries x, u
      {.min_size = 1, .max_size = 1, .cfg = 2},  // s carries y, v
      {.min_size = 0, .cfg = 1, .rest = true},   // boundary on the rest
  };
  auto res = run_space(tab.idx, roles, opts, "onedspec_consistency", 1.0, [&](const Sample& s) {
    eval_four_factor(ctx, s.mask[0], s.mask[1], s.mask[2], s.dig[0][0], s.dig[0][1],
                     s.dig[1][0], s.dig[1][1], s.dig[2][0]);
  });
  return rb.finish(res.sampled, sampled_note(res));
}

namespace {

template <class SpecT>
SpecT perturb_impl(const SpecT& spec, std::uint64_t seed, double delta, Perturbation* info) {
  if (!(delta > 0.0)) throw DomainError("perturbation delta must be positive");
  SpecT copy = spec;
  SpecTable& tab = copy.mutable_table();
  const auto keys = tab.sorted_keys();
  detail::Rng rng(seed_for(seed, "perturbation"));
  const auto [v, s] = keys[static_cast<std::size_t>(rng.below(keys.size()))];
  Block* b = tab.find(v, s);
  const std::uint64_t z = rng.below(b->nz);
  const std::uint64_t x = rng.below(b->nx);
  double* row = b->row(z);
  row[x] += delta;
  double sum = 0.0;
  for (std::uint64_t i = 0; i < b->nx; ++i) sum += row[i];
  for (std::uint64_t i = 0; i < b->nx; ++i) row[i] /= sum;
  if (info) {
    info->V = tab.idx.window_of(v);
    info->z = tab.idx.config_of(s, z);
    info->x = tab.idx.config_of(v, x);
    info->delta = delta;
  }
  return copy;
}

}  // namespace

FSpec perturbed(const FSpec& spec, std::uint64_t seed, double delta, Perturbation* info) {
  return perturb_impl(spec, seed, delta, info);
}
OneFSpec perturbed(const OneFSpec& spec, std::uint64_t seed, double delta, Perturbation* info) {
  return perturb_impl(spec, seed, delta, info);
}
PalmSpec perturbed(const PalmSpec& spec, std::uint64_t seed, double delta, Perturbation* info) {
  return perturb_impl(spec, seed, delta, info);
}
DSpecFinite perturbed(const DSpecFinite& spec, std::uint64_t seed, double delta,
                      Perturbation* info) {
  return perturb_impl(spec, seed, delta, info);
}

}  // namespace condfield
