#pragma once

#include <vector>

#include "condfield/report.hpp"
#include "condfield/specifications.hpp"

namespace condfield {

/// One-point boundary-sensitivity suprema rho_{ts} for ordered site pairs;
/// the defining quantifier is asymmetric, so no symmetry is implied.
struct RhoMatrix {
  Window master;
  std::vector<double> values;  // row-major over (t, s) canonical positions
  bool sampled = false;

  double value(std::size_t t, std::size_t s) const {
    return values[t * master.size() + s];
  }
  double value(const LatticePoint& t, const LatticePoint& s) const;
};

/// Markov property of an f-system: q_V^z depends on z only through the
/// neighborhood boundary of V whenever that boundary is covered by s(z).
Report is_markov_fspec(const FSpec& spec, const NeighborhoodSystem& nb,
                       const CheckOptions& opts = {});

/// Single-site Markov property of a one-point system.
Report is_markov_1f(const OneFSpec& spec, const NeighborhoodSystem& nb,
                    const CheckOptions& opts = {});

/// The product lift preserves the Markov verdict: passes iff the one-point
/// verdict and the lifted f-system verdict agree.
Report markov_lift_preservation(const OneFSpec& spec, const NeighborhoodSystem& nb,
                                const CheckOptions& opts = {});

/// Finite-volume equivalence of the two Markov definitions on one field:
/// the partial-boundary verdict, the full-complement verdict, their
/// agreement, and the Sullivan sandwich.
std::vector<Report> markov_equivalence_check(const FiniteField& field,
                                             const NeighborhoodSystem& nb,
                                             const CheckOptions& opts = {});

/// rho_{ts} = sup over w, y, v, x of |Q_t^{wy}(x) - Q_t^{wv}(x)| with w
/// ranging over all boundary supports avoiding {t, s}, the empty one
/// included.
RhoMatrix mixing_rho_matrix(const FiniteField& field, const CheckOptions& opts = {});

/// sup_{x,z} |P_V(x) - Q_V^z(x)| <= sum_{t in V} sum_{s in L} rho_{ts}.
Report mixing_bound_check(const FiniteField& field, const Window& V, const Window& L,
                          const CheckOptions& opts = {});

/// The mixing bound over every disjoint nonempty (V, L) pair of the master
/// window, with the rho matrix computed once.
Report mixing_bound_sweep(const FiniteField& field, const CheckOptions& opts = {});

/// Finite-volume Dobrushin interaction coefficient at t: summed
/// total-variation sensitivity of Q_t to single-site changes of a full
/// boundary.
double dobrushin_coefficient(const FiniteField& field, const LatticePoint& t,
                             const CheckOptions& opts = {}, bool* sampled = nullptr);

/// inf over full-boundary extensions <= Q_V^z(x) <= sup, for every V,
/// partial boundary z, and x.
Report sullivan_check(const FiniteField& field, const CheckOptions& opts = {});

Report positivity_check(const FiniteField& field, const CheckOptions& opts = {});
Report positivity_check(const FSpec& spec, const CheckOptions& opts = {});
Report positivity_check(const OneFSpec& spec, const CheckOptions& opts = {});
Report positivity_check(const PalmSpec& spec, const CheckOptions& opts = {});
Report positivity_check(const DSpecFinite& spec, const CheckOptions& opts = {});

}  // namespace condfield
