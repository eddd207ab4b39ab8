#pragma once

#include <vector>

#include "condfield/report.hpp"
#include "condfield/specifications.hpp"

namespace condfield {

/// Multiplicative consistency q_{V∪I}^z(xy) = q_V^z(x) q_I^{zx}(y) over all
/// disjoint nonempty V, I and every admissible boundary, the empty one
/// included.
Report check_fspec(const FSpec& spec, const CheckOptions& opts = {});

/// Identities implied by the consistency of an f-system: the four-factor and
/// three-window exchange laws, the fraction identity, fixed-boundary
/// Kolmogorov consistency, the two exchange forms, and boundary reduction.
std::vector<Report> check_fspec_derived(const FSpec& spec, const CheckOptions& opts = {});

/// Two-site exchange consistency of a one-point system.
Report check_1fspec(const OneFSpec& spec, const CheckOptions& opts = {});

/// Four-factor and three-site identities implied by two-site exchange.
std::vector<Report> check_1f_derived(const OneFSpec& spec, const CheckOptions& opts = {});

/// Palm consistency: the single-site exchange law and marginalization under a
/// fixed single-site boundary.
std::vector<Report> check_palm(const PalmSpec& spec, const CheckOptions& opts = {});

/// Dobrushin consistency q_{V∪I}^z(xy) = q_I^{zx}(y) Σ_β q_{V∪I}^z(xβ) with
/// full-complement boundaries.
Report check_dspec(const DSpecFinite& spec, const CheckOptions& opts = {});

/// The equivalent exchange form of Dobrushin consistency.
Report check_dspec_equivalent(const DSpecFinite& spec, const CheckOptions& opts = {});

/// Eight-factor consistency of the one-point slice of a finite Dobrushin
/// system.
Report check_1dspec(const DSpecFinite& spec, const CheckOptions& opts = {});

/// One table entry nudged by delta and renormalized within its distribution;
/// breaks consistency while every stored table stays a valid distribution.
struct Perturbation {
  Window V;
  Configuration z;
  Configuration x;
  double delta = 0.0;
};

FSpec perturbed(const FSpec& spec, std::uint64_t seed, double delta = 0.05,
                Perturbation* info = nullptr);
OneFSpec perturbed(const OneFSpec& spec, std::uint64_t seed, double delta = 0.05,
                   Perturbation* info = nullptr);
PalmSpec perturbed(const PalmSpec& spec, std::uint64_t seed, double delta = 0.05,
                   Perturbation* info = nullptr);
DSpecFinite perturbed(const DSpecFinite& spec, std::uint64_t seed, double delta = 0.05,
                      Perturbation* info = nullptr);

}  // namespace condfield
