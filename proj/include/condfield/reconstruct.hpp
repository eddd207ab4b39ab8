#pragma once

#include "condfield/report.hpp"
#include "condfield/specifications.hpp"

namespace condfield {

struct ReconstructOptions {
  Tolerances tol{};
  /// Verify against every admissible probe when the probe count stays below
  /// this, otherwise fall back to a seeded sample.
  std::uint64_t probe_budget = 10'000;
  int sampled_probes = 32;
  /// Enumeration orders: all permutations up to this window size, a seeded
  /// sample beyond.
  std::size_t full_order_limit = 4;
  int sampled_orders = 20;
  std::uint64_t seed = 0;
  /// A pre-normalization mass defect above norm_defect_factor * tol.norm is
  /// treated as inconsistency, not rounding.
  double norm_defect_factor = 100.0;
};

/// Diagnostics of a reconstruction or lift run.
struct ReconstructionInfo {
  double probe_spread = 0.0;
  double norm_defect = 0.0;
  bool verification_sampled = false;
  std::uint64_t probes_checked = 0;
};

/// Rebuilds the field whose f-system is Q: the single-site marginal comes
/// from the probe-ratio formula, the rest of the joint from one conditional
/// slice; marginals are then cross-checked against the probe formula over
/// all probes (or a seeded sample).
FiniteField field_from_fspec(const FSpec& spec, const ReconstructOptions& opts = {},
                             ReconstructionInfo* info = nullptr);

/// Rebuilds the field from a one-point system by telescoping one-point
/// entries along the canonical site order; verifies probe, route, and
/// enumeration-order independence.
FiniteField field_from_1fspec(const OneFSpec& spec, const ReconstructOptions& opts = {},
                              ReconstructionInfo* info = nullptr);

/// Rebuilds the field from a Palm system via an anchor site; verifies anchor
/// independence.
FiniteField field_from_palm(const PalmSpec& spec, const ReconstructOptions& opts = {},
                            ReconstructionInfo* info = nullptr);

/// Telescoping-product lift of a one-point system to a full f-system; the
/// one-point slice of the output is the input, copied verbatim.
FSpec lift_1f_to_f_product(const OneFSpec& spec, const ReconstructOptions& opts = {},
                           const SpecOptions& table_opts = {}, ReconstructionInfo* info = nullptr);

/// Normalized-ratio lift with a reference configuration; agrees with the
/// product lift on consistent input.
FSpec lift_1f_to_f_ratio(const OneFSpec& spec, const ReconstructOptions& opts = {},
                         const SpecOptions& table_opts = {}, ReconstructionInfo* info = nullptr);

/// Anchor-quotient lift of a Palm system to a full f-system; single-site
/// boundaries are copied verbatim, empty boundaries carry the reconstructed
/// marginals.
FSpec lift_palm_to_f(const PalmSpec& spec, const ReconstructOptions& opts = {},
                     const SpecOptions& table_opts = {}, ReconstructionInfo* info = nullptr);

/// max over disjoint (V, Λ) and x of |P_V(x) - Σ_z q_V^z(x) P_Λ(z)|; the
/// fixed-point defect of P against the system Q.
double dlr_residual(const FSpec& spec, const FiniteField& field, const CheckOptions& opts = {},
                    bool* sampled = nullptr);

}  // namespace condfield
