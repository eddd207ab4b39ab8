#pragma once

#include <cstdint>
#include <limits>

#include "condfield/detail/spec_table.hpp"
#include "condfield/measures.hpp"

namespace condfield {

inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 20;
inline constexpr std::uint64_t kDefaultTableBudget = std::uint64_t{1} << 25;

struct SpecOptions {
  /// Largest conditioned-window size stored (defaults to the whole master).
  std::size_t max_window = std::numeric_limits<std::size_t>::max();
  /// Cap on |X|^|master| joint states.
  std::uint64_t state_cap = kDefaultStateCap;
  /// Cap on the total number of stored probabilities.
  std::uint64_t table_budget = kDefaultTableBudget;
};

namespace detail_spec {

// Behavior shared by the four containers; the wrappers fix the key domain.
class SpecBase {
 public:
  explicit SpecBase(detail::SpecTable table) : table_(std::move(table)) {}

  const Window& master() const { return table_.idx.master(); }
  const Alphabet& alphabet() const { return table_.idx.alphabet(); }

  /// Number of stored (V, z) distributions.
  std::uint64_t key_count() const { return table_.key_count(); }
  std::uint64_t entry_count() const { return table_.entry_count(); }
  double min_probability() const { return table_.min_probability(); }

  /// q_V^z(x); the key must belong to the container's domain.
  double value(const Window& V, const Configuration& z, const Configuration& x) const;
  /// The stored distribution q_V^z as a standalone table.
  Distribution distribution(const Window& V, const Configuration& z) const;
  bool has_key(const Window& V, const Configuration& z) const;

  const detail::SpecTable& table() const { return table_; }
  detail::SpecTable& mutable_table() { return table_; }

 protected:
  detail::SpecTable table_;
};

}  // namespace detail_spec

/// The f-system: q_V^z for every nonempty V ⊆ master and every boundary
/// condition supported in master \ V, the empty boundary included (where it
/// stores the plain marginal).
class FSpec : public detail_spec::SpecBase {
 public:
  using SpecBase::SpecBase;
};

/// One-point slice: q_t^z for every site t and boundary in master \ {t}.
class OneFSpec : public detail_spec::SpecBase {
 public:
  using SpecBase::SpecBase;
};

/// Palm system: q_V^z for nonempty V and single-site boundary conditions.
class PalmSpec : public detail_spec::SpecBase {
 public:
  using SpecBase::SpecBase;
};

/// Finite-volume Dobrushin system: q_V^z with the boundary condition on the
/// full complement master \ V.
class DSpecFinite : public detail_spec::SpecBase {
 public:
  using SpecBase::SpecBase;
};

FSpec fspec_from_field(const FiniteField& field, const SpecOptions& opts = {});
OneFSpec onefspec_from_field(const FiniteField& field, const SpecOptions& opts = {});
PalmSpec palm_from_field(const FiniteField& field, const SpecOptions& opts = {});
DSpecFinite dspec_from_field(const FiniteField& field, const SpecOptions& opts = {});

/// Local-ratio table q_t^z(x) ∝ exp(-beta [site(t,x) + pair terms toward
/// s(z)]); coincides with the field conditional once s(z) covers the
/// interaction neighbors of t inside the master window.
OneFSpec onefspec_from_potential(const Window& master, const Alphabet& X,
                                 const Potential& phi, double beta,
                                 const SpecOptions& opts = {});

}  // namespace condfield
