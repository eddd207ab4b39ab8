#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condfield/errors.hpp"

namespace condfield {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

/// A point of the integer lattice Z^d. The dimension is fixed by the first
/// object of a computation; constructors of composite objects reject mixed
/// dimensions.
class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(std::vector<int> coords);

  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<int>& coords() const { return coords_; }
  int coord(std::size_t i) const { return coords_[i]; }

  friend bool operator==(const LatticePoint& a, const LatticePoint& b) = default;
  // Lexicographic on coordinates; points of different dimension never mix in
  // one lattice, but the comparator stays total by ordering on dimension first.
  friend std::strong_ordering operator<=>(const LatticePoint& a, const LatticePoint& b);

  std::string to_string() const;

 private:
  std::vector<int> coords_;
};

/// A finite set of lattice points kept in canonical (lexicographic) order.
class Window {
 public:
  Window() = default;
  explicit Window(std::vector<LatticePoint> points);
  static Window single(LatticePoint t);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const LatticePoint& point(std::size_t i) const { return points_[i]; }
  const std::vector<LatticePoint>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }
  int dim() const { return points_.empty() ? 0 : points_.front().dim(); }

  bool contains(const LatticePoint& t) const;
  /// Position of t in canonical order, if present.
  std::optional<std::size_t> index_of(const LatticePoint& t) const;
  bool is_subset_of(const Window& other) const;
  bool disjoint_with(const Window& other) const;

  Window set_union(const Window& other) const;
  Window set_minus(const Window& other) const;
  Window set_intersect(const Window& other) const;

  friend bool operator==(const Window& a, const Window& b) = default;
  friend std::strong_ordering operator<=>(const Window& a, const Window& b);

  std::string to_string() const;

 private:
  std::vector<LatticePoint> points_;  // sorted, no duplicates
};

/// The phase space X: a finite ordered list of at least two distinct real
/// symbols. Configurations store indices into this list.
class Alphabet {
 public:
  explicit Alphabet(std::vector<double> symbols);

  std::size_t size() const { return symbols_.size(); }
  double symbol(std::size_t i) const { return symbols_[i]; }
  const std::vector<double>& symbols() const { return symbols_; }
  std::optional<std::size_t> index_of(double symbol) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) = default;

 private:
  std::vector<double> symbols_;
};

/// An assignment of a symbol (by alphabet index) to every point of its
/// support window, and to nothing else. The empty configuration is the
/// unique configuration with empty support.
class Configuration {
 public:
  Configuration() = default;
  /// `values[i]` belongs to `support.point(i)`.
  Configuration(Window support, std::vector<std::uint8_t> values);
  static Configuration empty() { return Configuration{}; }

  const Window& support() const { return support_; }
  bool is_empty() const { return support_.empty(); }
  std::size_t size() const { return support_.size(); }

  std::uint8_t value_at(std::size_t pos) const { return values_[pos]; }
  const std::vector<std::uint8_t>& values() const { return values_; }
  /// Value at a point; throws DomainError if the point is outside the support.
  std::uint8_t value(const LatticePoint& t) const;
  bool defined_at(const LatticePoint& t) const { return support_.contains(t); }

  friend bool operator==(const Configuration& a, const Configuration& b) = default;
  friend std::strong_ordering operator<=>(const Configuration& a, const Configuration& b);

  std::string to_string() const;
  std::string to_string(const Alphabet& alphabet) const;

 private:
  Window support_;
  std::vector<std::uint8_t> values_;
};

/// Symmetric neighborhood system: t is never its own neighbor, and
/// s ∈ ∂t exactly when t ∈ ∂s.
class NeighborhoodSystem {
 public:
  /// System with no neighbors anywhere.
  static NeighborhoodSystem empty_system();
  /// All points within L1 distance `range` (classic nearest neighbors at 1).
  static NeighborhoodSystem nearest_neighbor(int dim, int range = 1);
  /// Explicit undirected adjacency; both directions are installed.
  static NeighborhoodSystem from_pairs(
      const std::vector<std::pair<LatticePoint, LatticePoint>>& pairs);

  Window neighbors(const LatticePoint& t) const;

 private:
  NeighborhoodSystem() = default;

  enum class Kind { kEmpty, kNearest, kExplicit };
  Kind kind_ = Kind::kEmpty;
  int dim_ = 0;
  int range_ = 1;
  // adjacency list aligned with keys_
  std::vector<LatticePoint> keys_;
  std::vector<Window> adj_;
};

/// Concatenation xy of configurations with disjoint supports.
Configuration concat(const Configuration& x, const Configuration& y);

/// Restriction x_T of x to a subset T of its support.
Configuration restrict_to(const Configuration& x, const Window& T);

/// (xu)_j over an explicit enumeration t_1..t_n: keeps x at positions < j and
/// u at positions > j, dropping position j. Index j is 1-based.
Configuration splice(const Configuration& x, const Configuration& u, std::size_t j,
                     std::span<const LatticePoint> enumeration);

/// ∂V: every neighbor of a point of V that is not itself in V.
Window boundary(const NeighborhoodSystem& system, const Window& V);

/// |X|^|V| with overflow detection.
std::uint64_t configuration_count(const Window& V, const Alphabet& X);

/// All configurations on V in canonical order: lexicographic over the
/// canonical point order, first point most significant.
std::vector<Configuration> enumerate_configurations(
    const Window& V, const Alphabet& X, std::uint64_t cap = kDefaultEnumerationCap);

/// Streaming variant of enumerate_configurations with identical order.
template <class Fn>
void for_each_configuration(const Window& V, const Alphabet& X, Fn&& fn,
                            std::uint64_t cap = kDefaultEnumerationCap) {
  const std::uint64_t total = configuration_count(V, X);
  if (total > cap) {
    throw ResourceError("configuration enumeration needs " + std::to_string(total) +
                        " items, cap is " + std::to_string(cap));
  }
  const std::size_t n = V.size();
  std::vector<std::uint8_t> digits(n, 0);
  const std::uint8_t k = static_cast<std::uint8_t>(X.size());
  for (std::uint64_t r = 0; r < total; ++r) {
    fn(Configuration(V, digits));
    // increment little-endian on the last position to stay lexicographic
    for (std::size_t i = n; i-- > 0;) {
      if (++digits[i] < k) break;
      digits[i] = 0;
    }
  }
}

}  // namespace condfield
