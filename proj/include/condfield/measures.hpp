#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "condfield/common.hpp"
#include "condfield/lattice.hpp"

namespace condfield {

/// A strictly positive, normalized probability table over all configurations
/// of one window, stored densely in canonical rank order.
class Distribution {
 public:
  Distribution(Window window, Alphabet alphabet, std::vector<double> probs,
               double tol_norm = Tolerances{}.norm);

  const Window& window() const { return window_; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& table() const { return probs_; }

  double prob_by_rank(std::uint64_t r) const { return probs_[static_cast<std::size_t>(r)]; }
  /// Probability of a configuration; its support must equal the window.
  double prob(const Configuration& x) const;
  double min_probability() const;

 private:
  Window window_;
  Alphabet alphabet_;
  std::vector<double> probs_;
};

/// Positive joint distribution on a master window; the finite stand-in for a
/// random field. Boundary conditions are configurations supported inside the
/// master window, outside the conditioned set.
class FiniteField {
 public:
  FiniteField(Window master, Alphabet alphabet, std::vector<double> joint,
              double tol_norm = Tolerances{}.norm);

  const Window& master() const { return joint_.window(); }
  const Alphabet& alphabet() const { return joint_.alphabet(); }
  const Distribution& joint() const { return joint_; }
  std::size_t site_count() const { return master().size(); }

 private:
  Distribution joint_;
};

/// Site and pair energies used to assemble Gibbs-type test fields. Energies
/// are indexed by alphabet position; pair matrices are row-major in the
/// first point of the (canonically ordered) pair.
struct Potential {
  std::map<LatticePoint, std::vector<double>> site_terms;
  std::map<std::pair<LatticePoint, LatticePoint>, std::vector<double>> pair_terms;

  void add_site(const LatticePoint& t, std::vector<double> energies);
  void add_pair(const LatticePoint& a, const LatticePoint& b, std::vector<double> energies);

  /// Edges carrying a pair term, as a symmetric neighborhood system.
  NeighborhoodSystem interaction_graph() const;
};

/// Pairwise potential -J * sym_a * sym_b on the given edges plus optional
/// field -h * sym_a per site.
Potential ising_potential(const std::vector<std::pair<LatticePoint, LatticePoint>>& edges,
                          const Alphabet& X, double coupling, double external_field = 0.0,
                          const Window& sites = Window{});

/// P_V: sums the joint over the complement of V.
Distribution marginal(const Distribution& dist, const Window& V);
Distribution marginal(const FiniteField& field, const Window& V);

/// Q_V^z = P_{V ∪ s(z)}(xz) / P_{s(z)}(z); the empty boundary yields the
/// marginal on V.
Distribution conditional(const FiniteField& field, const Window& V, const Configuration& z);

/// Independent sites: joint(x) = prod_t p_t(x_t).
FiniteField product_field(const Window& master, const Alphabet& X,
                          const std::map<LatticePoint, std::vector<double>>& site_probs);

/// joint(x) ∝ exp(-beta * H(x)) with H from the potential; weights are
/// accumulated in the log domain before the single normalization.
FiniteField gibbs_field(const Window& master, const Alphabet& X, const Potential& phi,
                        double beta, std::uint64_t cap = kDefaultEnumerationCap);

/// Seed-deterministic joint with every entry >= floor.
FiniteField random_positive_field(const Window& master, const Alphabet& X,
                                  std::uint64_t seed, double floor,
                                  std::uint64_t cap = kDefaultEnumerationCap);

/// (1/2) sum |P - Q| over a shared window.
double total_variation(const Distribution& p, const Distribution& q);

}  // namespace condfield
