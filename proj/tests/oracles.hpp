#pragma once

// Brute-force reference computations used as independent oracles. Everything
// here goes through the generic Configuration API and plain loops, never
// through the indexed tables the library uses internally.

#include <cmath>
#include <map>
#include <vector>

#include "condfield/lattice.hpp"
#include "condfield/measures.hpp"

namespace oracle {

using namespace condfield;

// Joint probability lookup by configuration on the full master window.
inline double joint_prob(const FiniteField& field, const Configuration& x) {
  return field.joint().prob(x);
}

// P_V(x) by direct summation over all configurations of master \ V.
inline double brute_marginal(const FiniteField& field, const Configuration& x) {
  const Window rest = field.master().set_minus(x.support());
  double acc = 0.0;
  for (const Configuration& y : enumerate_configurations(rest, field.alphabet())) {
    acc += joint_prob(field, concat(x, y));
  }
  return acc;
}

// Q_V^z(x) as a ratio of two brute-force sums.
inline double brute_conditional(const FiniteField& field, const Configuration& x,
                                const Configuration& z) {
  double num = brute_marginal(field, concat(x, z));
  double den = z.is_empty() ? 1.0 : brute_marginal(field, z);
  return num / den;
}

// Boltzmann joint by direct energy evaluation over every configuration.
inline std::vector<double> brute_gibbs_table(const Window& master, const Alphabet& X,
                                             const Potential& phi, double beta) {
  std::vector<double> w;
  double zsum = 0.0;
  for (const Configuration& x : enumerate_configurations(master, X)) {
    double h = 0.0;
    for (const auto& [t, e] : phi.site_terms) {
      if (x.defined_at(t)) h += e[x.value(t)];
    }
    for (const auto& [pair, e] : phi.pair_terms) {
      if (x.defined_at(pair.first) && x.defined_at(pair.second)) {
        h += e[x.value(pair.first) * X.size() + x.value(pair.second)];
      }
    }
    const double weight = std::exp(-beta * h);
    w.push_back(weight);
    zsum += weight;
  }
  for (double& v : w) v /= zsum;
  return w;
}

// rho_{ts} by raw enumeration of every boundary support, boundary values,
// and conditioned value.
inline double brute_rho(const FiniteField& field, const LatticePoint& t, const LatticePoint& s) {
  const Window pair({t, s});
  const Window rest = field.master().set_minus(pair);
  const Window ts = Window::single(t);
  const Window ss = Window::single(s);
  double sup = 0.0;
  // every subset of rest, via masks over its point list
  const std::size_t m = rest.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::vector<LatticePoint> pts;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1) pts.push_back(rest.point(i));
    }
    const Window support(pts);
    for (const Configuration& w : enumerate_configurations(support, field.alphabet())) {
      for (const Configuration& y : enumerate_configurations(ss, field.alphabet())) {
        for (const Configuration& v : enumerate_configurations(ss, field.alphabet())) {
          for (const Configuration& x : enumerate_configurations(ts, field.alphabet())) {
            const double a = brute_conditional(field, x, concat(w, y));
            const double b = brute_conditional(field, x, concat(w, v));
            sup = std::max(sup, std::abs(a - b));
          }
        }
      }
    }
  }
  return sup;
}

// Standard small fixtures.

inline Window chain(int n) {
  std::vector<LatticePoint> pts;
  for (int i = 0; i < n; ++i) pts.push_back(LatticePoint({i}));
  return Window(std::move(pts));
}

inline Window grid2d(int rows, int cols) {
  std::vector<LatticePoint> pts;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) pts.push_back(LatticePoint({r, c}));
  }
  return Window(std::move(pts));
}

inline Alphabet binary() { return Alphabet({0.0, 1.0}); }
inline Alphabet spins() { return Alphabet({-1.0, 1.0}); }
inline Alphabet ternary() { return Alphabet({0.0, 1.0, 2.0}); }

// Nearest-neighbor edges within a window.
inline std::vector<std::pair<LatticePoint, LatticePoint>> nn_edges(const Window& master) {
  std::vector<std::pair<LatticePoint, LatticePoint>> edges;
  const auto nb = NeighborhoodSystem::nearest_neighbor(master.dim());
  for (std::size_t i = 0; i < master.size(); ++i) {
    for (std::size_t j = i + 1; j < master.size(); ++j) {
      if (nb.neighbors(master.point(i)).contains(master.point(j))) {
        edges.emplace_back(master.point(i), master.point(j));
      }
    }
  }
  return edges;
}

inline FiniteField ising_chain(int n, double beta, double coupling) {
  const Window master = chain(n);
  const Alphabet X = spins();
  return gibbs_field(master, X, ising_potential(nn_edges(master), X, coupling), beta);
}

}  // namespace oracle
