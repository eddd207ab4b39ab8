#include "condfield/measures.hpp"

#include <cmath>
#include <random>

#include "condfield/detail/master_index.hpp"

namespace condfield {

using detail::Mask;
using detail::MasterIndex;

Distribution::Distribution(Window window, Alphabet alphabet, std::vector<double> probs,
                           double tol_norm)
    : window_(std::move(window)), alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
  const std::uint64_t expected = configuration_count(window_, alphabet_);
  if (probs_.size() != expected) {
    throw DomainError("distribution on " + window_.to_string() + " needs " +
                      std::to_string(expected) + " entries, got " +
                      std::to_string(probs_.size()));
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw DomainError("distribution entries must be strictly positive and finite");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol_norm) {
    throw DomainError("distribution is not normalized: sum deviates by " +
                      std::to_string(sum - 1.0));
  }
}

double Distribution::prob(const Configuration& x) const {
  if (x.support() != window_) {
    throw DomainError("configuration support " + x.support().to_string() +
                      " does not match the distribution window " + window_.to_string());
  }
  MasterIndex idx(window_, alphabet_);
  return probs_[static_cast<std::size_t>(idx.rank_of(x))];
}

double Distribution::min_probability() const {
  double m = probs_.empty() ? 1.0 : probs_[0];
  for (double p : probs_) m = std::min(m, p);
  return m;
}

FiniteField::FiniteField(Window master, Alphabet alphabet, std::vector<double> joint,
                         double tol_norm)
    : joint_(std::move(master), std::move(alphabet), std::move(joint), tol_norm) {}

void Potential::add_site(const LatticePoint& t, std::vector<double> energies) {
  site_terms[t] = std::move(energies);
}

void Potential::add_pair(const LatticePoint& a, const LatticePoint& b,
                         std::vector<double> energies) {
  if (a == b) throw DomainError("pair term needs two distinct points");
  if (a < b) {
    pair_terms[{a, b}] = std::move(energies);
  } else {
    // store under canonical order, transposing the value matrix
    const std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(energies.size())) + 0.5);
    std::vector<double> transposed(energies.size());
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        transposed[j * k + i] = energies[i * k + j];
      }
    }
    pair_terms[{b, a}] = std::move(transposed);
  }
}

NeighborhoodSystem Potential::interaction_graph() const {
  std::vector<std::pair<LatticePoint, LatticePoint>> edges;
  edges.reserve(pair_terms.size());
  for (const auto& [pair, unused] : pair_terms) {
    edges.push_back(pair);
  }
  return NeighborhoodSystem::from_pairs(edges);
}

Potential ising_potential(const std::vector<std::pair<LatticePoint, LatticePoint>>& edges,
                          const Alphabet& X, double coupling, double external_field,
                          const Window& sites) {
  Potential phi;
  const std::size_t k = X.size();
  for (const auto& [a, b] : edges) {
    std::vector<double> e(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        e[i * k + j] = -coupling * X.symbol(i) * X.symbol(j);
      }
    }
    phi.add_pair(a, b, std::move(e));
  }
  if (external_field != 0.0) {
    for (const LatticePoint& t : sites) {
      std::vector<double> e(k);
      for (std::size_t i = 0; i < k; ++i) e[i] = -external_field * X.symbol(i);
      phi.add_site(t, std::move(e));
    }
  }
  return phi;
}

Distribution marginal(const Distribution& dist, const Window& V) {
  if (!V.is_subset_of(dist.window())) {
    throw DomainError("marginal window " + V.to_string() + " is not contained in " +
                      dist.window().to_string());
  }
  if (V == dist.window()) return dist;
  MasterIndex idx(dist.window(), dist.alphabet());
  const Mask vmask = idx.mask_of(V);
  const Mask cmask = idx.full_mask() & ~vmask;
  std::vector<std::uint64_t> vofs, cofs;
  idx.merge_offsets(vmask, idx.full_mask(), vofs);
  idx.merge_offsets(cmask, idx.full_mask(), cofs);
  std::vector<double> out(static_cast<std::size_t>(idx.count(vmask)), 0.0);
  for (std::size_t x = 0; x < vofs.size(); ++x) {
    double acc = 0.0;
    for (std::size_t y = 0; y < cofs.size(); ++y) {
      acc += dist.table()[static_cast<std::size_t>(vofs[x] + cofs[y])];
    }
    out[x] = acc;
  }
  return Distribution(V, dist.alphabet(), std::move(out));
}

Distribution marginal(const FiniteField& field, const Window& V) {
  return marginal(field.joint(), V);
}

Distribution conditional(const FiniteField& field, const Window& V, const Configuration& z) {
  if (!V.is_subset_of(field.master())) {
    throw DomainError("conditioned window must lie inside the master window");
  }
  if (!z.support().disjoint_with(V)) {
    throw DomainError("boundary condition overlaps the conditioned window at " +
                      z.support().set_intersect(V).point(0).to_string());
  }
  if (z.is_empty()) return marginal(field, V);
  MasterIndex idx(field.master(), field.alphabet());
  const Mask vmask = idx.mask_of(V);
  const Mask smask = idx.mask_of(z.support());
  const Mask u = vmask | smask;
  Distribution joint_vs = marginal(field, idx.window_of(u));
  Distribution denom = marginal(field, z.support());
  const double pz = denom.prob_by_rank(idx.rank_of(z));

  std::vector<std::uint64_t> vofs, sofs;
  idx.merge_offsets(vmask, u, vofs);
  idx.merge_offsets(smask, u, sofs);
  const std::uint64_t base = sofs[static_cast<std::size_t>(idx.rank_of(z))];
  std::vector<double> out(static_cast<std::size_t>(idx.count(vmask)));
  for (std::size_t x = 0; x < out.size(); ++x) {
    out[x] = joint_vs.prob_by_rank(base + vofs[x]) / pz;
  }
  return Distribution(V, field.alphabet(), std::move(out));
}

FiniteField product_field(const Window& master, const Alphabet& X,
                          const std::map<LatticePoint, std::vector<double>>& site_probs) {
  const std::size_t k = X.size();
  std::vector<const std::vector<double>*> per_site;
  per_site.reserve(master.size());
  for (const LatticePoint& t : master) {
    auto it = site_probs.find(t);
    if (it == site_probs.end()) {
      throw DomainError("product field: no site distribution for " + t.to_string());
    }
    if (it->second.size() != k) {
      throw DomainError("product field: site distribution at " + t.to_string() +
                        " has wrong arity");
    }
    double sum = 0.0;
    for (double p : it->second) {
      if (!(p > 0.0)) {
        throw DomainError("product field: site distribution at " + t.to_string() +
                          " must be strictly positive");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > Tolerances{}.norm) {
      throw DomainError("product field: site distribution at " + t.to_string() +
                        " is not normalized");
    }
    per_site.push_back(&it->second);
  }
  MasterIndex idx(master, X);
  const std::uint64_t total = idx.count(idx.full_mask());
  std::vector<double> joint(static_cast<std::size_t>(total), 1.0);
  std::vector<std::uint8_t> digits(master.size(), 0);
  for (std::uint64_t r = 0; r < total; ++r) {
    double p = 1.0;
    for (std::size_t i = 0; i < master.size(); ++i) p *= (*per_site[i])[digits[i]];
    joint[static_cast<std::size_t>(r)] = p;
    for (std::size_t i = master.size(); i-- > 0;) {
      if (++digits[i] < k) break;
      digits[i] = 0;
    }
  }
  return FiniteField(master, X, std::move(joint));
}

FiniteField gibbs_field(const Window& master, const Alphabet& X, const Potential& phi,
                        double beta, std::uint64_t cap) {
  for (const auto& [t, unused] : phi.site_terms) {
    if (!master.contains(t)) {
      throw DomainError("potential site term at " + t.to_string() +
                        " lies outside the master window");
    }
  }
  for (const auto& [pair, unused] : phi.pair_terms) {
    if (!master.contains(pair.first) || !master.contains(pair.second)) {
      throw DomainError("potential pair term outside the master window");
    }
  }
  const std::uint64_t total = configuration_count(master, X);
  if (total > cap) {
    throw ResourceError("gibbs field needs " + std::to_string(total) +
                        " configurations, cap is " + std::to_string(cap));
  }
  const std::size_t n = master.size();
  const std::size_t k = X.size();

  // flatten terms against site positions
  std::vector<const std::vector<double>*> site_of(n, nullptr);
  for (const auto& [t, e] : phi.site_terms) {
    if (e.size() != k) throw DomainError("site term arity mismatch at " + t.to_string());
    site_of[*master.index_of(t)] = &e;
  }
  struct Edge {
    std::size_t a, b;
    const std::vector<double>* e;
  };
  std::vector<Edge> edges;
  for (const auto& [pair, e] : phi.pair_terms) {
    if (e.size() != k * k) throw DomainError("pair term arity mismatch");
    edges.push_back({*master.index_of(pair.first), *master.index_of(pair.second), &e});
  }

  std::vector<double> logw(static_cast<std::size_t>(total));
  std::vector<std::uint8_t> digits(n, 0);
  double log_max = -std::numeric_limits<double>::infinity();
  for (std::uint64_t r = 0; r < total; ++r) {
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (site_of[i]) h += (*site_of[i])[digits[i]];
    }
    for (const Edge& e : edges) {
      h += (*e.e)[digits[e.a] * k + digits[e.b]];
    }
    const double lw = -beta * h;
    logw[static_cast<std::size_t>(r)] = lw;
    log_max = std::max(log_max, lw);
    for (std::size_t i = n; i-- > 0;) {
      if (++digits[i] < k) break;
      digits[i] = 0;
    }
  }
  double z = 0.0;
  for (double& lw : logw) {
    lw = std::exp(lw - log_max);
    z += lw;
  }
  for (double& w : logw) w /= z;
  return FiniteField(master, X, std::move(logw));
}

FiniteField random_positive_field(const Window& master, const Alphabet& X,
                                  std::uint64_t seed, double floor, std::uint64_t cap) {
  const std::uint64_t total = configuration_count(master, X);
  if (total > cap) {
    throw ResourceError("random field needs " + std::to_string(total) +
                        " configurations, cap is " + std::to_string(cap));
  }
  const double nfloor = floor * static_cast<double>(total);
  if (!(floor > 0.0) || nfloor >= 1.0) {
    throw DomainError("floor must lie in (0, |X|^-|master|)");
  }
  detail::Rng rng(seed);
  std::vector<double> joint(static_cast<std::size_t>(total));
  double sum = 0.0;
  for (double& p : joint) {
    p = rng.unit();
    sum += p;
  }
  const double scale = (1.0 - nfloor) / sum;
  for (double& p : joint) p = floor + p * scale;
  return FiniteField(master, X, std::move(joint));
}

double total_variation(const Distribution& p, const Distribution& q) {
  if (p.window() != q.window() || p.alphabet() != q.alphabet()) {
    throw DomainError("total variation needs a shared window and alphabet");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += std::abs(p.table()[i] - q.table()[i]);
  }
  return 0.5 * acc;
}

}  // namespace condfield
