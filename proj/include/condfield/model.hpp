#pragma once

#include <string>
#include <vector>

#include "condfield/measures.hpp"
#include "condfield/report.hpp"

namespace condfield {

/// Session-wide knobs shared by every command; identical settings and seed
/// reproduce a run byte for byte.
struct RunConfig {
  double tol_eq = 1e-10;
  double tol_norm = 1e-12;
  std::uint64_t budget = 10'000'000;
  std::uint64_t seed = 0;
  std::string format = "text";  // text | json
  std::string out_path;         // empty writes to stdout

  CheckOptions check_options() const {
    CheckOptions o;
    o.tol.eq = tol_eq;
    o.tol.norm = tol_norm;
    o.work_budget = budget;
    o.seed = seed;
    return o;
  }
};

/// Debug hook: nudges one entry of the derived system before validation.
struct PerturbSpec {
  bool enabled = false;
  double delta = 0.05;
  std::uint64_t seed = 0;
  std::string system;  // empty applies to every validated system
};

/// Parsed model description; build_field() realizes it as a FiniteField.
struct ModelFile {
  std::string origin;
  int dimension = 1;
  std::vector<double> alphabet_symbols;
  std::vector<std::vector<int>> master_coords;
  std::string kind;  // explicit_table | product | gibbs | random_positive
  std::uint64_t seed = 0;

  // kind-specific payloads
  std::vector<double> explicit_probs;
  std::map<LatticePoint, std::vector<double>> site_probs;
  Potential potential;
  double beta = 1.0;
  double floor = 1e-6;

  // neighborhood: explicit kinds, or empty string to derive from the model
  std::string neighborhood_kind;  // "", "nearest_neighbor", "pairs", "empty"
  int neighborhood_range = 1;
  std::vector<std::pair<LatticePoint, LatticePoint>> neighborhood_pairs;

  PerturbSpec perturb;

  static ModelFile load(const std::string& path);
  static ModelFile parse(const std::string& text, const std::string& origin);

  Window master() const;
  Alphabet alphabet() const;
  FiniteField build_field(const RunConfig& cfg) const;
  NeighborhoodSystem neighborhood() const;
};

}  // namespace condfield
