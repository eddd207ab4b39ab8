#include "condfield/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace condfield {

namespace {

using nlohmann::json;

LatticePoint parse_point(const json& j, int dimension, const std::string& what) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(dimension)) {
    throw ParseError(what + ": expected a coordinate array of length " +
                     std::to_string(dimension));
  }
  std::vector<int> coords;
  coords.reserve(j.size());
  for (const auto& c : j) {
    if (!c.is_number_integer()) throw ParseError(what + ": coordinates must be integers");
    coords.push_back(c.get<int>());
  }
  return LatticePoint(std::move(coords));
}

std::vector<double> parse_number_array(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(what + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

ModelFile ModelFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

ModelFile ModelFile::parse(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(origin + ": model must be a JSON object");

  ModelFile m;
  m.origin = origin;
  try {
    if (!j.contains("dimension") || !j["dimension"].is_number_integer()) {
      throw ParseError("missing integer field 'dimension'");
    }
    m.dimension = j["dimension"].get<int>();
    if (m.dimension < 1) throw ParseError("'dimension' must be >= 1");

    if (!j.contains("alphabet")) throw ParseError("missing field 'alphabet'");
    m.alphabet_symbols = parse_number_array(j["alphabet"], "alphabet");

    if (!j.contains("master") || !j["master"].is_array() || j["master"].empty()) {
      throw ParseError("missing nonempty array field 'master'");
    }
    for (const auto& p : j["master"]) {
      LatticePoint pt = parse_point(p, m.dimension, "master");
      m.master_coords.push_back(pt.coords());
    }

    if (!j.contains("kind") || !j["kind"].is_string()) {
      throw ParseError("missing string field 'kind'");
    }
    m.kind = j["kind"].get<std::string>();
    if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();

    const json params = j.contains("parameters") ? j["parameters"] : json::object();
    if (!params.is_object()) throw ParseError("'parameters' must be an object");

    const Window master = m.master();
    const Alphabet alphabet = m.alphabet();
    const std::size_t k = alphabet.size();

    if (m.kind == "explicit_table") {
      if (!params.contains("probabilities")) {
        throw ParseError("explicit_table needs 'parameters.probabilities'");
      }
      m.explicit_probs = parse_number_array(params["probabilities"], "probabilities");
    } else if (m.kind == "product") {
      if (!params.contains("site_probs") || !params["site_probs"].is_array()) {
        throw ParseError("product needs array 'parameters.site_probs'");
      }
      for (const auto& sp : params["site_probs"]) {
        LatticePoint pt = parse_point(sp.at("point"), m.dimension, "site_probs.point");
        m.site_probs[pt] = parse_number_array(sp.at("probs"), "site_probs.probs");
      }
    } else if (m.kind == "gibbs") {
      if (!params.contains("beta") || !params["beta"].is_number()) {
        throw ParseError("gibbs needs numeric 'parameters.beta'");
      }
      m.beta = params["beta"].get<double>();
      if (params.contains("site_terms")) {
        for (const auto& st : params["site_terms"]) {
          LatticePoint pt = parse_point(st.at("point"), m.dimension, "site_terms.point");
          m.potential.add_site(pt, parse_number_array(st.at("energies"), "site_terms.energies"));
        }
      }
      if (params.contains("pair_terms")) {
        for (const auto& pt2 : params["pair_terms"]) {
          const auto& pts = pt2.at("points");
          if (!pts.is_array() || pts.size() != 2) {
            throw ParseError("pair_terms.points must hold two points");
          }
          LatticePoint a = parse_point(pts[0], m.dimension, "pair_terms.points");
          LatticePoint b = parse_point(pts[1], m.dimension, "pair_terms.points");
          const auto& e = pt2.at("energies");
          if (!e.is_array()) throw ParseError("pair_terms.energies must be a k x k matrix");
          std::vector<double> flat;
          for (const auto& row : e) {
            auto r = parse_number_array(row, "pair_terms.energies");
            flat.insert(flat.end(), r.begin(), r.end());
          }
          if (flat.size() != k * k) {
            throw ParseError("pair_terms.energies must be a k x k matrix");
          }
          m.potential.add_pair(a, b, std::move(flat));
        }
      }
      if (params.contains("ising")) {
        const json& is = params["ising"];
        const double coupling = is.at("coupling").get<double>();
        const double h = is.contains("field") ? is["field"].get<double>() : 0.0;
        std::vector<std::pair<LatticePoint, LatticePoint>> edges;
        if (is.contains("edges") && is["edges"].is_array()) {
          for (const auto& edge : is["edges"]) {
            edges.emplace_back(parse_point(edge.at(0), m.dimension, "ising.edges"),
                               parse_point(edge.at(1), m.dimension, "ising.edges"));
          }
        } else {
          // nearest-neighbor edges within the master window
          const auto nb = NeighborhoodSystem::nearest_neighbor(m.dimension);
          for (std::size_t i = 0; i < master.size(); ++i) {
            for (std::size_t l = i + 1; l < master.size(); ++l) {
              if (nb.neighbors(master.point(i)).contains(master.point(l))) {
                edges.emplace_back(master.point(i), master.point(l));
              }
            }
          }
        }
        Potential ising = ising_potential(edges, alphabet, coupling, h, master);
        for (auto& [pt, e] : ising.site_terms) m.potential.add_site(pt, std::move(e));
        for (auto& [pr, e] : ising.pair_terms) {
          m.potential.pair_terms[pr] = std::move(e);
        }
      }
    } else if (m.kind == "random_positive") {
      if (!params.contains("floor") || !params["floor"].is_number()) {
        throw ParseError("random_positive needs numeric 'parameters.floor'");
      }
      m.floor = params["floor"].get<double>();
    } else {
      throw ParseError("unknown kind '" + m.kind + "'");
    }

    if (j.contains("neighborhood")) {
      const json& nb = j["neighborhood"];
      m.neighborhood_kind = nb.at("kind").get<std::string>();
      if (m.neighborhood_kind == "nearest_neighbor") {
        if (nb.contains("range")) m.neighborhood_range = nb["range"].get<int>();
      } else if (m.neighborhood_kind == "pairs") {
        for (const auto& pr : nb.at("pairs")) {
          m.neighborhood_pairs.emplace_back(parse_point(pr.at(0), m.dimension, "neighborhood"),
                                            parse_point(pr.at(1), m.dimension, "neighborhood"));
        }
      } else if (m.neighborhood_kind != "empty") {
        throw ParseError("unknown neighborhood kind '" + m.neighborhood_kind + "'");
      }
    }

    if (j.contains("perturb")) {
      const json& p = j["perturb"];
      m.perturb.enabled = true;
      if (p.contains("delta")) m.perturb.delta = p["delta"].get<double>();
      if (p.contains("seed")) m.perturb.seed = p["seed"].get<std::uint64_t>();
      if (p.contains("system")) m.perturb.system = p["system"].get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  } catch (const DomainError& e) {
    throw ParseError(origin + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(origin + ": " + e.what());
  }
  return m;
}

Window ModelFile::master() const {
  std::vector<LatticePoint> pts;
  pts.reserve(master_coords.size());
  for (const auto& c : master_coords) pts.push_back(LatticePoint(c));
  return Window(std::move(pts));
}

Alphabet ModelFile::alphabet() const { return Alphabet(alphabet_symbols); }

FiniteField ModelFile::build_field(const RunConfig& cfg) const {
  const Window m = master();
  const Alphabet a = alphabet();
  try {
    if (kind == "explicit_table") {
      return FiniteField(m, a, explicit_probs, cfg.tol_norm);
    }
    if (kind == "product") {
      return product_field(m, a, site_probs);
    }
    if (kind == "gibbs") {
      return gibbs_field(m, a, potential, beta);
    }
    if (kind == "random_positive") {
      return random_positive_field(m, a, seed, floor);
    }
  } catch (const DomainError& e) {
    throw ParseError(origin + ": " + e.what());
  }
  throw ParseError(origin + ": unknown kind '" + kind + "'");
}

NeighborhoodSystem ModelFile::neighborhood() const {
  if (neighborhood_kind == "nearest_neighbor") {
    return NeighborhoodSystem::nearest_neighbor(dimension, neighborhood_range);
  }
  if (neighborhood_kind == "pairs") {
    return NeighborhoodSystem::from_pairs(neighborhood_pairs);
  }
  if (neighborhood_kind == "empty") {
    return NeighborhoodSystem::empty_system();
  }
  // default: the interaction graph of a gibbs model, empty otherwise
  if (kind == "gibbs") {
    return potential.interaction_graph();
  }
  return NeighborhoodSystem::empty_system();
}

}  // namespace condfield
