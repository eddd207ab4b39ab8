#include "condfield/lattice.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace condfield {

namespace {

void require_same_dim(const LatticePoint& a, const LatticePoint& b, const char* ctx) {
  if (a.dim() != b.dim()) {
    throw DomainError(std::string(ctx) + ": mixed lattice dimensions " +
                      std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
}

}  // namespace

LatticePoint::LatticePoint(std::vector<int> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) {
    throw DomainError("lattice point must have dimension >= 1");
  }
}

std::strong_ordering operator<=>(const LatticePoint& a, const LatticePoint& b) {
  if (auto c = a.dim() <=> b.dim(); c != 0) return c;
  return a.coords_ <=> b.coords_;
}

std::string LatticePoint::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) os << ',';
    os << coords_[i];
  }
  os << ')';
  return os.str();
}

Window::Window(std::vector<LatticePoint> points) : points_(std::move(points)) {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    require_same_dim(points_[0], points_[i], "Window");
  }
  std::sort(points_.begin(), points_.end());
  auto dup = std::adjacent_find(points_.begin(), points_.end());
  if (dup != points_.end()) {
    throw DomainError("Window: duplicate point " + dup->to_string());
  }
}

Window Window::single(LatticePoint t) { return Window({std::move(t)}); }

bool Window::contains(const LatticePoint& t) const {
  return std::binary_search(points_.begin(), points_.end(), t);
}

std::optional<std::size_t> Window::index_of(const LatticePoint& t) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), t);
  if (it == points_.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

bool Window::is_subset_of(const Window& other) const {
  return std::includes(other.points_.begin(), other.points_.end(), points_.begin(),
                       points_.end());
}

bool Window::disjoint_with(const Window& other) const {
  auto a = points_.begin();
  auto b = other.points_.begin();
  while (a != points_.end() && b != other.points_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      return false;
    }
  }
  return true;
}

Window Window::set_union(const Window& other) const {
  if (!points_.empty() && !other.points_.empty()) {
    require_same_dim(points_[0], other.points_[0], "Window::set_union");
  }
  std::vector<LatticePoint> out;
  out.reserve(points_.size() + other.points_.size());
  std::set_union(points_.begin(), points_.end(), other.points_.begin(),
                 other.points_.end(), std::back_inserter(out));
  Window w;
  w.points_ = std::move(out);
  return w;
}

Window Window::set_minus(const Window& other) const {
  std::vector<LatticePoint> out;
  std::set_difference(points_.begin(), points_.end(), other.points_.begin(),
                      other.points_.end(), std::back_inserter(out));
  Window w;
  w.points_ = std::move(out);
  return w;
}

Window Window::set_intersect(const Window& other) const {
  std::vector<LatticePoint> out;
  std::set_intersection(points_.begin(), points_.end(), other.points_.begin(),
                        other.points_.end(), std::back_inserter(out));
  Window w;
  w.points_ = std::move(out);
  return w;
}

std::strong_ordering operator<=>(const Window& a, const Window& b) {
  return a.points_ <=> b.points_;
}

std::string Window::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i) os << ',';
    os << points_[i].to_string();
  }
  os << '}';
  return os.str();
}

Alphabet::Alphabet(std::vector<double> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) {
    throw DomainError("alphabet needs at least two symbols");
  }
  if (symbols_.size() > 255) {
    throw DomainError("alphabet larger than 255 symbols is not supported");
  }
  std::set<double> seen(symbols_.begin(), symbols_.end());
  if (seen.size() != symbols_.size()) {
    throw DomainError("alphabet symbols must be distinct");
  }
}

std::optional<std::size_t> Alphabet::index_of(double symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == symbol) return i;
  }
  return std::nullopt;
}

Configuration::Configuration(Window support, std::vector<std::uint8_t> values)
    : support_(std::move(support)), values_(std::move(values)) {
  if (support_.size() != values_.size()) {
    throw DomainError("configuration needs exactly one value per support point");
  }
}

std::uint8_t Configuration::value(const LatticePoint& t) const {
  auto pos = support_.index_of(t);
  if (!pos) {
    throw DomainError("configuration not defined at " + t.to_string());
  }
  return values_[*pos];
}

std::strong_ordering operator<=>(const Configuration& a, const Configuration& b) {
  if (auto c = a.support_ <=> b.support_; c != 0) return c;
  return a.values_ <=> b.values_;
}

std::string Configuration::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (i) os << ',';
    os << support_.point(i).to_string() << ':' << static_cast<int>(values_[i]);
  }
  os << '}';
  return os.str();
}

std::string Configuration::to_string(const Alphabet& alphabet) const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (i) os << ',';
    os << support_.point(i).to_string() << ':' << alphabet.symbol(values_[i]);
  }
  os << '}';
  return os.str();
}

NeighborhoodSystem NeighborhoodSystem::empty_system() { return NeighborhoodSystem{}; }

NeighborhoodSystem NeighborhoodSystem::nearest_neighbor(int dim, int range) {
  if (dim < 1) throw DomainError("neighborhood dimension must be >= 1");
  if (range < 1) throw DomainError("neighborhood range must be >= 1");
  NeighborhoodSystem s;
  s.kind_ = Kind::kNearest;
  s.dim_ = dim;
  s.range_ = range;
  return s;
}

NeighborhoodSystem NeighborhoodSystem::from_pairs(
    const std::vector<std::pair<LatticePoint, LatticePoint>>& pairs) {
  NeighborhoodSystem s;
  s.kind_ = Kind::kExplicit;
  std::vector<std::pair<LatticePoint, std::vector<LatticePoint>>> adj;
  auto add = [&adj](const LatticePoint& a, const LatticePoint& b) {
    for (auto& [key, nbrs] : adj) {
      if (key == a) {
        nbrs.push_back(b);
        return;
      }
    }
    adj.push_back({a, {b}});
  };
  for (const auto& [a, b] : pairs) {
    if (a == b) {
      throw DomainError("a point cannot be its own neighbor: " + a.to_string());
    }
    require_same_dim(a, b, "NeighborhoodSystem");
    add(a, b);
    add(b, a);
  }
  std::sort(adj.begin(), adj.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  for (auto& [key, nbrs] : adj) {
    s.keys_.push_back(key);
    s.adj_.push_back(Window(std::move(nbrs)));
    if (!s.dim_) s.dim_ = key.dim();
  }
  return s;
}

Window NeighborhoodSystem::neighbors(const LatticePoint& t) const {
  switch (kind_) {
    case Kind::kEmpty:
      return Window{};
    case Kind::kNearest: {
      if (t.dim() != dim_) {
        throw DomainError("neighborhood system is for dimension " + std::to_string(dim_));
      }
      // all offsets with 0 < |delta|_1 <= range
      std::vector<LatticePoint> out;
      std::vector<int> delta(static_cast<std::size_t>(dim_), -range_);
      while (true) {
        int l1 = 0;
        for (int c : delta) l1 += std::abs(c);
        if (l1 > 0 && l1 <= range_) {
          std::vector<int> coords = t.coords();
          for (int i = 0; i < dim_; ++i) coords[static_cast<std::size_t>(i)] += delta[static_cast<std::size_t>(i)];
          out.push_back(LatticePoint(std::move(coords)));
        }
        int i = dim_ - 1;
        while (i >= 0 && delta[static_cast<std::size_t>(i)] == range_) {
          delta[static_cast<std::size_t>(i)] = -range_;
          --i;
        }
        if (i < 0) break;
        ++delta[static_cast<std::size_t>(i)];
      }
      return Window(std::move(out));
    }
    case Kind::kExplicit: {
      auto it = std::lower_bound(keys_.begin(), keys_.end(), t);
      if (it == keys_.end() || *it != t) return Window{};
      return adj_[static_cast<std::size_t>(it - keys_.begin())];
    }
  }
  return Window{};
}

Configuration concat(const Configuration& x, const Configuration& y) {
  if (y.is_empty()) return x;
  if (x.is_empty()) return y;
  if (!x.support().disjoint_with(y.support())) {
    Window common = x.support().set_intersect(y.support());
    throw DomainError("concat: supports overlap at " + common.point(0).to_string());
  }
  Window support = x.support().set_union(y.support());
  std::vector<std::uint8_t> values(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    const LatticePoint& t = support.point(i);
    auto px = x.support().index_of(t);
    values[i] = px ? x.value_at(*px) : y.value(t);
  }
  return Configuration(std::move(support), std::move(values));
}

Configuration restrict_to(const Configuration& x, const Window& T) {
  if (!T.is_subset_of(x.support())) {
    throw DomainError("restrict: " + T.to_string() + " is not contained in the support " +
                      x.support().to_string());
  }
  std::vector<std::uint8_t> values(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) {
    values[i] = x.value(T.point(i));
  }
  return Configuration(T, std::move(values));
}

Configuration splice(const Configuration& x, const Configuration& u, std::size_t j,
                     std::span<const LatticePoint> enumeration) {
  const std::size_t n = enumeration.size();
  if (j < 1 || j > n) {
    throw DomainError("splice index " + std::to_string(j) + " out of range 1.." +
                      std::to_string(n));
  }
  Window full(std::vector<LatticePoint>(enumeration.begin(), enumeration.end()));
  if (x.support() != full || u.support() != full) {
    throw DomainError("splice: both configurations must live on the enumerated window");
  }
  std::vector<LatticePoint> pts;
  std::vector<std::uint8_t> vals;
  pts.reserve(n - 1);
  vals.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 == j) continue;
    pts.push_back(enumeration[i]);
    vals.push_back(i + 1 < j ? x.value(enumeration[i]) : u.value(enumeration[i]));
  }
  // target window is canonical; reorder value pairs accordingly
  Window w(pts);
  std::vector<std::uint8_t> ordered(w.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ordered[*w.index_of(pts[i])] = vals[i];
  }
  return Configuration(std::move(w), std::move(ordered));
}

Window boundary(const NeighborhoodSystem& system, const Window& V) {
  Window acc;
  for (const LatticePoint& t : V) {
    acc = acc.set_union(system.neighbors(t));
  }
  return acc.set_minus(V);
}

std::uint64_t configuration_count(const Window& V, const Alphabet& X) {
  std::uint64_t total = 1;
  const std::uint64_t k = X.size();
  for (std::size_t i = 0; i < V.size(); ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / k) {
      throw ResourceError("configuration count overflows 64 bits");
    }
    total *= k;
  }
  return total;
}

std::vector<Configuration> enumerate_configurations(const Window& V, const Alphabet& X,
                                                    std::uint64_t cap) {
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(configuration_count(V, X), cap)));
  for_each_configuration(V, X, [&out](Configuration c) { out.push_back(std::move(c)); }, cap);
  return out;
}

}  // namespace condfield
