#include <doctest.h>

#include <random>

#include "condfield/lattice.hpp"
#include "oracles.hpp"

using namespace condfield;

namespace {

LatticePoint pt(std::vector<int> c) { return LatticePoint(std::move(c)); }

Configuration cfg(const Window& w, std::vector<std::uint8_t> vals) {
  return Configuration(w, std::move(vals));
}

}  // namespace

TEST_CASE("window canonical order and set algebra") {
  Window w({pt({2}), pt({0}), pt({1})});
  CHECK(w.point(0) == pt({0}));
  CHECK(w.point(2) == pt({2}));
  CHECK_THROWS_AS(Window({pt({0}), pt({0})}), DomainError);
  CHECK_THROWS_AS(Window({pt({0}), pt({0, 1})}), DomainError);

  Window a({pt({0}), pt({1})});
  Window b({pt({1}), pt({2})});
  CHECK(a.set_union(b).size() == 3);
  CHECK(a.set_minus(b) == Window({pt({0})}));
  CHECK(a.set_intersect(b) == Window({pt({1})}));
  CHECK(a.is_subset_of(w));
  CHECK_FALSE(a.disjoint_with(b));
}

TEST_CASE("concat basic cases") {
  Window t1 = Window::single(pt({0}));
  Window t2 = Window::single(pt({1}));
  Configuration x = cfg(t1, {0});
  Configuration y = cfg(t2, {1});

  Configuration xy = concat(x, y);
  CHECK(xy.support().size() == 2);
  CHECK(xy.value(pt({0})) == 0);
  CHECK(xy.value(pt({1})) == 1);

  CHECK(concat(x, Configuration::empty()) == x);
  CHECK(concat(Configuration::empty(), x) == x);
  CHECK_THROWS_AS(concat(x, cfg(t1, {1})), DomainError);

  // commutative as maps, associative on pairwise-disjoint supports
  CHECK(concat(x, y) == concat(y, x));
  Configuration z = cfg(Window::single(pt({2})), {1});
  CHECK(concat(concat(x, y), z) == concat(x, concat(y, z)));
}

TEST_CASE("restrict basic cases") {
  Window w({pt({0}), pt({1})});
  Configuration x = cfg(w, {0, 1});
  CHECK(restrict_to(x, Window::single(pt({1}))) == cfg(Window::single(pt({1})), {1}));
  CHECK(restrict_to(x, Window{}) == Configuration::empty());
  CHECK_THROWS_AS(restrict_to(x, Window::single(pt({2}))), DomainError);
}

TEST_CASE("restrict of concat recovers the part") {
  std::mt19937_64 rng(11);
  const Alphabet X = oracle::ternary();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LatticePoint> pts;
    for (int i = 0; i < 6; ++i) {
      if (rng() % 2) pts.push_back(pt({i}));
    }
    Window support(pts);
    std::vector<std::uint8_t> vals(support.size());
    for (auto& v : vals) v = static_cast<std::uint8_t>(rng() % X.size());
    Configuration x(support, vals);

    std::vector<LatticePoint> other;
    for (int i = 6; i < 9; ++i) other.push_back(pt({i}));
    Window osup(other);
    std::vector<std::uint8_t> ovals(osup.size());
    for (auto& v : ovals) v = static_cast<std::uint8_t>(rng() % X.size());
    Configuration y(osup, ovals);

    CHECK(restrict_to(concat(x, y), x.support()) == x);
    CHECK(restrict_to(concat(x, y), y.support()) == y);
  }
}

TEST_CASE("splice matches its defining cases") {
  std::vector<LatticePoint> en = {pt({0}), pt({1}), pt({2})};
  Window w(en);
  Configuration x = cfg(w, {0, 0, 0});
  Configuration u = cfg(w, {1, 1, 1});

  // middle index keeps x before, u after
  Configuration mid = splice(x, u, 2, en);
  CHECK(mid.support() == Window({pt({0}), pt({2})}));
  CHECK(mid.value(pt({0})) == 0);
  CHECK(mid.value(pt({2})) == 1);

  std::vector<LatticePoint> two = {pt({0}), pt({1})};
  Window w2(two);
  Configuration x2 = cfg(w2, {0, 0});
  Configuration u2 = cfg(w2, {1, 1});
  CHECK(splice(x2, u2, 1, two) == cfg(Window::single(pt({1})), {1}));
  CHECK(splice(x2, u2, 2, two) == cfg(Window::single(pt({0})), {0}));
  CHECK_THROWS_AS(splice(x2, u2, 3, two), DomainError);
  CHECK_THROWS_AS(splice(x2, u, 1, two), DomainError);
}

TEST_CASE("splice of a configuration with itself is restriction") {
  std::vector<LatticePoint> en = {pt({0}), pt({1}), pt({2}), pt({3})};
  Window w(en);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint8_t> vals(4);
    for (auto& v : vals) v = static_cast<std::uint8_t>(rng() % 2);
    Configuration x(w, vals);
    for (std::size_t j = 1; j <= 4; ++j) {
      Window rest = w.set_minus(Window::single(en[j - 1]));
      CHECK(splice(x, x, j, en) == restrict_to(x, rest));
    }
  }
}

TEST_CASE("boundary of nearest-neighbor system") {
  const auto nb = NeighborhoodSystem::nearest_neighbor(1);
  CHECK(boundary(nb, Window::single(pt({0}))) == Window({pt({-1}), pt({1})}));
  CHECK(boundary(nb, Window({pt({0}), pt({1})})) == Window({pt({-1}), pt({2})}));
  CHECK(boundary(NeighborhoodSystem::empty_system(), Window({pt({0}), pt({7})})) == Window{});
}

TEST_CASE("boundary symmetry on a master window") {
  const auto nb = NeighborhoodSystem::nearest_neighbor(2);
  const Window master = oracle::grid2d(3, 3);
  for (const LatticePoint& t : master) {
    for (const LatticePoint& s : master) {
      if (t == s) continue;
      const bool ts = boundary(nb, Window::single(s)).contains(t);
      const bool st = boundary(nb, Window::single(t)).contains(s);
      CHECK(ts == st);
    }
  }
}

TEST_CASE("explicit pair system is symmetric and irreflexive") {
  auto nb = NeighborhoodSystem::from_pairs({{pt({0}), pt({5})}, {pt({5}), pt({9})}});
  CHECK(nb.neighbors(pt({0})) == Window({pt({5})}));
  CHECK(nb.neighbors(pt({5})) == Window({pt({0}), pt({9})}));
  CHECK(nb.neighbors(pt({42})) == Window{});
  CHECK_THROWS_AS(NeighborhoodSystem::from_pairs({{pt({1}), pt({1})}}), DomainError);
}

TEST_CASE("configuration enumeration is canonical and complete") {
  const Alphabet X = oracle::binary();
  const Window t = Window::single(pt({0}));
  auto single = enumerate_configurations(t, X);
  REQUIRE(single.size() == 2);
  CHECK(single[0] == cfg(t, {0}));
  CHECK(single[1] == cfg(t, {1}));

  auto empty = enumerate_configurations(Window{}, X);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0] == Configuration::empty());

  const Window w3 = oracle::chain(3);
  auto all = enumerate_configurations(w3, X);
  REQUIRE(all.size() == 8);
  // lexicographic order and no duplicates
  for (std::size_t i = 1; i < all.size(); ++i) {
    CHECK(all[i - 1] < all[i]);
  }
  CHECK_THROWS_AS(enumerate_configurations(w3, X, 7), ResourceError);
}

TEST_CASE("alphabet validation") {
  CHECK_THROWS_AS(Alphabet({1.0}), DomainError);
  CHECK_THROWS_AS(Alphabet({1.0, 1.0}), DomainError);
  const Alphabet X({-1.0, 1.0});
  CHECK(X.index_of(-1.0) == 0);
  CHECK(X.index_of(2.0) == std::nullopt);
}
