#include <doctest.h>

#include "condfield/consistency.hpp"
#include "condfield/reconstruct.hpp"
#include "oracles.hpp"

using namespace condfield;

namespace {

LatticePoint pt(std::vector<int> c) { return LatticePoint(std::move(c)); }

FiniteField seeded_field(int n, const Alphabet& X, std::uint64_t seed) {
  return random_positive_field(oracle::chain(n), X, seed, 1e-4);
}

double joint_dev(const FiniteField& a, const FiniteField& b) {
  double dev = 0.0;
  for (std::size_t i = 0; i < a.joint().table().size(); ++i) {
    dev = std::max(dev, std::abs(a.joint().table()[i] - b.joint().table()[i]));
  }
  return dev;
}

double table_dev(const FSpec& a, const FSpec& b) {
  double dev = 0.0;
  for (const auto& [v, s] : a.table().sorted_keys()) {
    const auto* ba = a.table().find(v, s);
    const auto* bb = b.table().find(v, s);
    REQUIRE(bb != nullptr);
    for (std::size_t i = 0; i < ba->p.size(); ++i) {
      dev = std::max(dev, std::abs(ba->p[i] - bb->p[i]));
    }
  }
  return dev;
}

FiniteField product3() {
  std::map<LatticePoint, std::vector<double>> probs;
  probs[pt({0})] = {0.2, 0.8};
  probs[pt({1})] = {0.6, 0.4};
  probs[pt({2})] = {0.35, 0.65};
  return product_field(oracle::chain(3), oracle::binary(), probs);
}

}  // namespace

TEST_CASE("field is restored from its f-system") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (int n : {2, 3, 5}) {
      const FiniteField field = seeded_field(n, oracle::binary(), seed);
      ReconstructionInfo info;
      const FiniteField back = field_from_fspec(fspec_from_field(field), {}, &info);
      INFO("n=", n, " seed=", seed, " defect=", info.norm_defect);
      CHECK(joint_dev(field, back) < 1e-10);
      CHECK(info.probe_spread < 1e-10);
    }
  }
  const FiniteField tern = seeded_field(3, oracle::ternary(), 9);
  CHECK(joint_dev(tern, field_from_fspec(fspec_from_field(tern))) < 1e-10);
}

TEST_CASE("product field round trips exactly through every system") {
  const FiniteField field = product3();
  CHECK(joint_dev(field, field_from_fspec(fspec_from_field(field))) < 1e-12);
  CHECK(joint_dev(field, field_from_1fspec(onefspec_from_field(field))) < 1e-12);
  CHECK(joint_dev(field, field_from_palm(palm_from_field(field))) < 1e-12);
}

TEST_CASE("f-system round trips back to itself") {
  for (std::uint64_t seed : {4u, 5u}) {
    const FiniteField field = seeded_field(4, oracle::binary(), seed);
    const FSpec q = fspec_from_field(field);
    const FSpec again = fspec_from_field(field_from_fspec(q));
    CHECK(table_dev(q, again) < 1e-10);
  }
}

TEST_CASE("field is restored from its one-point system") {
  for (std::uint64_t seed : {6u, 7u}) {
    for (int n : {2, 4, 5}) {
      const FiniteField field = seeded_field(n, oracle::binary(), seed);
      ReconstructionInfo info;
      const FiniteField back = field_from_1fspec(onefspec_from_field(field), {}, &info);
      INFO("n=", n, " seed=", seed);
      CHECK(joint_dev(field, back) < 1e-10);
    }
  }
}

TEST_CASE("field is restored from its palm system") {
  for (std::uint64_t seed : {8u, 9u}) {
    for (int n : {2, 4}) {
      const FiniteField field = seeded_field(n, oracle::binary(), seed);
      const FiniteField back = field_from_palm(palm_from_field(field));
      CHECK(joint_dev(field, back) < 1e-10);
    }
  }
}

TEST_CASE("one-site master returns the stored empty-boundary entry") {
  const FiniteField field = seeded_field(1, oracle::ternary(), 10);
  const FiniteField via_f = field_from_fspec(fspec_from_field(field));
  const FiniteField via_1f = field_from_1fspec(onefspec_from_field(field));
  CHECK(joint_dev(field, via_f) < 1e-12);
  CHECK(joint_dev(field, via_1f) < 1e-12);
  CHECK_THROWS_AS(field_from_palm(palm_from_field(field)), DomainError);
}

TEST_CASE("reconstruction rejects inconsistent f-systems") {
  int caught = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FiniteField field = seeded_field(3, oracle::binary(), 900 + seed);
    const FSpec bad = perturbed(fspec_from_field(field), seed);
    try {
      (void)field_from_fspec(bad);
    } catch (const ReconstructError&) {
      ++caught;
    }
  }
  CHECK(caught == 10);
}

TEST_CASE("reconstruction rejects inconsistent one-point systems") {
  int caught = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FiniteField field = seeded_field(3, oracle::binary(), 950 + seed);
    const OneFSpec bad = perturbed(onefspec_from_field(field), seed);
    try {
      (void)field_from_1fspec(bad);
    } catch (const ReconstructError&) {
      ++caught;
    }
  }
  CHECK(caught == 10);
}

TEST_CASE("product lift: singleton windows are copied verbatim") {
  const FiniteField field = seeded_field(3, oracle::binary(), 20);
  const OneFSpec q1 = onefspec_from_field(field);
  const FSpec lifted = lift_1f_to_f_product(q1);
  for (const auto& [v, s] : q1.table().sorted_keys()) {
    const auto* src = q1.table().find(v, s);
    const auto* dst = lifted.table().find(v, s);
    REQUIRE(dst != nullptr);
    CHECK(src->p == dst->p);
  }
}

TEST_CASE("product lift matches the field-derived f-system") {
  const FiniteField ising = oracle::ising_chain(3, 0.5, 1.0);
  const FSpec truth = fspec_from_field(ising);
  const FSpec lifted = lift_1f_to_f_product(onefspec_from_field(ising));
  CHECK(table_dev(truth, lifted) < 1e-10);
  CHECK(check_fspec(lifted).passed);

  for (std::uint64_t seed : {21u, 22u}) {
    const FiniteField field = seeded_field(4, oracle::binary(), seed);
    const FSpec t2 = fspec_from_field(field);
    const FSpec l2 = lift_1f_to_f_product(onefspec_from_field(field));
    CHECK(table_dev(t2, l2) < 1e-10);
  }
}

TEST_CASE("the two lift routes agree") {
  for (std::uint64_t seed : {23u, 24u, 25u}) {
    const FiniteField field = seeded_field(4, oracle::binary(), seed);
    const OneFSpec q1 = onefspec_from_field(field);
    const FSpec prod = lift_1f_to_f_product(q1);
    const FSpec ratio = lift_1f_to_f_ratio(q1);
    CHECK(table_dev(prod, ratio) < 1e-12);
  }
  const FiniteField tern = seeded_field(3, oracle::ternary(), 26);
  CHECK(table_dev(lift_1f_to_f_product(onefspec_from_field(tern)),
                  lift_1f_to_f_ratio(onefspec_from_field(tern))) < 1e-12);
}

TEST_CASE("lift of a one-point slice recovers the original f-system") {
  const FiniteField field = seeded_field(4, oracle::binary(), 27);
  const FSpec q = fspec_from_field(field);
  const FSpec again = lift_1f_to_f_product(onefspec_from_field(field));
  CHECK(table_dev(q, again) < 1e-10);
}

TEST_CASE("palm lift: palm slice verbatim, consistency, ground truth") {
  for (std::uint64_t seed : {28u, 29u}) {
    const FiniteField field = seeded_field(4, oracle::binary(), seed);
    const PalmSpec qp = palm_from_field(field);
    const FSpec lifted = lift_palm_to_f(qp);
    // palm slice is copied bit for bit
    for (const auto& [v, s] : qp.table().sorted_keys()) {
      const auto* src = qp.table().find(v, s);
      const auto* dst = lifted.table().find(v, s);
      REQUIRE(dst != nullptr);
      CHECK(src->p == dst->p);
    }
    CHECK(table_dev(fspec_from_field(field), lifted) < 1e-10);
    CHECK(check_fspec(lifted).passed);
  }
}

TEST_CASE("commuting square through the one-point lift") {
  for (std::uint64_t seed : {30u, 31u}) {
    const FiniteField field = seeded_field(4, oracle::binary(), seed);
    const OneFSpec q1 = onefspec_from_field(field);
    const FiniteField direct = field_from_1fspec(q1);
    const FiniteField lifted = field_from_fspec(lift_1f_to_f_product(q1));
    CHECK(joint_dev(direct, lifted) < 1e-10);
  }
}

TEST_CASE("commuting square through the palm lift") {
  for (std::uint64_t seed : {32u, 33u}) {
    const FiniteField field = seeded_field(4, oracle::binary(), seed);
    const PalmSpec qp = palm_from_field(field);
    const FiniteField direct = field_from_palm(qp);
    const FiniteField lifted = field_from_fspec(lift_palm_to_f(qp));
    CHECK(joint_dev(direct, lifted) < 1e-10);
  }
}

TEST_CASE("lifts and reconstructions inherit positivity") {
  const FiniteField field = seeded_field(4, oracle::binary(), 34);
  CHECK(lift_1f_to_f_product(onefspec_from_field(field)).min_probability() > 0.0);
  CHECK(lift_1f_to_f_ratio(onefspec_from_field(field)).min_probability() > 0.0);
  CHECK(lift_palm_to_f(palm_from_field(field)).min_probability() > 0.0);
  CHECK(field_from_fspec(fspec_from_field(field)).joint().min_probability() > 0.0);
}

TEST_CASE("dlr residual vanishes for matching pairs and flags mismatches") {
  const FiniteField field = seeded_field(4, oracle::binary(), 35);
  const FSpec q = fspec_from_field(field);
  bool sampled = false;
  CHECK(dlr_residual(q, field, {}, &sampled) < 1e-10);
  CHECK_FALSE(sampled);
  CHECK(dlr_residual(q, field_from_fspec(q)) < 1e-10);

  const FiniteField product = product3();
  CHECK(dlr_residual(fspec_from_field(product), product) < 1e-12);

  int mismatched = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FiniteField p1 = seeded_field(3, oracle::binary(), 1000 + seed);
    const FiniteField p2 = seeded_field(3, oracle::binary(), 2000 + seed);
    if (dlr_residual(fspec_from_field(p1), p2) >= 1e-3) ++mismatched;
  }
  CHECK(mismatched == 10);
}

TEST_CASE("the full stack works on a two-dimensional master window") {
  const Window master = oracle::grid2d(2, 2);
  const FiniteField field = random_positive_field(master, oracle::ternary(), 321, 1e-4);
  CHECK(check_fspec(fspec_from_field(field)).passed);
  CHECK(check_1fspec(onefspec_from_field(field)).passed);
  CHECK(joint_dev(field, field_from_fspec(fspec_from_field(field))) < 1e-10);
  CHECK(joint_dev(field, field_from_1fspec(onefspec_from_field(field))) < 1e-10);
  CHECK(joint_dev(field, field_from_palm(palm_from_field(field))) < 1e-10);
  CHECK(table_dev(lift_1f_to_f_product(onefspec_from_field(field)),
                  lift_1f_to_f_ratio(onefspec_from_field(field))) < 1e-12);
}

TEST_CASE("z-independent systems reconstruct to their own marginals") {
  // product-field conditionals ignore z, so the probe formula returns the
  // marginal table itself
  const FiniteField field = product3();
  const FSpec q = fspec_from_field(field);
  const FiniteField back = field_from_fspec(q);
  const Window v = Window::single(pt({1}));
  const Distribution m = marginal(back, v);
  CHECK(residual(m.prob_by_rank(0), 0.6) < 1e-12);
}
