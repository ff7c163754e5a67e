#include <doctest.h>

#include "solenoid/classify.hpp"

#include <random>

using namespace solenoid;

namespace {

SupernaturalNumber sn(const char* text) { return SupernaturalNumber::from_json(nlohmann::json::parse(text)); }

CoveringDegrees degs(std::vector<long> prefix, std::vector<long> tail = {}) {
  CoveringDegrees d;
  for (long x : prefix) d.prefix.push_back(x);
  for (long x : tail) d.tail.push_back(x);
  return d;
}

}  // namespace

TEST_CASE("factorization") {
  CHECK(factorize(1).empty());
  CHECK(factorize(360) == std::map<Int, unsigned long>{{2, 3}, {3, 2}, {5, 1}});
  Int big = Int("1000000007") * Int("998244353");
  CHECK(factorize(big) == std::map<Int, unsigned long>{{Int("998244353"), 1}, {Int("1000000007"), 1}});
  Int sq = Int("10007") * Int("10007") * 4;
  CHECK(factorize(sq) == std::map<Int, unsigned long>{{2, 2}, {Int("10007"), 2}});
}

TEST_CASE("covering degrees") {
  LatticeChain c(1, 1);
  for (const char* a : {"1/2", "1/3", "1/4"}) {
    RatMatrix m(1, 1);
    m(0, 0) = parse_rational(a);
    c = extend_chain(c, RationalRep{m});
  }
  CHECK(covering_degrees(c).prefix == std::vector<Int>{2, 3, 4});
  CHECK(covering_degrees(LatticeChain(1, 1)).prefix.empty());
  LatticeChain c2(2, 1);
  RatMatrix m(1, 2);
  m(0, 0) = Rat(1, 2);
  m(0, 1) = Rat(1, 3);
  c2 = extend_chain(c2, RationalRep{m});
  CHECK(covering_degrees(c2).prefix == std::vector<Int>{6});
}

TEST_CASE("cech invariant") {
  CHECK(cech_invariant(degs({}, {2})) == sn(R"({"2":"inf"})"));
  CHECK(cech_invariant(degs({6})) == sn(R"({"2":1,"3":1})"));
  CHECK(cech_invariant(degs({}, {2, 3})) == sn(R"({"2":"inf","3":"inf"})"));
  CHECK(cech_invariant(degs({3, 2}, {2, 3})) == sn(R"({"2":"inf","3":"inf"})"));
  CHECK(cech_invariant(degs({4, 9, 5})).to_json() == nlohmann::json::parse(R"({"2":2,"3":2,"5":1})"));
  CHECK(cech_invariant(degs({5}, {2})).to_string() == "2^inf * 5^1");
  // additivity over concatenation
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    std::vector<long> a, b;
    for (int j = 0; j < 4; ++j) {
      a.push_back(static_cast<long>(2 + rng() % 30));
      b.push_back(static_cast<long>(2 + rng() % 30));
    }
    std::vector<long> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    SupernaturalNumber sum = cech_invariant(degs(a));
    sum.add(cech_invariant(degs(b)));
    CHECK(cech_invariant(degs(ab)) == sum);
  }
}

TEST_CASE("baer equivalence") {
  CHECK(!baer_equivalent(sn(R"({"2":"inf"})"), sn(R"({"3":"inf"})")));
  BaerVerdict v = baer_compare(sn(R"({"2":"inf"})"), sn(R"({"2":"inf","3":1})"));
  CHECK(v.equivalent);
  CHECK(v.discard_left.empty());
  CHECK(v.discard_right == sn(R"({"3":1})"));
  SupernaturalNumber p = sn(R"({"5":"inf","7":2})");
  CHECK(baer_equivalent(p, p));

  // equivalence axioms on a fixed 20-instance set
  std::vector<SupernaturalNumber> set;
  const char* texts[] = {R"({})", R"({"2":1})", R"({"2":"inf"})", R"({"2":"inf","3":1})", R"({"3":"inf"})",
                         R"({"2":"inf","3":"inf"})", R"({"2":"inf","3":"inf","5":4})", R"({"5":2,"7":1})",
                         R"({"7":"inf"})", R"({"2":5,"7":"inf"})", R"({"11":"inf","13":"inf"})", R"({"13":"inf","11":"inf","2":1})",
                         R"({"2":3})", R"({"3":"inf","2":7})", R"({"2":"inf","5":"inf"})", R"({"5":"inf"})",
                         R"({"5":"inf","3":2})", R"({"17":1})", R"({"2":"inf","3":"inf","5":"inf"})", R"({"3":1})"};
  for (const char* t : texts) set.push_back(sn(t));
  REQUIRE(set.size() == 20);
  for (auto& a : set) {
    CHECK(baer_equivalent(a, a));
    for (auto& b : set) {
      CHECK(baer_equivalent(a, b) == baer_equivalent(b, a));
      for (auto& c : set)
        if (baer_equivalent(a, b) && baer_equivalent(b, c)) CHECK(baer_equivalent(a, c));
    }
  }
}

TEST_CASE("prefix changes never change the class") {
  SupernaturalNumber q = cech_invariant(degs({}, {2, 3}));
  for (std::vector<long> prefix : {std::vector<long>{}, {5}, {7, 11, 4}, {2, 2, 2}}) {
    CHECK(baer_equivalent(cech_invariant(degs(prefix, {3, 2})), q));
    CHECK(!baer_equivalent(cech_invariant(degs(prefix, {3})), q));
  }
}

TEST_CASE("supernatural json") {
  auto s = sn(R"({"2":3,"3":"inf"})");
  CHECK(s.to_json().dump() == R"({"2":3,"3":"inf"})");
  CHECK_THROWS_AS(sn(R"({"4":1})"), Error);
  CHECK_THROWS_AS(sn(R"({"2":-1})"), Error);
}

TEST_CASE("fiber address") {
  PlanConfig c;
  c.mode = PlanMode::Example5;
  c.ns = {2, 3};
  c.levels = 2;
  SolenoidPlan p = build(c);
  DiskTree t(p);
  Point z = center(p, 2, {Int(5)});
  auto a = fiber_address(t, z, 2);
  REQUIRE(a.size() == 2);
  CHECK(a[1] == IntVector{Int(5)});
  CHECK(a[0] == IntVector{Int(1)});
  CHECK_THROWS_AS(fiber_address(t, {0.1, 0}, 1), Error);
  for (const auto& d : t.cantor_approx(2)) {
    Point w = d.center;
    w[0] += d.radius * 0.3;
    auto addr = fiber_address(t, w, 2);
    CHECK(addr[1] == d.gamma);
    CHECK(p.chain.coset(1, addr[1]) == addr[0]);
  }
}
