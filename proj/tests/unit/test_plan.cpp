#include <doctest.h>

#include "solenoid/plan.hpp"

#include <cmath>

using namespace solenoid;

namespace {

RationalRep rep1(const char* a) {
  RatMatrix m(1, 1);
  m(0, 0) = parse_rational(a);
  return RationalRep{m};
}

PlanConfig example5(std::vector<long> ns) {
  PlanConfig c;
  c.mode = PlanMode::Example5;
  c.k = 1;
  c.q = 2;
  for (long n : ns) c.ns.push_back(n);
  c.levels = ns.size();
  return c;
}

}  // namespace

TEST_CASE("generic points") {
  Point z = choose_generic_point(1, Rat(1), 1, 2);
  CHECK(z == Point{0.5, 0});
  Point z4 = choose_generic_point(1, Rat(1), 2, 4);
  CHECK(z4[0] == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(z4[1] == 0);
  CHECK(z4[2] == z4[0]);
  CHECK(norm(z4) == doctest::Approx(0.5).epsilon(1e-15));
  Point z3 = choose_generic_point(2, Rat(1, 8), 1, 3);
  CHECK(z3 == Point{1.0 / 16, 0, 0});
  CHECK_THROWS_AS(choose_generic_point(1, Rat(1), 2, 3), Error);
}

TEST_CASE("genericity margin") {
  CHECK(genericity_margin({0.5, 0}, rep1("1/2")) == 0.5);
  CHECK(std::isinf(genericity_margin({0.5, 0}, rep1("0"))));
  RatMatrix a(2, 1);
  a(0, 0) = Rat(1, 2);
  RationalRep alpha{a};
  Point z{0.3, 0.1, 0.2, 0.0};
  CHECK(genericity_margin(z, alpha) == doctest::Approx(std::sqrt(0.1)).epsilon(1e-15));
  // two independent rotations: fixing either plane is possible, so the smaller plane decides
  RatMatrix b(2, 2);
  b(0, 0) = Rat(1, 2);
  b(1, 1) = Rat(1, 3);
  CHECK(genericity_margin(z, RationalRep{b}) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("safe radius") {
  Rat e = safe_radius({0.5, 0}, rep1("1/2"), Rat(1));
  CHECK(e <= Rat(100, 601));
  CHECK(e.get_d() == doctest::Approx(1 / 6.01).epsilon(1e-11));
  // 5-point orbit: half chord = 0.5 sin(pi/5) = 0.2939 > 1/6.01, cap still binds
  CHECK(safe_radius({0.5, 0}, rep1("1/5"), Rat(1)).get_d() == doctest::Approx(1 / 6.01).epsilon(1e-11));
  // 40-point orbit: half chord 0.5 sin(pi/40) binds
  CHECK(safe_radius({0.5, 0}, rep1("1/40"), Rat(1)).get_d() ==
        doctest::Approx(0.5 * std::sin(std::acos(-1.0) / 40)).epsilon(1e-8));
  CHECK_THROWS_AS(safe_radius({0.5, 0}, rep1("1"), Rat(1)), Error);
}

TEST_CASE("pick representation") {
  RationalRep a = pick_representation(Rat(3, 10), 1, 1, 0);
  CHECK(a.matrix(0, 0) == Rat(1, 4));
  RationalRep b = pick_representation(Rat(3, 10), 2, 1, 0);
  CHECK(b.matrix(0, 0) == Rat(1, 4));
  CHECK(b.matrix(0, 1) == Rat(1, 5));
  CHECK(quotient(kernel_lattice(b)).order() == 20);
  CHECK_THROWS_AS(pick_representation(Rat(0), 1, 1, 0), Error);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RationalRep c = pick_representation(Rat(1, 7), 3, 2, seed);
    CHECK(quotient(kernel_lattice(c)).order() > 1);
    for (std::size_t j = 0; j < 3; ++j) {
      Rat n2 = norm_squared(c.generator(j));
      CHECK(n2 > 0);
      CHECK(n2 < Rat(1, 49));
    }
    CHECK(rational_matrix_to_json(c.matrix) == rational_matrix_to_json(pick_representation(Rat(1, 7), 3, 2, seed).matrix));
  }
}

TEST_CASE("example preset radii and rotations") {
  SolenoidPlan p = build(example5({2, 3, 4}));
  CHECK(p.level(0).epsilon == 1);
  CHECK(p.level(1).epsilon == Rat(1, 8));
  CHECK(p.level(2).epsilon == Rat(1, 96));
  CHECK(p.level(3).epsilon == Rat(1, 1536));
  CHECK(p.chain.beta(3, {Int(1)})[0] == Rat(17, 24));
  CHECK(!p.budget_enforced);
  CHECK(center(p, 1, {Int(0)}) == Point{0.5, 0});
  Point c1 = center(p, 1, {Int(1)});
  CHECK(c1[0] == -0.5);
  CHECK(c1[1] == 0.0);
  // periodicity: gamma in Gamma_2 = 6Z
  CHECK(center(p, 2, {Int(6)}) == center(p, 2, {Int(0)}));
  CHECK(center(p, 3, {Int(24 * 5 + 7)}) == center(p, 3, {Int(7)}));
}

TEST_CASE("level zero plan") {
  PlanConfig c;
  c.levels = 0;
  SolenoidPlan p = build(c);
  CHECK(p.depth() == 0);
  CHECK(p.levels.size() == 1);
  CHECK(p.level(0).epsilon == 1);
  CHECK(p.chain.big_phi(0) == IntMatrix::identity(1));
}

TEST_CASE("thin budget") {
  PlanConfig c;
  c.levels = 0;
  c.delta = Rat(1, 2);
  SolenoidPlan p = build(c);
  Rat d1 = thin_budget(p, 0);
  CHECK(d1.get_d() == doctest::Approx(0.5 / p.profile.cbound(1)).epsilon(1e-11));
  CHECK(d1 <= Rat(1, 2) / p.profile.cbound_exact(1));
}

TEST_CASE("auto plan invariants") {
  PlanConfig c;
  c.k = 2;
  c.q = 2;
  c.r = 1;
  c.delta = Rat(1, 2);
  c.levels = 3;
  SolenoidPlan p = build(c);
  REQUIRE(p.depth() == 3);
  Int prod = 1;
  for (std::size_t l = 1; l <= 3; ++l) {
    const LevelGeometry& g = p.level(l);
    CHECK(g.epsilon * 6 < p.level(l - 1).epsilon);
    CHECK(norm(g.z) == doctest::Approx(p.level(l - 1).eps() / 2).epsilon(1e-15));
    for (std::size_t j = 0; j < 2; ++j) CHECK(norm_squared(p.chain.level(l).alpha.generator(j)) < g.delta * g.delta);
    prod *= p.chain.level(l).group.order();
    CHECK(determinant(p.chain.big_phi(l)) == prod);
  }
  nlohmann::json j = p.to_json();
  SolenoidPlan back = SolenoidPlan::from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.to_json().dump() == j.dump());
  // deterministic rebuild
  CHECK(build(c).to_json().dump() == j.dump());
}

TEST_CASE("explicit alpha violating its budget is rejected") {
  PlanConfig c;
  c.mode = PlanMode::Explicit;
  c.k = 1;
  c.q = 2;
  c.delta = Rat(1, 2);
  c.alphas = {rep1("1/2")};
  c.levels = 1;
  try {
    build(c);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("||alpha(e_j)|| < delta_l") != std::string::npos);
  }
}

TEST_CASE("config parsing") {
  auto j = nlohmann::json::parse(R"({"k":1,"q":2,"r":1,"delta":"1/2","mode":"example5","ns":[2,3]})");
  PlanConfig c = PlanConfig::from_json(j);
  CHECK(c.levels == 2);
  CHECK(c.mode == PlanMode::Example5);
  CHECK_THROWS_AS(PlanConfig::from_json(nlohmann::json::parse(R"({"mode":"bogus"})")), Error);
  CHECK_THROWS_AS(PlanConfig::from_json(nlohmann::json::parse(R"({"delta":"1/0"})")), Error);
  CHECK_THROWS_AS(SolenoidPlan::from_json(nlohmann::json::parse(R"({"format":"other"})")), Error);
}
