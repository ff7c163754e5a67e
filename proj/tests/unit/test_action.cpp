#include <doctest.h>

#include "solenoid/action.hpp"

#include <cmath>
#include <random>

using namespace solenoid;

namespace {

PlanConfig example5(std::vector<long> ns) {
  PlanConfig c;
  c.mode = PlanMode::Example5;
  c.k = 1;
  c.q = 2;
  for (long n : ns) c.ns.push_back(n);
  c.levels = ns.size();
  return c;
}

PlanConfig small_auto(std::size_t k, std::size_t q, std::size_t levels) {
  PlanConfig c;
  c.k = k;
  c.q = q;
  c.delta = Rat(1000);
  c.levels = levels;
  return c;
}

double dist(const Point& a, const Point& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Oracle: scan every coset of every level instead of descending the tree.
Point brute_generator(const SolenoidPlan& plan, std::size_t L, std::size_t j, const Point& z, int sign) {
  Point p = z;
  for (std::size_t s = 1; s <= L; ++s) {
    Point c(plan.q, 0.0);
    double eps = 1;
    if (s > 1) {
      const FiniteQuotient& g = plan.chain.level(s - 1).gamma;
      bool found = false;
      for (std::uint64_t i = 0; i < g.order().get_ui(); ++i) {
        Point ci = center(plan, s - 1, g.representative(i));
        if (dist(ci, p) <= plan.level(s - 1).eps()) {
          c = ci;
          eps = plan.level(s - 1).eps();
          found = true;
          break;
        }
      }
      if (!found) return p;
    }
    RatVector a = plan.chain.level(s).alpha_prime.generator(j);
    if (sign < 0)
      for (auto& x : a) x = -x;
    Point w(plan.q);
    for (std::size_t i = 0; i < plan.q; ++i) w[i] = (p[i] - c[i]) / eps;
    if (norm(w) >= 0.75) continue;
    Point g = standard_model(plan.profile, RotationVector::from_rational(a), w);
    for (std::size_t i = 0; i < plan.q; ++i) p[i] = c[i] + eps * g[i];
  }
  return p;
}

Point random_in_ball(std::mt19937_64& rng, const Point& c, double r) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0, 1);
  Point p(c.size());
  for (auto& x : p) x = g(rng);
  double n = norm(p), s = r * std::pow(u(rng), 1.0 / c.size());
  for (std::size_t i = 0; i < c.size(); ++i) p[i] = c[i] + p[i] * s / n;
  return p;
}

}  // namespace

TEST_CASE("locate") {
  SolenoidPlan p = build(example5({2}));
  DiskTree t(p);
  CHECK(t.locate({0, 0}, 1).empty());
  auto it = t.locate({0.5, 0}, 1);
  REQUIRE(it.size() == 1);
  CHECK(it[0] == IntVector{Int(0)});
  CHECK(t.locate({1, 0}, 1).empty());
  CHECK(t.locate({-0.5, 0.01}, 1)[0] == IntVector{Int(1)});
}

TEST_CASE("generator examples") {
  SolenoidPlan p1 = build(example5({2}));
  DiskTree t1(p1);
  Point r = t1.eval_generator(1, 0, {0.5, 0});
  CHECK(r[0] == -0.5);
  CHECK(std::abs(r[1]) == 0.0);
  CHECK(t1.eval_generator(1, 0, {0, 0}) == Point{0, 0});
  Point far{0.8 * std::cos(0.3), 0.8 * std::sin(0.3)};
  CHECK(t1.eval_generator(1, 0, far) == far);

  SolenoidPlan p2 = build(example5({2, 3}));
  DiskTree t2(p2);
  Point c10 = center(p2, 1, {Int(0)});
  double e1 = p2.level(1).eps();
  Point z{c10[0] + e1 / 2, c10[1]};
  Point h = t2.hat_h(2, 0, z);
  const double th = 2 * std::acos(-1.0) / 6;
  CHECK(h[0] == doctest::Approx(c10[0] + e1 / 2 * std::cos(th)).epsilon(1e-15));
  CHECK(h[1] == doctest::Approx(e1 / 2 * std::sin(th)).epsilon(1e-14));
  CHECK(t2.hat_h(2, 0, {0.2, 0}) == Point{0.2, 0});
  CHECK(t2.hat_h(2, 0, c10) == c10);
}

TEST_CASE("element evaluation and inverses") {
  SolenoidPlan p = build(example5({2, 3, 4}));
  DiskTree t(p);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    Point z = random_in_ball(rng, {0, 0}, 0.8);
    CHECK(t.eval_element(3, {Int(0)}, z) == z);
    CHECK(t.eval_element(3, {Int(1)}, z) == t.eval_generator(3, 0, z));
    Point back = t.eval_generator(3, 0, t.eval_generator(3, 0, z), -1);
    CHECK(dist(back, z) <= 1e-12);
  }
}

TEST_CASE("tree descent agrees with exhaustive disk scan") {
  SolenoidPlan p = build(small_auto(2, 2, 3));
  REQUIRE(p.chain.gamma_index(3) < 2000);
  DiskTree t(p);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    // bias samples toward deep disks
    Point z;
    if (i % 2 == 0) {
      z = random_in_ball(rng, {0, 0}, 0.8);
    } else {
      const FiniteQuotient& g = p.chain.level(3).gamma;
      std::uint64_t idx = rng() % g.order().get_ui();
      z = random_in_ball(rng, center(p, 3, g.representative(idx)), p.level(2).eps());
    }
    for (std::size_t j = 0; j < 2; ++j)
      for (int sign : {1, -1}) {
        Point a = t.eval_generator(3, j, z, sign);
        Point b = brute_generator(p, 3, j, z, sign);
        CHECK(dist(a, b) <= 1e-15);
      }
  }
}

TEST_CASE("commutativity and equivariance on a two-generator plan") {
  SolenoidPlan p = build(small_auto(2, 2, 3));
  DiskTree t(p);
  std::mt19937_64 rng(13);
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    Point z = random_in_ball(rng, {0, 0}, 0.8);
    Point ab = t.eval_generator(3, 0, t.eval_generator(3, 1, z));
    Point ba = t.eval_generator(3, 1, t.eval_generator(3, 0, z));
    worst = std::max(worst, dist(ab, ba));
  }
  CHECK(worst <= 1e-9);

  for (std::size_t l = 1; l <= 3; ++l) {
    const FiniteQuotient& g = p.chain.level(l).gamma;
    for (std::uint64_t idx = 0; idx < std::min<std::uint64_t>(g.order().get_ui(), 100); ++idx) {
      IntVector gamma = g.representative(idx);
      for (std::size_t j = 0; j < 2; ++j) {
        IntVector shifted = gamma;
        shifted[j] += 1;
        Point img = t.eval_generator(3, j, center(p, l, gamma));
        CHECK(dist(img, center(p, l, shifted)) <= 1e-9 * p.level(l).eps());
      }
    }
  }
}

TEST_CASE("U level") {
  SolenoidPlan p = build(example5({2, 3}));
  DiskTree t(p);
  Point c = center(p, 1, {Int(1)});
  CHECK(t.in_U_level(1, c));
  Point off = c;
  off[0] += p.level(1).eps() / 3;
  CHECK(!t.in_U_level(1, off));
  CHECK(!t.in_U_level(1, {0.1, 0}));
}

TEST_CASE("orbit sample and cantor approximation") {
  SolenoidPlan p = build(example5({2}));
  DiskTree t(p);
  auto o = t.orbit_sample(1, {0.5, 0}, 1);
  REQUIRE(o.size() == 2);
  CHECK(o[0].first == IntVector{Int(-1)});
  CHECK(o[0].second == Point{-0.5, 0});
  CHECK(o[1].second == Point{0.5, 0});
  CHECK(t.orbit_sample(1, {0.5, 0}, 0).size() == 1);
  CHECK(t.orbit_sample(1, {0.9, 0}, 3).size() == 1);
  CHECK_THROWS_AS(t.orbit_sample(1, {0.5, 0}, 10, 5), Error);
  std::string csv = orbit_csv(o, 1, 2);
  CHECK(csv == "g1,x1,x2\n-1,-0.5,0\n0,0.5,0\n");

  auto d1 = t.cantor_approx(1);
  REQUIRE(d1.size() == 2);
  CHECK(d1[0].radius == 0.125);
  CHECK(std::abs(d1[0].center[0]) == 0.5);
  CHECK(d1[0].center[0] == -d1[1].center[0]);
  auto d0 = t.cantor_approx(0);
  REQUIRE(d0.size() == 1);
  CHECK(d0[0].radius == 1);

  SolenoidPlan p2 = build(example5({2, 3}));
  DiskTree t2(p2);
  auto d2 = t2.cantor_approx(2);
  CHECK(d2.size() == 6);
  for (auto& d : d2) CHECK(d.radius == 1.0 / 96);
  auto tree = t2.export_tree(2);
  CHECK(tree["children"].size() == 2);
  CHECK(tree["children"][0]["children"].size() == 3);
  CHECK(tree["children"][0]["children"][0]["radius"] == "1/96");
}
