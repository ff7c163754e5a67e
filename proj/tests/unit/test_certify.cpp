#include <doctest.h>

#include "solenoid/certify.hpp"

#include <cmath>
#include <random>

using namespace solenoid;

namespace {

PlanConfig example5(std::vector<long> ns) {
  PlanConfig c;
  c.mode = PlanMode::Example5;
  for (long n : ns) c.ns.push_back(n);
  c.levels = ns.size();
  return c;
}

PlanConfig auto_r2(std::size_t levels) {
  PlanConfig c;
  c.k = 1;
  c.q = 2;
  c.r = 2;
  c.delta = Rat(1, 2);
  c.levels = levels;
  return c;
}

CertifyOptions light() {
  CertifyOptions o;
  o.c1_points = 500;
  o.cp_points = 200;
  o.volume_points = 200;
  o.invariance_points = 200;
  o.commutativity_points = 200;
  o.distality_pairs = 10;
  return o;
}

}  // namespace

TEST_CASE("finite differences") {
  PointMap id = [](const Point& z) { return z; };
  Point d1 = finite_diff(id, {0.1, 0.2}, std::vector<std::size_t>{1}, 1e-3);
  CHECK(std::abs(d1[0]) <= 1e-12);
  CHECK(std::abs(d1[1] - 1) <= 1e-12);
  Point d2 = finite_diff(id, {0.1, 0.2}, std::vector<std::size_t>{0, 1}, 1e-3);
  CHECK(norm(d2) <= 1e-9);
  CHECK_THROWS_AS(finite_diff(id, {0.999, 0}, std::vector<std::size_t>{0}, 1e-3, 1.0), Error);
  CHECK(multi_indices(2, 2) == std::vector<std::vector<std::size_t>>{{0, 0}, {0, 1}, {1, 1}});
  CHECK(multi_indices(3, 3).size() == 10);

  const BumpProfile& prof = BumpProfile::standard();
  RotationVector a = RotationVector::from_rational({Rat(1, 2)});
  PointMap g = [&](const Point& z) { return standard_model(prof, a, z); };
  for (Point z : {Point{0.1, 0}, Point{0.5, 0.45}, Point{0.0, 0.7}}) {
    RealMatrix jac = standard_model_jacobian(prof, a, z);
    for (std::size_t c = 0; c < 2; ++c) {
      Point col = finite_diff(g, z, std::vector<std::size_t>{c}, 1e-5);
      for (std::size_t r = 0; r < 2; ++r) CHECK(std::abs(col[r] - jac[r][c]) <= 1e-6);
    }
    // symmetry of mixed partials
    Point xy = finite_diff(g, z, std::vector<Point>{{1, 0}, {0, 1}}, 1e-4);
    Point yx = finite_diff(g, z, std::vector<Point>{{0, 1}, {1, 0}}, 1e-4);
    CHECK(norm(Point{xy[0] - yx[0], xy[1] - yx[1]}) <= 1e-5);
  }
}

TEST_CASE("framed evaluation agrees with global evaluation") {
  SolenoidPlan p = build(example5({2, 3, 4}));
  DiskTree t(p);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (std::size_t d = 0; d <= 2; ++d)
    for (int i = 0; i < 100; ++i) {
      IntVector g{Int(static_cast<long>(rng() % 24))};
      DiskNode n = d == 0 ? t.root() : t.node(d, g);
      Point w{u(rng), u(rng)};
      for (int sign : {1, -1}) {
        DiskNode img = d == 0 ? t.root() : t.image_node(n, 0, sign);
        Point f = t.eval_generator_framed(3, 0, n, w, sign, img);
        Point z{n.center[0] + n.radius * w[0], n.center[1] + n.radius * w[1]};
        Point h = t.eval_generator(3, 0, z, sign);
        CHECK(std::abs(img.center[0] + img.radius * f[0] - h[0]) <= 1e-14);
        CHECK(std::abs(img.center[1] + img.radius * f[1] - h[1]) <= 1e-14);
      }
    }
}

TEST_CASE("c1 and cp checks on the example preset") {
  SolenoidPlan p = build(example5({2, 3}));
  DiskTree t(p);
  const double k1 = p.profile.kappa1();
  CheckResult c0 = c1_check(t, 0, 0, Grid{2000, 1});
  CHECK(c0.pass);
  CHECK(c0.bound == doctest::Approx((1 + 2 * std::acos(-1.0) * k1) / 2).epsilon(1e-12));
  CHECK(c0.measured >= 2 - 1e-9);  // rotation by pi on the plateau: D(h - Id) = -2 Id
  CheckResult c1 = c1_check(t, 1, 0, Grid{10000, 2});
  CHECK(c1.pass);
  CHECK(c1.measured <= (1 + 2 * std::acos(-1.0) * k1) / 6 * 1.001);

  auto cp = cp_check(t, 1, 0, 2, Grid{2000, 3});
  REQUIRE(cp.size() == 2);
  CHECK(cp[0].pass);
  CHECK(cp[0].measured <= p.profile.cbound(2) * 8.0 / 6 * 1.01);
  CHECK(cp[1].pass);

  // plateau interior: the stage is a rotation there, so second derivatives vanish
  auto flat = cp_check(t, 1, 0, 2, Grid{500, 4, 0, 0.6});
  CHECK(flat[0].measured <= 1e-4 * 8);
  CHECK_THROWS_AS(cp_check(t, 1, 0, 1, Grid{10, 1}), Error);
}

TEST_CASE("vanishing of tangential mixed partials in q = 4") {
  PlanConfig c = example5({2});
  c.mode = PlanMode::Auto;
  c.q = 4;
  c.delta = Rat(1000);
  c.levels = 1;
  SolenoidPlan p = build(c);
  DiskTree t(p);
  auto r = cp_check(t, 0, 0, 2, Grid{300, 5});
  CHECK(r[1].note.empty());
  CHECK(r[1].measured <= r[1].tolerance);
  CHECK(r[1].pass);
}

TEST_CASE("cauchy budget") {
  SolenoidPlan p = build(auto_r2(2));
  auto ok = cauchy_check(p, 2);
  CHECK(ok.size() == 2 * 2);
  for (auto& c : ok) CHECK(c.pass);
  CHECK(cauchy_check(p, 1).size() == 2);
  try {
    cauchy_check(p, 3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("budget not enforced for requested order") != std::string::npos);
  }

  // hand-built violation at level 2
  SolenoidPlan bad = p;
  RatMatrix big(1, 1);
  big(0, 0) = Rat(1, 3);
  LatticeChain ch(1, 1);
  ch = extend_chain(ch, p.chain.level(1).alpha);
  ch = extend_chain(ch, RationalRep{big});
  bad.chain = ch;
  auto v = cauchy_check(bad, 2);
  bool level2_failed = false;
  for (auto& c : v) {
    if (c.level == 1) CHECK(c.pass);
    if (c.level == 2 && !c.pass) {
      level2_failed = true;
      CHECK(c.note.find("||alpha'_2(e_1)|| <= delta * eps_1^1 / (2^1 * C_") != std::string::npos);
    }
  }
  CHECK(level2_failed);

  auto na = cauchy_check(build(example5({2, 3})), 1);
  REQUIRE(na.size() == 1);
  CHECK(!na[0].asserted);
}

TEST_CASE("plan invariants and tampering") {
  SolenoidPlan p = build(example5({2, 3, 4}));
  for (auto& c : plan_invariants(p)) CHECK(c.pass);
  nlohmann::json j = p.to_json();
  j["geometry"][2]["epsilon"] = "1/48";
  SolenoidPlan t = SolenoidPlan::from_json(j);
  bool nesting_failed = false;
  for (auto& c : plan_invariants(t))
    if (c.name == "nesting" && c.level == 2) nesting_failed = !c.pass;
  CHECK(nesting_failed);
}

TEST_CASE("property suite") {
  SolenoidPlan p = build(example5({2, 3, 4}));
  DiskTree t(p);
  auto res = property_suite(t, light());
  for (auto& c : res) {
    INFO(c.name << " level " << c.level << " measured " << c.measured << " tol " << c.tolerance);
    CHECK((c.pass || !c.asserted));
  }
  PlanConfig z;
  z.levels = 0;
  SolenoidPlan p0 = build(z);
  DiskTree t0(p0);
  auto v = property_suite(t0, light());
  REQUIRE(v.size() == 1);
  CHECK(v[0].pass);
}

TEST_CASE("report determinism across job counts") {
  SolenoidPlan p = build(example5({2, 3}));
  CertifyOptions o = light();
  o.seed = 11;
  std::string a = certify(p, 1, o).to_json().dump();
  std::string b = certify(p, 1, o).to_json().dump();
  o.jobs = 3;
  std::string c = certify(p, 1, o).to_json().dump();
  CHECK(a == b);
  CHECK(a == c);
  CHECK(certify(p, 1, o).passed());
  CHECK_THROWS_AS(certify(p, 2, o), Error);
}
