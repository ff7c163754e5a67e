#include "solenoid/certify.hpp"

#include "solenoid/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <random>

namespace solenoid {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kUlp = 0x1p-52;

// Global coordinates carry absolute rounding of a few ulp per evaluated stage. A tolerance
// below that floor cannot be resolved in double precision: such checks are reported only.
void guard_resolution(CheckResult& c, double floor) {
  if (c.tolerance >= floor) return;
  c.asserted = false;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", floor);
  c.note += (c.note.empty() ? "" : "; ") + std::string("reported only: tolerance below the double-precision floor ") + buf;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-check stream: depends only on the run seed and the check's identity.
std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag, std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) h = (h ^ c) * 0x100000001b3ULL;
  return splitmix(splitmix(splitmix(seed ^ h) ^ a) ^ (b + 0x632be59bd9b4e019ULL));
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }
  /// Uniform in the shell r_min <= |p| <= r_max.
  Point in_ball(std::size_t q, double r_min, double r_max) {
    for (;;) {
      Point p(q);
      for (auto& x : p) x = 2 * uniform() - 1;
      const double n = norm(p);
      if (n > 1 || n == 0) continue;
      for (auto& x : p) x *= r_max;
      const double r = norm(p);
      if (r >= r_min && r <= r_max) return p;
    }
  }

 private:
  std::mt19937_64 gen_;
};

struct FramePoint {
  DiskNode node;
  Point w;
};

const FiniteQuotient* level_quotient(const SolenoidPlan& plan, std::size_t l) {
  return l == 0 ? nullptr : &plan.chain.level(l).gamma;
}

std::uint64_t disk_count(const SolenoidPlan& plan, std::size_t l) {
  Int n = plan.chain.gamma_index(l);
  if (!n.fits_ulong_p()) throw Error("too many disks at level " + std::to_string(l) + " to sample");
  return n.get_ui();
}

// Samples spread over the level-l disks: every disk in turn when there are few, random disks otherwise.
std::vector<FramePoint> stratified(const DiskTree& tree, std::size_t l, const Grid& grid) {
  const SolenoidPlan& plan = tree.plan();
  Sampler rng(grid.seed);
  const std::uint64_t n = disk_count(plan, l);
  const FiniteQuotient* quo = level_quotient(plan, l);
  std::map<std::uint64_t, DiskNode> cache;
  std::vector<FramePoint> out;
  out.reserve(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const std::uint64_t idx = n <= grid.count ? i % n : rng.below(n);
    auto it = cache.find(idx);
    if (it == cache.end()) it = cache.emplace(idx, quo ? tree.node(l, quo->representative(idx)) : tree.root()).first;
    out.push_back({it->second, rng.in_ball(plan.q, grid.r_min, grid.r_max)});
  }
  return out;
}

double distance(const Point& a, const Point& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Rat exact_norm_squared(const Point& p) {
  Rat s = 0;
  for (double x : p) {
    Rat r = exact_rational(x);
    s += r * r;
  }
  return s;
}

double alpha_prime_norm(const SolenoidPlan& plan, std::size_t s, std::size_t j) {
  return std::sqrt(norm_squared(plan.chain.level(s).alpha_prime.generator(j)).get_d());
}

double max_of(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, x);
  return m;
}

Point unit(std::size_t q, std::size_t i) {
  Point e(q, 0.0);
  e[i] = 1;
  return e;
}

// Orthonormal frame at w: radial direction first, then Gram-Schmidt on the coordinate axes.
std::vector<Point> radial_frame(const Point& w) {
  const std::size_t q = w.size();
  std::vector<Point> frame;
  const double n = norm(w);
  Point r(q);
  for (std::size_t i = 0; i < q; ++i) r[i] = w[i] / n;
  frame.push_back(r);
  for (std::size_t a = 0; a < q && frame.size() < q; ++a) {
    Point v = unit(q, a);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : frame) {
        double d = 0;
        for (std::size_t i = 0; i < q; ++i) d += v[i] * u[i];
        for (std::size_t i = 0; i < q; ++i) v[i] -= d * u[i];
      }
    const double vn = norm(v);
    if (vn < 1e-6) continue;
    for (auto& x : v) x /= vn;
    frame.push_back(v);
  }
  return frame;
}

// Frame multi-indices (0 = radial) with at least two tangential entries, all distinct.
std::vector<std::vector<std::size_t>> vanishing_indices(std::size_t q, int p) {
  std::vector<std::vector<std::size_t>> out;
  for (auto& idx : multi_indices(q, p)) {
    std::size_t tangential = 0;
    bool distinct = true;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] == 0) continue;
      ++tangential;
      if (i > 0 && idx[i - 1] == idx[i]) distinct = false;
    }
    if (tangential >= 2 && distinct) out.push_back(idx);
  }
  return out;
}

CheckResult make(const std::string& name, std::size_t level, int generator, int order) {
  CheckResult c;
  c.name = name;
  c.level = level;
  c.generator = generator;
  c.order = order;
  return c;
}

// Exact-identity checks: pass iff measured <= tolerance.
CheckResult identity_check(const std::string& name, std::size_t level, int generator, double measured, double tol) {
  CheckResult c = make(name, level, generator, 0);
  c.measured = measured;
  c.bound = 0;
  c.tolerance = tol;
  c.pass = measured <= tol;
  return c;
}

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json CheckResult::to_json() const {
  nlohmann::json j{{"name", name},
                   {"level", level},
                   {"generator", generator < 0 ? nlohmann::json(nullptr) : nlohmann::json(generator)},
                   {"order", order},
                   {"measured", number(measured)},
                   {"bound", number(bound)},
                   {"tolerance", number(tolerance)},
                   {"pass", pass},
                   {"asserted", asserted}};
  if (!note.empty()) j["note"] = note;
  return j;
}

bool CertificationReport::passed() const {
  for (const auto& c : checks)
    if (c.asserted && !c.pass) return false;
  return true;
}

const CheckResult* CertificationReport::find(const std::string& name, std::size_t level, int generator, int order) const {
  for (const auto& c : checks)
    if (c.name == name && c.level == level && (generator < 0 || c.generator == generator) && (order < 0 || c.order == order))
      return &c;
  return nullptr;
}

nlohmann::json CertificationReport::to_json() const {
  std::size_t asserted = 0, failed = 0;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    asserted += c.asserted;
    failed += c.asserted && !c.pass;
    list.push_back(c.to_json());
  }
  return {{"format", "solenoid-certification"},
          {"version", 1},
          {"seed", seed},
          {"r", r},
          {"tolerance_scale", tolerance_scale},
          {"passed", passed()},
          {"summary", {{"checks", checks.size()}, {"asserted", asserted}, {"failed", failed}}},
          {"checks", list}};
}

Point finite_diff(const PointMap& f, const Point& z, const std::vector<Point>& directions, double step,
                  double domain_radius) {
  const std::size_t p = directions.size();
  if (p > static_cast<std::size_t>(kMaxOrder)) throw Error("finite_diff order exceeds the supported maximum");
  if (!(step > 0)) throw Error("finite_diff needs a positive step");
  double reach = 0;
  for (const auto& u : directions) reach += 2 * step * norm(u);
  if (norm(z) + reach > domain_radius) throw Error("evaluation point too close to the domain boundary");
  static constexpr double kOffsets[4] = {-2, -1, 1, 2};
  static constexpr double kWeights[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
  auto rec = [&](auto&& self, std::size_t depth, const Point& x) -> Point {
    if (depth == 0) return f(x);
    const Point& u = directions[depth - 1];
    Point acc(x.size(), 0.0);
    for (int s = 0; s < 4; ++s) {
      Point y = x;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += kOffsets[s] * step * u[i];
      Point v = self(self, depth - 1, y);
      if (acc.size() != v.size()) acc.assign(v.size(), 0.0);
      for (std::size_t i = 0; i < v.size(); ++i) acc[i] += kWeights[s] * v[i];
    }
    for (auto& a : acc) a /= step;
    return acc;
  };
  return rec(rec, p, z);
}

Point finite_diff(const PointMap& f, const Point& z, const std::vector<std::size_t>& multi_index, double step,
                  double domain_radius) {
  std::vector<Point> dirs;
  for (std::size_t i : multi_index) {
    if (i >= z.size()) throw Error("multi-index entry out of range");
    dirs.push_back(unit(z.size(), i));
  }
  return finite_diff(f, z, dirs, step, domain_radius);
}

std::vector<std::vector<std::size_t>> multi_indices(std::size_t q, int p) {
  std::vector<std::vector<std::size_t>> out;
  if (p <= 0 || q == 0) return out;
  std::vector<std::size_t> cur(static_cast<std::size_t>(p), 0);
  for (;;) {
    out.push_back(cur);
    int i = p - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == q - 1) --i;
    if (i < 0) return out;
    const std::size_t v = cur[static_cast<std::size_t>(i)] + 1;
    for (std::size_t t = static_cast<std::size_t>(i); t < cur.size(); ++t) cur[t] = v;
  }
}

CheckResult c1_check(const DiskTree& tree, std::size_t l, std::size_t j, const Grid& grid, const CertifyOptions& opts) {
  const SolenoidPlan& plan = tree.plan();
  if (l >= plan.depth()) throw Error("c1_check needs level " + std::to_string(l + 1) + " built");
  const double eps = plan.level(l).eps();
  const double a = alpha_prime_norm(plan, l + 1, j);
  const double domain = l == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  auto samples = stratified(tree, l, grid);
  std::vector<double> worst(samples.size(), 0.0);
  parallel_for(samples.size(), opts.jobs, [&](std::size_t i) {
    const FramePoint& s = samples[i];
    PointMap f = [&](const Point& w) { return tree.stage_framed_displacement(j, 1, s.node, w); };
    double m = eps * norm(f(s.w));
    for (std::size_t c = 0; c < plan.q; ++c)
      m = std::max(m, norm(finite_diff(f, s.w, std::vector<std::size_t>{c}, opts.fd_step, domain)));
    worst[i] = m;
  });
  CheckResult r = make("c1", l + 1, static_cast<int>(j), 1);
  r.measured = max_of(worst);
  r.bound = (1 + kTwoPi * plan.profile.kappa1()) * a;
  r.tolerance = 1e-3 * opts.tolerance_scale;
  r.pass = r.measured <= r.bound * (1 + r.tolerance);
  r.note = "max over " + std::to_string(samples.size()) + " frame samples of displacement and column norms of D(h - Id)";
  return r;
}

std::vector<CheckResult> cp_check(const DiskTree& tree, std::size_t l, std::size_t j, int p, const Grid& grid,
                                  const CertifyOptions& opts) {
  const SolenoidPlan& plan = tree.plan();
  if (p < 2 || p > plan.profile.parameters().r_max) throw Error("cp_check needs 2 <= p <= r_max");
  if (l >= plan.depth()) throw Error("cp_check needs level " + std::to_string(l + 1) + " built");
  const std::size_t q = plan.q;
  const double eps = plan.level(l).eps();
  const double scale = std::pow(eps, 1 - p);  // frame derivatives -> global derivatives
  const double a = alpha_prime_norm(plan, l + 1, j);
  const double domain = l == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  const auto coords = multi_indices(q, p);
  const auto vanish = vanishing_indices(q, p);
  auto samples = stratified(tree, l, grid);
  std::vector<double> worst(samples.size(), 0.0), worst_v(samples.size(), 0.0);
  parallel_for(samples.size(), opts.jobs, [&](std::size_t i) {
    const FramePoint& s = samples[i];
    PointMap f = [&](const Point& w) { return tree.stage_framed_displacement(j, 1, s.node, w); };
    double m = 0;
    for (const auto& idx : coords) m = std::max(m, norm(finite_diff(f, s.w, idx, opts.fd_step, domain)));
    worst[i] = m;
    if (!vanish.empty() && norm(s.w) > 1e-3) {
      auto frame = radial_frame(s.w);
      double v = 0;
      for (const auto& idx : vanish) {
        std::vector<Point> dirs;
        for (std::size_t t : idx) dirs.push_back(frame[t]);
        v = std::max(v, norm(finite_diff(f, s.w, dirs, opts.fd_step, domain)));
      }
      worst_v[i] = v;
    }
  });
  CheckResult r = make("cp", l + 1, static_cast<int>(j), p);
  r.measured = max_of(worst) * scale;
  r.bound = plan.profile.cbound(p) * std::pow(eps, 1 - p) * a;
  r.tolerance = 1e-2 * opts.tolerance_scale;
  r.pass = r.measured <= r.bound * (1 + r.tolerance);

  // rounding of nested differences grows like ulp(|D|) (3/2)^p / h^p with |D| <= 2 pi ||a||; the floor never drops below 1e-4
  const double noise = kUlp * kTwoPi * a * std::pow(1.5, p) / std::pow(opts.fd_step, p);
  CheckResult v = make("cp_vanishing", l + 1, static_cast<int>(j), p);
  v.measured = max_of(worst_v) * scale;
  v.bound = 0;
  v.tolerance = std::max(1e-4, 10 * noise) * scale * opts.tolerance_scale;
  v.pass = v.measured <= v.tolerance;
  if (vanish.empty()) v.note = "vacuous: q = " + std::to_string(q) + " has fewer than two tangential directions";
  return {r, v};
}

std::vector<CheckResult> cauchy_check(const SolenoidPlan& plan, int r, const std::vector<CheckResult>& measured,
                                      const CertifyOptions& opts) {
  if (r < 1 || r > plan.profile.parameters().r_max) throw Error("requested order outside 1..r_max");
  if (r > plan.r) throw Error("budget not enforced for requested order " + std::to_string(r) + " (plan built for r = " +
                              std::to_string(plan.r) + ")");
  std::vector<CheckResult> out;
  if (!plan.budget_enforced) {
    CheckResult c = make("cauchy_budget", 0, -1, r);
    c.asserted = false;
    c.note = "not applicable: plan was built without budget enforcement";
    out.push_back(c);
    return out;
  }
  for (std::size_t l = 0; l < plan.depth(); ++l) {
    const Rat eps = plan.level(l).epsilon;
    Rat eps_pow = 1;
    for (int t = 1; t < r; ++t) eps_pow *= eps;
    Int two_l = 1;
    two_l <<= static_cast<mp_bitcnt_t>(l);
    for (std::size_t j = 0; j < plan.k; ++j) {
      const Rat lhs2 = norm_squared(plan.chain.level(l + 1).alpha_prime.generator(j));
      for (int p = 1; p <= r; ++p) {
        const Rat rhs = plan.delta * eps_pow / (Rat(two_l) * plan.profile.cbound_exact(p));
        CheckResult c = make("cauchy_budget", l + 1, static_cast<int>(j), p);
        c.measured = std::sqrt(lhs2.get_d());
        c.bound = rhs.get_d();
        c.tolerance = 0;
        c.pass = lhs2 <= rhs * rhs;
        if (!c.pass)
          c.note = "violated: ||alpha'_" + std::to_string(l + 1) + "(e_" + std::to_string(j + 1) + ")|| <= delta * eps_" +
                   std::to_string(l) + "^" + std::to_string(r - 1) + " / (2^" + std::to_string(l) + " * C_" +
                   std::to_string(p) + ")";
        out.push_back(c);
      }
    }
  }
  for (const auto& m : measured) {
    if (m.name != "c1" && m.name != "cp") continue;
    if (m.order > r || m.level == 0) continue;
    const std::size_t l = m.level - 1;
    CheckResult c = make("cauchy_measured", m.level, m.generator, m.order);
    c.measured = m.measured;
    c.bound = std::ldexp(plan.delta.get_d(), -static_cast<int>(l));
    c.tolerance = 1e-2 * opts.tolerance_scale;
    c.pass = c.measured <= c.bound * (1 + c.tolerance);
    c.note = "measured deviation against delta * 2^-" + std::to_string(l);
    out.push_back(c);
  }
  return out;
}

std::vector<CheckResult> plan_invariants(const SolenoidPlan& plan, const CertifyOptions&) {
  std::vector<CheckResult> out;
  const std::size_t L = plan.depth();
  {
    CheckResult c = identity_check("plan_levels", 0, -1, plan.levels.size() == L + 1 ? 0 : 1, 0);
    c.note = "geometry entries match the chain depth";
    out.push_back(c);
    if (!c.pass) return out;
  }
  for (std::size_t l = 1; l <= L; ++l) {
    const LevelGeometry& g = plan.level(l);
    const Rat prev = plan.level(l - 1).epsilon;
    const Rat z2 = exact_norm_squared(g.z);
    const double zn = std::sqrt(z2.get_d());

    CheckResult nest = make("nesting", l, -1, 0);
    const Rat room = prev * Rat(2, 3) - g.epsilon;
    nest.measured = zn + g.eps();
    nest.bound = Rat(prev * Rat(2, 3)).get_d();
    nest.pass = room > 0 && z2 < room * room;
    nest.note = "|z_l| + eps_l < (2/3) eps_{l-1}";
    out.push_back(nest);

    CheckResult dis = make("disjointness", l, -1, 0);
    dis.measured = min_orbit_distance(g.z, plan.chain.level(l).alpha);
    dis.bound = 2 * g.eps();
    dis.pass = dis.measured > dis.bound;
    dis.note = "sibling centers farther apart than 2 eps_l";
    out.push_back(dis);

    CheckResult shr = make("shrinkage", l, -1, 0);
    shr.measured = g.eps();
    shr.bound = Rat(prev / 6).get_d();
    shr.pass = g.epsilon < prev / 6;
    shr.note = "eps_l < eps_{l-1} / 6";
    out.push_back(shr);

    CheckResult exc = make("exclusion", l, -1, 0);
    const Rat reach = prev / 3 + g.epsilon;
    exc.measured = zn;
    exc.bound = reach.get_d();
    exc.pass = z2 > reach * reach;
    exc.note = "level-l disks miss the disk of radius eps_{l-1}/3 about the parent center";
    out.push_back(exc);

    for (std::size_t j = 0; j < plan.k; ++j) {
      CheckResult th = make("thinness", l, static_cast<int>(j), 0);
      const Rat n2 = norm_squared(plan.chain.level(l).alpha.generator(j));
      th.measured = std::sqrt(n2.get_d());
      th.bound = g.delta.get_d();
      th.pass = n2 > 0 && n2 < g.delta * g.delta;
      th.note = "0 < ||alpha_l(e_j)|| < delta_l";
      out.push_back(th);
    }
  }
  return out;
}

std::vector<CheckResult> property_suite(const DiskTree& tree, const CertifyOptions& opts) {
  const SolenoidPlan& plan = tree.plan();
  const std::size_t L = plan.depth(), q = plan.q, k = plan.k;
  const double ts = opts.tolerance_scale;
  std::vector<CheckResult> out;
  if (L == 0) {
    CheckResult c = identity_check("identity_action", 0, -1, 0, 0);
    c.note = "plan has no levels; every generator is the identity";
    out.push_back(c);
    return out;
  }

  // (1) the origin is fixed
  for (std::size_t s = 1; s <= L; ++s) {
    double m = 0;
    for (std::size_t j = 0; j < k; ++j)
      for (int sign : {1, -1}) m = std::max(m, norm(tree.eval_generator(s, j, Point(q, 0.0), sign)));
    out.push_back(identity_check("fixed_origin", s, -1, m, 1e-12 * ts));
  }

  // (2) identity near the boundary sphere
  {
    Sampler rng(derive_seed(opts.seed, "boundary"));
    std::vector<Point> pts;
    for (std::size_t i = 0; i < opts.volume_points; ++i) pts.push_back(rng.in_ball(q, BumpProfile::kOuter, 1.0));
    for (std::size_t s = 1; s <= L; ++s) {
      double m = 0;
      std::size_t identical = 0, total = 0;
      for (const auto& z : pts)
        for (std::size_t j = 0; j < k; ++j)
          for (int sign : {1, -1}) {
            Point h = tree.eval_generator(s, j, z, sign);
            m = std::max(m, distance(h, z));
            identical += h == z;
            ++total;
          }
      CheckResult c = identity_check("boundary_identity", s, -1, m, 1e-12 * ts);
      c.note = "bit-identical " + std::to_string(identical) + "/" + std::to_string(total);
      out.push_back(c);
    }
  }

  // norm-shell preservation of the first stage (the distality mechanism)
  {
    Sampler rng(derive_seed(opts.seed, "shell"));
    std::vector<Point> pts;
    for (std::size_t i = 0; i < opts.volume_points; ++i) pts.push_back(rng.in_ball(q, 0, 1.0));
    double m = 0;
    for (const auto& z : pts)
      for (std::size_t j = 0; j < k; ++j)
        for (int sign : {1, -1}) m = std::max(m, std::abs(norm(tree.eval_generator(1, j, z, sign)) - norm(z)));
    out.push_back(identity_check("norm_shell", 1, -1, m, 1e-12 * ts));
  }

  // (3) volume: Jacobian determinant of h_{s,j} on level-(s-1) disks, in frame coordinates
  for (std::size_t s = 1; s <= L; ++s)
    for (std::size_t j = 0; j < k; ++j) {
      Grid g{opts.volume_points, derive_seed(opts.seed, "volume", s, j), 0, 0.999};
      auto samples = stratified(tree, s - 1, g);
      std::vector<DiskNode> images(samples.size());
      std::map<std::string, DiskNode> cache;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        std::string key;
        for (const auto& x : samples[i].node.gamma) key += to_string(x) + ",";
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, s == 1 ? tree.root() : tree.image_node(samples[i].node, j)).first;
        images[i] = it->second;
      }
      std::vector<double> dev(samples.size(), 0.0);
      const double domain = s == 1 ? 1.0 : std::numeric_limits<double>::infinity();
      parallel_for(samples.size(), opts.jobs, [&](std::size_t i) {
        const FramePoint& sp = samples[i];
        PointMap f = [&](const Point& w) { return tree.eval_generator_framed(s, j, sp.node, w, 1, images[i]); };
        RealMatrix jac(q, std::vector<double>(q));
        for (std::size_t c = 0; c < q; ++c) {
          Point col = finite_diff(f, sp.w, std::vector<std::size_t>{c}, opts.volume_step, domain);
          for (std::size_t r = 0; r < q; ++r) jac[r][c] = col[r];
        }
        dev[i] = std::abs(determinant(jac) - 1);
      });
      CheckResult c = identity_check("volume", s, static_cast<int>(j), max_of(dev), 1e-6 * ts);
      c.note = "|det J - 1| over " + std::to_string(samples.size()) + " samples on level-" + std::to_string(s - 1) + " disks";
      out.push_back(c);
    }

  // commutativity of the generators at full depth
  {
    Sampler rng(derive_seed(opts.seed, "commute"));
    Grid g{opts.commutativity_points / 2, derive_seed(opts.seed, "commute-deep"), 0, 0.999};
    std::vector<Point> pts;
    for (std::size_t i = 0; i < opts.commutativity_points - g.count; ++i) pts.push_back(rng.in_ball(q, 0, 0.999));
    for (const auto& s : stratified(tree, L, g)) {
      Point z(q);
      for (std::size_t i = 0; i < q; ++i) z[i] = s.node.center[i] + s.node.radius * s.w[i];
      pts.push_back(z);
    }
    std::vector<double> dev(pts.size(), 0.0);
    parallel_for(pts.size(), opts.jobs, [&](std::size_t i) {
      double m = 0;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
          Point ab = tree.eval_generator(L, a, tree.eval_generator(L, b, pts[i]));
          Point ba = tree.eval_generator(L, b, tree.eval_generator(L, a, pts[i]));
          m = std::max(m, distance(ab, ba));
        }
      dev[i] = m;
    });
    CheckResult c = identity_check("commutativity", L, -1, max_of(dev), 1e-9 * ts);
    if (k < 2) c.note = "vacuous: a single generator";
    out.push_back(c);
  }

  // (5) disk permutation: centers move equivariantly, cosets form one orbit, hat K_l is invariant
  for (std::size_t l = 1; l <= L; ++l) {
    const FiniteQuotient& quo = plan.chain.level(l).gamma;
    const std::uint64_t n = disk_count(plan, l);
    const double eps = plan.level(l).eps();
    Sampler rng(derive_seed(opts.seed, "equivariance", l));
    std::vector<std::uint64_t> idx;
    for (std::size_t i = 0; i < std::min<std::uint64_t>(n, opts.coset_samples); ++i)
      idx.push_back(n <= opts.coset_samples ? i : rng.below(n));
    std::vector<double> dev(idx.size(), 0.0);
    parallel_for(idx.size(), opts.jobs, [&](std::size_t i) {
      IntVector gamma = quo.representative(idx[i]);
      Point c = center(plan, l, gamma);
      double m = 0;
      for (std::size_t j = 0; j < k; ++j) {
        IntVector shifted = gamma;
        shifted[j] += 1;
        m = std::max(m, distance(tree.eval_generator(L, j, c), center(plan, l, shifted)));
      }
      dev[i] = m;
    });
    CheckResult eq = identity_check("equivariance", l, -1, max_of(dev), 1e-9 * eps * ts);
    guard_resolution(eq, 8 * kUlp * static_cast<double>(L));
    out.push_back(eq);

    CheckResult tr = make("transitivity", l, -1, 0);
    tr.bound = static_cast<double>(n);
    if (n > opts.max_bfs_order) {
      tr.asserted = false;
      tr.note = "skipped: " + std::to_string(n) + " cosets exceed the walk limit";
    } else {
      std::vector<char> seen(n, 0);
      std::vector<std::uint64_t> queue{0};
      seen[0] = 1;
      bool labels_ok = true;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        IntVector g = quo.representative(queue[head]);
        if (quo.index_of(quo.coset_map(g)) != queue[head]) labels_ok = false;
        for (std::size_t j = 0; j < k; ++j)
          for (int sign : {1, -1}) {
            IntVector h = g;
            h[j] += sign;
            const std::uint64_t t = quo.index_of(quo.coset_map(h));
            if (!seen[t]) {
              seen[t] = 1;
              queue.push_back(t);
            }
          }
      }
      tr.measured = static_cast<double>(queue.size());
      tr.pass = labels_ok && queue.size() == n;
      tr.note = "cosets reached from 0 by +-e_j steps";
    }
    out.push_back(tr);

    Grid g{opts.invariance_points, derive_seed(opts.seed, "invariance", l), 0, 0.999};
    auto samples = stratified(tree, l, g);
    std::vector<double> escaped(samples.size(), 0.0);
    parallel_for(samples.size(), opts.jobs, [&](std::size_t i) {
      Point z(q);
      for (std::size_t d = 0; d < q; ++d) z[d] = samples[i].node.center[d] + samples[i].node.radius * samples[i].w[d];
      for (std::size_t j = 0; j < k; ++j)
        for (int sign : {1, -1})
          if (tree.locate(tree.eval_generator(L, j, z, sign), l).size() < l) escaped[i] += 1;
    });
    double total = 0;
    for (double e : escaped) total += e;
    CheckResult inv = identity_check("K_invariance", l, -1, total, 0);
    inv.note = "images leaving hat K_l among " + std::to_string(samples.size() * k * 2);
    // samples sit 1e-3 eps_l inside their disk; that margin must exceed the rounding of global coordinates
    if (1e-3 * plan.level(l).eps() < 64 * kUlp) {
      inv.asserted = false;
      inv.note += "; reported only: disk radius below double-precision resolution";
    }
    out.push_back(inv);
  }

  // (7) elements of Gamma_{l+1} act trivially on U_l
  for (std::size_t l = 0; l < L; ++l) {
    const IntMatrix phi = plan.chain.big_phi(l + 1);
    const double eps = plan.level(l).eps();
    for (std::size_t col = 0; col < k; ++col) {
      IntVector gamma = phi.column(col);
      Int len = 0;
      for (const auto& x : gamma) len += abs(x);
      CheckResult c = make("U_periodicity", l, static_cast<int>(col), 0);
      c.tolerance = 1e-9 * eps * ts;
      if (len * static_cast<unsigned long>(opts.u_points) > Int(static_cast<unsigned long>(opts.max_word_work))) {
        c.asserted = false;
        c.measured = 0;
        c.note = "skipped: word length " + to_string(len) + " exceeds the evaluation budget";
        out.push_back(c);
        continue;
      }
      Grid g{opts.u_points, derive_seed(opts.seed, "periodicity", l, col), 0, 0.999 / 6};
      auto samples = stratified(tree, l, g);
      std::vector<double> dev(samples.size(), 0.0);
      parallel_for(samples.size(), opts.jobs, [&](std::size_t i) {
        Point z(q);
        for (std::size_t d = 0; d < q; ++d) z[d] = samples[i].node.center[d] + samples[i].node.radius * samples[i].w[d];
        dev[i] = distance(tree.eval_element(l + 1, gamma, z), z);
      });
      c.measured = max_of(dev);
      c.pass = c.measured <= c.tolerance;
      c.note = "column " + std::to_string(col + 1) + " of Phi_" + std::to_string(l + 1) + " on U_" + std::to_string(l);
      guard_resolution(c, 8 * kUlp * len.get_d() * static_cast<double>(l + 1));
      out.push_back(c);
    }
  }

  // (6) distality probe: reported only, a finite word ball cannot bound an infimum over the group
  {
    const int R = opts.distality_radius;
    Sampler rng(derive_seed(opts.seed, "distality"));
    std::vector<std::pair<Point, Point>> pairs;
    while (pairs.size() < opts.distality_pairs) {
      Point x = rng.in_ball(q, 0, 0.999), y = rng.in_ball(q, 0, 0.999);
      if (distance(x, y) > 0) pairs.emplace_back(x, y);
    }
    std::vector<double> ratio(pairs.size(), 0.0);
    parallel_for(pairs.size(), opts.jobs, [&](std::size_t i) {
      // images over the box |g|_inf <= R, built one coordinate at a time as eval_element orders them
      std::vector<std::pair<Point, Point>> layer{pairs[i]};
      for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::pair<Point, Point>> next;
        for (const auto& [x, y] : layer) {
          next.emplace_back(x, y);
          for (int sign : {1, -1}) {
            Point a = x, b = y;
            for (int t = 1; t <= R; ++t) {
              a = tree.eval_generator(L, j, a, sign);
              b = tree.eval_generator(L, j, b, sign);
              next.emplace_back(a, b);
            }
          }
        }
        layer = std::move(next);
      }
      double m = std::numeric_limits<double>::infinity();
      for (const auto& [a, b] : layer) m = std::min(m, distance(a, b));
      ratio[i] = m / distance(pairs[i].first, pairs[i].second);
    });
    double m = std::numeric_limits<double>::infinity();
    for (double r : ratio) m = std::min(m, r);
    CheckResult c = make("distality_probe", L, -1, 0);
    c.measured = m;
    c.asserted = false;
    c.note = "min over " + std::to_string(pairs.size()) + " pairs of min_g |gx - gy| / |x - y|, |g|_inf <= " +
             std::to_string(R) + "; reported, not asserted";
    out.push_back(c);
  }
  return out;
}

CertificationReport certify(const SolenoidPlan& plan, int r, const CertifyOptions& opts) {
  if (r < 1 || r > plan.profile.parameters().r_max) throw Error("requested order outside 1..r_max");
  if (r > plan.r) throw Error("budget not enforced for requested order " + std::to_string(r) + " (plan built for r = " +
                              std::to_string(plan.r) + ")");
  CertificationReport report;
  report.seed = opts.seed;
  report.r = r;
  report.tolerance_scale = opts.tolerance_scale;
  report.append(plan_invariants(plan, opts));
  DiskTree tree(plan);
  std::vector<CheckResult> derivs;
  for (std::size_t l = 0; l < plan.depth(); ++l)
    for (std::size_t j = 0; j < plan.k; ++j) {
      derivs.push_back(c1_check(tree, l, j, Grid{opts.c1_points, derive_seed(opts.seed, "c1", l, j)}, opts));
      for (int p = 2; p <= r; ++p) {
        auto cp = cp_check(tree, l, j, p, Grid{opts.cp_points, derive_seed(opts.seed, "cp", l, j * 8 + p)}, opts);
        derivs.insert(derivs.end(), cp.begin(), cp.end());
      }
    }
  report.append(derivs);
  report.append(cauchy_check(plan, r, derivs, opts));
  report.append(property_suite(tree, opts));
  return report;
}

}  // namespace solenoid
