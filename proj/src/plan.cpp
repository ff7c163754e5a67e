#include "solenoid/plan.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace solenoid {

std::string to_string(PlanMode mode) {
  switch (mode) {
    case PlanMode::Explicit: return "explicit";
    case PlanMode::Auto: return "auto";
    case PlanMode::Example5: return "example5";
  }
  return "auto";
}

PlanMode parse_mode(const std::string& s) {
  if (s == "explicit") return PlanMode::Explicit;
  if (s == "auto") return PlanMode::Auto;
  if (s == "example5") return PlanMode::Example5;
  throw Error("unknown plan mode '" + s + "' (expected explicit, auto or example5)");
}

namespace {

Rat rational_field(const nlohmann::json& x, const char* name) {
  if (x.is_string()) return parse_rational(x.get<std::string>());
  if (x.is_number_integer()) return Rat(Int(std::to_string(x.get<long long>())));
  if (x.is_number()) return exact_rational(x.get<double>());
  throw Error(std::string("field '") + name + "' must be a number or a \"p/q\" string");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t checked_order(const FiniteQuotient& g) {
  if (g.order() > Int(static_cast<unsigned long>(kMaxGroupOrder)))
    throw Error("finite group of order " + to_string(g.order()) + " exceeds the enumeration cap " +
                std::to_string(kMaxGroupOrder));
  return g.order().get_ui();
}

double complex_modulus_squared(const Point& z, std::size_t i) { return z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1]; }

}  // namespace

PlanConfig PlanConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  PlanConfig c;
  try {
    c.mode = parse_mode(j.value("mode", std::string("auto")));
    c.k = j.value("k", std::size_t{1});
    c.q = j.value("q", std::size_t{2});
    c.r = j.value("r", 1);
    if (j.contains("delta")) c.delta = rational_field(j["delta"], "delta");
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("alphas"))
      for (const auto& a : j["alphas"]) c.alphas.push_back(RationalRep{rational_matrix_from_json(a)});
    if (j.contains("ns"))
      for (const auto& n : j["ns"]) {
        Rat v = rational_field(n, "ns");
        if (v.get_den() != 1) throw Error("every entry of ns must be an integer");
        c.ns.push_back(v.get_num());
      }
    std::size_t fallback = c.mode == PlanMode::Explicit ? c.alphas.size()
                           : c.mode == PlanMode::Example5 ? c.ns.size()
                                                          : 1;
    c.levels = j.value("levels", fallback);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed config: ") + e.what());
  }
  return c;
}

nlohmann::json PlanConfig::to_json() const {
  nlohmann::json j{{"k", k}, {"q", q}, {"r", r}, {"delta", solenoid::to_string(delta)},
                   {"levels", levels}, {"mode", solenoid::to_string(mode)}, {"seed", seed}};
  if (!alphas.empty()) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : alphas) a.push_back(rational_matrix_to_json(x.matrix));
    j["alphas"] = a;
  }
  if (!ns.empty()) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& n : ns) a.push_back(solenoid::to_string(n));
    j["ns"] = a;
  }
  return j;
}

ResidueMap::ResidueMap(const RationalRep& alpha) : scaled_(alpha.m(), alpha.k()), den_(1) {
  for (std::size_t i = 0; i < alpha.m(); ++i)
    for (std::size_t j = 0; j < alpha.k(); ++j)
      mpz_lcm(den_.get_mpz_t(), den_.get_mpz_t(), alpha.matrix(i, j).get_den_mpz_t());
  for (std::size_t i = 0; i < alpha.m(); ++i)
    for (std::size_t j = 0; j < alpha.k(); ++j) scaled_(i, j) = Rat(alpha.matrix(i, j) * den_).get_num();
  den_d_ = den_.get_d();
}

std::vector<double> ResidueMap::fractions(const IntVector& w) const {
  std::vector<double> f(scaled_.rows());
  Int acc;
  for (std::size_t i = 0; i < scaled_.rows(); ++i) {
    acc = 0;
    for (std::size_t j = 0; j < scaled_.cols(); ++j) acc += scaled_(i, j) * w[j];
    mpz_fdiv_r(acc.get_mpz_t(), acc.get_mpz_t(), den_.get_mpz_t());
    f[i] = acc.get_d() / den_d_;
  }
  return f;
}

const LevelGeometry& SolenoidPlan::level(std::size_t l) const {
  if (l >= levels.size()) throw Error("plan level " + std::to_string(l) + " out of range");
  return levels[l];
}

Point choose_generic_point(std::size_t l, const Rat& eps_prev, std::size_t m, std::size_t q) {
  if (l == 0) throw Error("generic points start at level 1");
  if (eps_prev <= 0) throw Error("radius must be positive");
  if (m == 0 || (q != 2 * m && q != 2 * m + 1)) throw Error("q must be 2m or 2m+1 with m >= 1");
  Point z(q, 0.0);
  const double c = eps_prev.get_d() / 2 / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) z[2 * i] = c;
  return z;
}

double genericity_margin(const Point& z, const RationalRep& alpha) {
  const std::size_t m = alpha.m();
  const Int full = quotient(kernel_lattice(alpha)).order();
  if (full == 1) return std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    if (complex_modulus_squared(z, i) == 0) return 0;
  // subset S of coordinates is fixed by some nontrivial element iff ker(alpha|S) is strictly larger
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask + 1 < (std::uint64_t{1} << m); ++mask) {
    Int sub = 1;
    std::size_t rows = static_cast<std::size_t>(std::popcount(mask));
    if (rows > 0) {
      RatMatrix a(rows, alpha.k());
      std::size_t r = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (mask >> i & 1) {
          for (std::size_t j = 0; j < alpha.k(); ++j) a(r, j) = alpha.matrix(i, j);
          ++r;
        }
      sub = quotient(kernel_lattice(RationalRep{a})).order();
    }
    if (sub == full) continue;
    double s = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (!(mask >> i & 1)) s += complex_modulus_squared(z, i);
    best = std::min(best, std::sqrt(s));
  }
  return best;
}

double min_orbit_distance(const Point& z, const RationalRep& alpha) {
  FiniteQuotient g = quotient(kernel_lattice(alpha));
  const std::uint64_t order = checked_order(g);
  if (order == 1) throw Error("degenerate orbit: finite quotient is trivial");
  ResidueMap res(alpha);
  std::vector<double> weight(alpha.m());
  for (std::size_t i = 0; i < alpha.m(); ++i) weight[i] = 4 * complex_modulus_squared(z, i);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t idx = 1; idx < order; ++idx) {
    auto f = res.fractions(g.representative(idx));
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      double sn = std::sin(std::numbers::pi * std::min(f[i], 1 - f[i]));
      s += weight[i] * sn * sn;
    }
    best = std::min(best, s);
  }
  return std::sqrt(best);
}

Rat safe_radius(const Point& z, const RationalRep& alpha, const Rat& eps_prev) {
  const double eps = eps_prev.get_d();
  // strict margin against rounding in the trigonometric distance
  double half = 0.5 * min_orbit_distance(z, alpha) * (1 - 1e-9);
  double contain = eps * 2.0 / 3.0 - norm(z);
  double generic = 0.5 * genericity_margin(z, alpha);
  double cap = eps / 6.01;
  double r = std::min({half, contain, generic, cap});
  if (!(r > 0) || !std::isfinite(r)) throw Error("degenerate orbit: no admissible radius");
  return dyadic_floor(r);
}

Rat thin_budget(const SolenoidPlan& plan, std::size_t l) {
  if (l > plan.depth() || l >= plan.levels.size()) throw Error("thin_budget: level not built");
  const double inv = column_sum_norm(plan.chain.big_phi_inverse(l)).get_d();
  const double eps = plan.level(l).eps();
  const double delta = plan.delta.get_d();
  double best = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= plan.r; ++p) {
    double v = delta * std::pow(eps, p - 1) / (std::ldexp(1.0, static_cast<int>(l)) * plan.profile.cbound(p) * inv);
    best = std::min(best, v);
  }
  if (!(best > 1e-300)) throw Error("thinness budget underflows at level " + std::to_string(l + 1));
  return dyadic_floor(best);
}

RationalRep pick_representation(const Rat& delta, std::size_t k, std::size_t m, std::uint64_t seed) {
  if (delta <= 0) throw Error("pick_representation needs delta > 0");
  if (k == 0 || m == 0) throw Error("pick_representation needs k, m >= 1");
  Rat inv = 1 / delta;
  Int n = floor_div(inv.get_num(), inv.get_den()) + 1;
  if (n < 2) n = 2;
  if (seed != 0) n += static_cast<unsigned long>(splitmix64(seed) % 4);
  RatMatrix a(m, k);
  for (std::size_t j = 0; j < k; ++j) a(j % m, j) = Rat(Int(1), n + static_cast<unsigned long>(j));
  return RationalRep{a};
}

Rat max_column_norm_squared(const RationalRep& alpha) {
  Rat best = 0;
  for (std::size_t j = 0; j < alpha.k(); ++j) best = std::max(best, norm_squared(alpha.generator(j)));
  return best;
}

Point center_offset(const SolenoidPlan& plan, std::size_t l, const IntVector& gamma) {
  if (l == 0 || l > plan.depth()) throw Error("center: level out of range");
  RatVector b = plan.chain.beta(l, gamma);
  const Point& z = plan.level(l).z;
  Point out(plan.q, 0.0);
  for (std::size_t i = 0; i < plan.m; ++i) {
    Phase ph = exact_phase(b[i]);
    out[2 * i] = ph.re * z[2 * i] - ph.im * z[2 * i + 1];
    out[2 * i + 1] = ph.im * z[2 * i] + ph.re * z[2 * i + 1];
  }
  return out;
}

Point center(const SolenoidPlan& plan, std::size_t l, const IntVector& gamma) {
  if (l > plan.depth()) throw Error("center: level out of range");
  Point c(plan.q, 0.0);
  for (std::size_t i = 1; i <= l; ++i) {
    Point o = center_offset(plan, i, gamma);
    for (std::size_t d = 0; d < plan.q; ++d) c[d] += o[d];
  }
  return c;
}

namespace {

void check_thin(const RationalRep& alpha, const Rat& budget, std::size_t level) {
  for (std::size_t j = 0; j < alpha.k(); ++j) {
    Rat n2 = norm_squared(alpha.generator(j));
    if (n2 == 0 || n2 >= budget * budget) {
      std::ostringstream os;
      os << "level " << level << " generator " << j + 1 << " violates 0 < ||alpha(e_j)|| < delta_l: ||alpha(e_j)||^2 = "
         << to_string(n2) << " (~" << n2.get_d() << "), delta_l^2 = " << to_string(Rat(budget * budget)) << " (~"
         << Rat(budget * budget).get_d() << ")";
      throw Error(os.str());
    }
  }
}

}  // namespace

SolenoidPlan build(const PlanConfig& config) {
  SolenoidPlan plan;
  if (config.k < 1) throw Error("k must be >= 1");
  if (config.q < 2) throw Error("q must be >= 2");
  plan.k = config.k;
  plan.q = config.q;
  plan.m = config.q / 2;
  plan.r = config.r;
  if (config.r < 1 || config.r > plan.profile.parameters().r_max)
    throw Error("r must lie in [1, " + std::to_string(plan.profile.parameters().r_max) + "]");
  if (config.delta <= 0) throw Error("delta must be positive");
  plan.delta = config.delta;
  plan.mode = config.mode;
  plan.seed = config.seed;
  plan.budget_enforced = config.mode != PlanMode::Example5;
  plan.chain = LatticeChain(plan.k, plan.m);
  plan.levels.push_back(LevelGeometry{Point(plan.q, 0.0), Rat(1), config.delta});

  if (config.mode == PlanMode::Example5) {
    if (plan.k != 1 || plan.m != 1) throw Error("example5 preset requires k = 1 and q in {2, 3}");
    if (config.ns.size() < config.levels) throw Error("example5 preset needs one n per level");
  }
  if (config.mode == PlanMode::Explicit && config.alphas.size() < config.levels)
    throw Error("explicit mode needs one alpha per level");

  for (std::size_t l = 0; l < config.levels; ++l) {
    const Rat eps = plan.levels[l].epsilon;
    RationalRep alpha;
    Rat budget;
    Rat next_eps;
    if (config.mode == PlanMode::Example5) {
      const Int& n = config.ns[l];
      if (n < 2) throw Error("example5 preset needs every n >= 2");
      RatMatrix a(1, 1);
      a(0, 0) = Rat(Int(1), n);
      alpha = RationalRep{a};
      budget = 1;
      next_eps = eps / (4 * Rat(n));
    } else {
      budget = thin_budget(plan, l);
      alpha = config.mode == PlanMode::Explicit ? config.alphas[l]
                                                : pick_representation(budget, plan.k, plan.m, config.seed ? config.seed + l : 0);
      if (alpha.k() != plan.k || alpha.m() != plan.m) throw Error("alpha at level " + std::to_string(l + 1) + " has the wrong shape");
      check_thin(alpha, budget, l + 1);
    }
    plan.chain = extend_chain(plan.chain, alpha);
    checked_order(plan.chain.level(l + 1).group);
    Point z = choose_generic_point(l + 1, eps, plan.m, plan.q);
    if (config.mode != PlanMode::Example5) next_eps = safe_radius(z, alpha, eps);
    plan.levels.push_back(LevelGeometry{z, next_eps, budget});
  }
  return plan;
}

nlohmann::json SolenoidPlan::to_json() const {
  nlohmann::json geo = nlohmann::json::array();
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& g = levels[l];
    geo.push_back({{"level", l},
                   {"z", g.z},
                   {"epsilon", solenoid::to_string(g.epsilon)},
                   {"epsilon_inner", solenoid::to_string(Rat(g.epsilon * Rat(2, 3)))},
                   {"epsilon_outer", solenoid::to_string(Rat(g.epsilon * Rat(3, 4)))},
                   {"epsilon_approx", g.eps()},
                   {"delta", solenoid::to_string(g.delta)}});
  }
  return {{"format", "solenoid-plan"},
          {"version", 1},
          {"k", k},
          {"q", q},
          {"m", m},
          {"r", r},
          {"delta", solenoid::to_string(delta)},
          {"mode", solenoid::to_string(mode)},
          {"budget_enforced", budget_enforced},
          {"seed", seed},
          {"profile", profile.to_json()},
          {"chain", chain_to_json(chain)},
          {"geometry", geo}};
}

SolenoidPlan SolenoidPlan::from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != "solenoid-plan") throw Error("not a plan file (format field missing)");
    if (j.value("version", 0) != 1) throw Error("unsupported plan version");
    SolenoidPlan p;
    p.k = j.at("k").get<std::size_t>();
    p.q = j.at("q").get<std::size_t>();
    p.m = j.at("m").get<std::size_t>();
    if (p.m != p.q / 2 || p.m == 0) throw Error("plan has inconsistent q and m");
    p.r = j.at("r").get<int>();
    p.delta = parse_rational(j.at("delta").get<std::string>());
    p.mode = parse_mode(j.at("mode").get<std::string>());
    p.budget_enforced = j.at("budget_enforced").get<bool>();
    p.seed = j.value("seed", std::uint64_t{0});
    p.profile = BumpProfile::from_json(j.at("profile"));
    if (p.r < 1 || p.r > p.profile.parameters().r_max) throw Error("plan order r out of range");
    p.chain = chain_from_json(j.at("chain"));
    if (p.chain.k() != p.k || p.chain.m() != p.m) throw Error("chain shape does not match plan");
    const auto& geo = j.at("geometry");
    if (geo.size() != p.chain.size() + 1) throw Error("geometry must list levels 0..depth");
    for (const auto& g : geo) {
      LevelGeometry lg;
      lg.z = g.at("z").get<std::vector<double>>();
      lg.epsilon = parse_rational(g.at("epsilon").get<std::string>());
      lg.delta = parse_rational(g.at("delta").get<std::string>());
      if (lg.z.size() != p.q) throw Error("generic point has the wrong dimension");
      if (lg.epsilon <= 0) throw Error("radii must be positive");
      p.levels.push_back(lg);
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed plan: ") + e.what());
  }
}

}  // namespace solenoid
