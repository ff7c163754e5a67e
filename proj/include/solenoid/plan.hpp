#pragma once

// Inductive choice of generic points, radii and thinness budgets.

#include "solenoid/lattice.hpp"
#include "solenoid/profile.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace solenoid {

/// Largest finite group order the builder will enumerate.
constexpr std::uint64_t kMaxGroupOrder = 5'000'000;

enum class PlanMode { Explicit, Auto, Example5 };

std::string to_string(PlanMode mode);
PlanMode parse_mode(const std::string& s);

struct LevelGeometry {
  Point z;        // generic point (empty-norm zero vector at level 0)
  Rat epsilon;    // disk radius
  Rat delta;      // thinness budget used for alpha at this level
  double eps() const { return epsilon.get_d(); }
  double eps_inner() const { return Rat(epsilon * Rat(2, 3)).get_d(); }
  double eps_outer() const { return Rat(epsilon * Rat(3, 4)).get_d(); }
};

struct PlanConfig {
  std::size_t k = 1;
  std::size_t q = 2;
  int r = 1;
  Rat delta = Rat(1, 2);
  std::size_t levels = 1;
  PlanMode mode = PlanMode::Auto;
  std::vector<RationalRep> alphas;  // explicit mode
  std::vector<Int> ns;              // example5 mode
  std::uint64_t seed = 0;

  static PlanConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Fixed-point evaluation of alpha(w) mod Z^m over the common denominator.
class ResidueMap {
 public:
  explicit ResidueMap(const RationalRep& alpha);
  /// alpha(w)_i mod 1 as doubles in [0, 1).
  std::vector<double> fractions(const IntVector& w) const;
  const Int& denominator() const { return den_; }

 private:
  IntMatrix scaled_;
  Int den_;
  double den_d_;
};

struct SolenoidPlan {
  std::size_t k = 1;
  std::size_t q = 2;
  std::size_t m = 1;
  int r = 1;
  Rat delta = 1;
  PlanMode mode = PlanMode::Auto;
  bool budget_enforced = true;
  std::uint64_t seed = 0;
  BumpProfile profile = BumpProfile::standard();
  LatticeChain chain{1, 1};
  std::vector<LevelGeometry> levels;  // index 0..depth()

  std::size_t depth() const { return chain.size(); }
  const LevelGeometry& level(std::size_t l) const;

  nlohmann::json to_json() const;
  static SolenoidPlan from_json(const nlohmann::json& j);
};

Point choose_generic_point(std::size_t l, const Rat& eps_prev, std::size_t m, std::size_t q);

/// Distance from z to the nearest fixed subspace of a nontrivial element; +inf for trivial alpha.
double genericity_margin(const Point& z, const RationalRep& alpha);

/// min over nonzero cosets w of ||rho(w) z - z||.
double min_orbit_distance(const Point& z, const RationalRep& alpha);

Rat safe_radius(const Point& z, const RationalRep& alpha, const Rat& eps_prev);

/// Budget for alpha_{l+1} given levels 1..l of the plan.
Rat thin_budget(const SolenoidPlan& plan, std::size_t l);

RationalRep pick_representation(const Rat& delta, std::size_t k, std::size_t m, std::uint64_t seed);

/// Squared norm of the largest column of alpha, exactly.
Rat max_column_norm_squared(const RationalRep& alpha);

/// Center of the level-l disk for coset gamma (sum of rotated generic points).
Point center(const SolenoidPlan& plan, std::size_t l, const IntVector& gamma);
/// exp(2 pi i beta_l(gamma)) z_l, the offset of the level-l center from its parent's.
Point center_offset(const SolenoidPlan& plan, std::size_t l, const IntVector& gamma);

SolenoidPlan build(const PlanConfig& config);

}  // namespace solenoid
