#pragma once

// Numerical certification of the derivative estimates and of the action's structural
// properties. Every check is reproducible from (plan, seed).

#include "solenoid/action.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace solenoid {

struct CheckResult {
  std::string name;
  std::size_t level = 0;  // stage s for derivative checks (the map acting on level s-1 disks)
  int generator = -1;     // -1 when not tied to one generator
  int order = 0;
  double measured = 0;
  double bound = 0;
  double tolerance = 0;
  bool pass = true;
  bool asserted = true;  // reported-only checks never fail a run
  std::string note;

  nlohmann::json to_json() const;
};

struct CertificationReport {
  std::uint64_t seed = 0;
  int r = 1;
  double tolerance_scale = 1;
  std::vector<CheckResult> checks;

  /// All asserted checks pass.
  bool passed() const;
  const CheckResult* find(const std::string& name, std::size_t level, int generator = -1, int order = -1) const;
  void append(const std::vector<CheckResult>& more) { checks.insert(checks.end(), more.begin(), more.end()); }
  nlohmann::json to_json() const;
};

struct CertifyOptions {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  double tolerance_scale = 1;
  std::size_t c1_points = 10000;
  std::size_t cp_points = 2000;
  std::size_t volume_points = 1000;
  std::size_t invariance_points = 1000;
  std::size_t commutativity_points = 1000;
  std::size_t coset_samples = 100;
  std::size_t u_points = 100;
  std::size_t distality_pairs = 50;
  int distality_radius = 6;
  double fd_step = 1e-4;      // derivative probes, frame units (so 1e-4 * eps globally)
  double volume_step = 1e-5;  // Jacobian probes, frame units
  std::uint64_t max_word_work = 2'000'000;  // generator applications allowed per periodicity check
  std::uint64_t max_bfs_order = 200'000;    // largest quotient walked by the transitivity check
};

/// Which part of the frame ball is sampled.
struct Grid {
  std::size_t count = 10000;
  std::uint64_t seed = 0;
  double r_min = 0;
  double r_max = 0.999;
};

using PointMap = std::function<Point(const Point&)>;

/// Nested fourth-order central differences along the given directions (one per derivative order).
Point finite_diff(const PointMap& f, const Point& z, const std::vector<Point>& directions, double step,
                  double domain_radius = std::numeric_limits<double>::infinity());
/// Same, along coordinate axes i_1 <= ... <= i_p.
Point finite_diff(const PointMap& f, const Point& z, const std::vector<std::size_t>& multi_index, double step,
                  double domain_radius = std::numeric_limits<double>::infinity());

/// All non-decreasing multi-indices of length p over q axes.
std::vector<std::vector<std::size_t>> multi_indices(std::size_t q, int p);

/// Uniform C^1 deviation of hat h_{l+1}(e_j) from the identity against (1 + 2 pi kappa_1) ||alpha'_{l+1}(e_j)||.
CheckResult c1_check(const DiskTree& tree, std::size_t l, std::size_t j, const Grid& grid, const CertifyOptions& opts = {});

/// Order-p deviation against C_p eps_l^{1-p} ||alpha'_{l+1}(e_j)||, plus the vanishing of derivatives
/// along two or more distinct directions orthogonal to the radius.
std::vector<CheckResult> cp_check(const DiskTree& tree, std::size_t l, std::size_t j, int p, const Grid& grid,
                                  const CertifyOptions& opts = {});

/// Exact budget inequality per level, generator and order p <= r; `measured` derivative checks
/// (c1/cp results) are additionally compared with delta 2^{-l}.
std::vector<CheckResult> cauchy_check(const SolenoidPlan& plan, int r, const std::vector<CheckResult>& measured = {},
                                      const CertifyOptions& opts = {});

/// Nesting, disjointness, shrinkage, exclusion and thinness of the stored plan.
std::vector<CheckResult> plan_invariants(const SolenoidPlan& plan, const CertifyOptions& opts = {});

/// Structural properties of the action plus the reported distality probe.
std::vector<CheckResult> property_suite(const DiskTree& tree, const CertifyOptions& opts = {});

/// Plan invariants, derivative checks up to order r, the budget check and the property suite.
CertificationReport certify(const SolenoidPlan& plan, int r, const CertifyOptions& opts = {});

}  // namespace solenoid
