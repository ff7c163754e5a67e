#pragma once

// Lazy tree of nested disks and pointwise evaluation of the holonomy generators.

#include "solenoid/plan.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace solenoid {

struct DiskNode {
  std::size_t level = 0;
  IntVector gamma;  // canonical label in Z^k / Gamma_level
  Point center;
  double radius = 1;
};

struct CantorDisk {
  IntVector gamma;
  Point center;
  double radius;
};

class DiskTree {
 public:
  /// The plan must outlive the tree.
  explicit DiskTree(const SolenoidPlan& plan);
  ~DiskTree();
  DiskTree(const DiskTree&) = delete;
  DiskTree& operator=(const DiskTree&) = delete;

  const SolenoidPlan& plan() const { return plan_; }
  std::size_t depth() const { return plan_.depth(); }

  DiskNode root() const;
  DiskNode node(std::size_t level, const IntVector& gamma) const;
  /// All order(G_{l+1}) children of a level-l node.
  std::vector<DiskNode> children(const DiskNode& parent) const;
  /// Child disk containing p, if any.
  std::optional<DiskNode> child_containing(const DiskNode& parent, const Point& p) const;

  /// Nodes of levels 1..d containing z, d <= max_level.
  std::vector<DiskNode> descend(const Point& z, std::size_t max_level) const;
  std::vector<IntVector> locate(const Point& z, std::size_t max_level) const;

  /// Stage s alone: identity off the level-(s-1) disks, else conjugated g with rotation sign * alpha'_s(e_j).
  Point stage(std::size_t s, std::size_t j, int sign, const Point& z) const;
  Point hat_h(std::size_t level, std::size_t j, const Point& z) const { return stage(level, j, 1, z); }

  /// h_{L,j} (sign -1 gives its inverse).
  Point eval_generator(std::size_t L, std::size_t j, const Point& z, int sign = 1) const;
  Point eval_element(std::size_t L, const IntVector& g, const Point& z) const;

  /// Level-d node labelled gamma + sign * e_j: where the first d stages carry the disk n.
  DiskNode image_node(const DiskNode& n, std::size_t j, int sign = 1) const;
  /// h_{L,j}(n.center + n.radius * w) for L >= n.level, returned in the frame of image_node(n, j, sign).
  /// Keeps frame-relative precision, which global coordinates lose at small radii.
  Point eval_generator_framed(std::size_t L, std::size_t j, const DiskNode& n, const Point& w, int sign,
                              const DiskNode& image) const;
  /// Stage n.level + 1 in the frame of n (its exact conjugate, no round trip through global coordinates).
  Point stage_framed(std::size_t j, int sign, const DiskNode& n, const Point& w) const;
  /// stage_framed(...) - w, computed without cancellation.
  Point stage_framed_displacement(std::size_t j, int sign, const DiskNode& n, const Point& w) const;

  bool in_U_level(std::size_t l, const Point& z) const;

  /// Distinct orbit points over the word box |g|_inf <= R, first word in lexicographic order kept.
  std::vector<std::pair<IntVector, Point>> orbit_sample(std::size_t L, const Point& z, int R,
                                                       std::size_t cap = 100000) const;

  std::vector<CantorDisk> cantor_approx(std::size_t L, std::size_t cap = 1000000) const;

  /// Nested {level, coset, center, radius, children} down to max_level.
  nlohmann::json export_tree(std::size_t max_level, std::size_t cap = 100000) const;

  const RotationVector& rotation(std::size_t s, std::size_t j, int sign) const;

 private:
  struct Template;
  const Template& level_template(std::size_t l) const;
  DiskNode make_child(const DiskNode& parent, std::uint64_t w_index) const;
  Point apply_in_frame(const DiskNode& node, const RotationVector& a, const Point& p) const;

  const SolenoidPlan& plan_;
  std::vector<std::vector<std::pair<RotationVector, RotationVector>>> rotations_;  // [s-1][j] = (+, -)
  std::vector<FiniteQuotient> groups_;                                             // G_1..G_L
  mutable std::vector<std::unique_ptr<Template>> templates_;
  mutable std::vector<std::once_flag> template_once_;
};

/// Orbit CSV: header g1..gk,x1..xq then one row per point, 17 significant digits.
std::string orbit_csv(const std::vector<std::pair<IntVector, Point>>& orbit, std::size_t k, std::size_t q);

std::string format_double(double x);

}  // namespace solenoid
