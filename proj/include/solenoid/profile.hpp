#pragma once

// Smooth radial cutoff, torus rotations and the radial twist map g_a.

#include "solenoid/arith.hpp"

#include <json.hpp>

#include <array>
#include <vector>

namespace solenoid {

using Point = std::vector<double>;
using RealMatrix = std::vector<std::vector<double>>;

constexpr int kMaxOrder = 4;

struct ProfileParameters {
  double safety = 1.05;
  double grid_step = 1e-5;
  int r_max = kMaxOrder;
  int s_samples = 64;  // rotation magnitudes sampled in (0, 1]
};

/// mu = 1 on [0, 2/3], 0 on [3/4, inf), non-increasing, C^infinity.
class BumpProfile {
 public:
  static constexpr double kInner = 2.0 / 3.0;
  static constexpr double kOuter = 3.0 / 4.0;

  explicit BumpProfile(ProfileParameters params = {});

  /// Shared instance with default parameters.
  static const BumpProfile& standard();

  double mu(double t) const;
  /// p-th derivative, 1 <= p <= r_max.
  double deriv(double t, int p) const;
  /// mu and its derivatives 0..kMaxOrder at t.
  std::array<double, kMaxOrder + 1> derivatives(double t) const;

  double kappa1() const { return kappa1_; }
  /// Certified constant for order p (monotone in p).
  double cbound(int p) const;
  /// Exact rational value of cbound(p).
  Rat cbound_exact(int p) const { return exact_rational(cbound(p)); }

  const ProfileParameters& parameters() const { return params_; }
  nlohmann::json to_json() const;
  static BumpProfile from_json(const nlohmann::json& j);

 private:
  ProfileParameters params_;
  double kappa1_ = 0;
  std::array<double, kMaxOrder + 1> cbound_{};
};

/// Unit complex number for a rotation angle measured in full turns.
struct Phase {
  double re = 1;
  double im = 0;
};

/// Phase of an exact angle; reduced mod 1 first, quarter turns are exact.
Phase exact_phase(const Rat& turns);
Phase phase_of(double turns);

/// Rotation angles per complex coordinate, kept exact alongside their phases.
struct RotationVector {
  std::vector<double> value;
  std::vector<Phase> phase;

  static RotationVector from_rational(const RatVector& a);
  static RotationVector from_double(const std::vector<double>& a);
  std::size_t m() const { return value.size(); }
  double norm() const;
};

double norm(const Point& p);

/// Coordinate-wise multiplication by exp(2 pi i a_j); an odd trailing real coordinate is fixed.
Point torus_rotation(const RotationVector& a, const Point& z);

/// Rotation by exp(2 pi i mu(|z|) a); exact identity for |z| >= 3/4.
Point standard_model(const BumpProfile& profile, const RotationVector& a, const Point& z);

/// standard_model(a, z) - z, accurate relative to its own size even for tiny rotations.
Point standard_model_displacement(const BumpProfile& profile, const RotationVector& a, const Point& z);

/// Analytic Jacobian (rows = output coordinates).
RealMatrix standard_model_jacobian(const BumpProfile& profile, const RotationVector& a, const Point& z);

double determinant(const RealMatrix& m);

}  // namespace solenoid
