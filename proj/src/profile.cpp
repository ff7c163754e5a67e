#include "solenoid/profile.hpp"

#include "solenoid/jet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace solenoid {

namespace {

using RealJet = Jet<double, kMaxOrder>;
using ComplexJet = Jet<std::complex<double>, kMaxOrder>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// exp(-1/x) and all its derivatives are below 1e-80 here
constexpr double kSigmaCutoff = 0.005;

RealJet sigma(const RealJet& x) {
  if (x.c[0] < kSigmaCutoff) return RealJet{};
  return exp(-(RealJet::constant(1.0) / x));
}

RealJet mu_jet(double t) {
  if (t <= BumpProfile::kInner) return RealJet::constant(1.0);
  if (t >= BumpProfile::kOuter) return RealJet::constant(0.0);
  // x = (3/4 - t) / (1/12)
  RealJet x;
  x.c[0] = 12.0 * (BumpProfile::kOuter - t);
  x.c[1] = -12.0;
  RealJet a = sigma(x);
  RealJet b = sigma(RealJet::constant(1.0) - x);
  return a / (a + b);
}

// Partial Bell polynomials B_{j,k} evaluated at derivative bounds tau_1..tau_4.
double bell(int j, int k, const std::array<double, 5>& tau) {
  const double t1 = tau[1], t2 = tau[2], t3 = tau[3], t4 = tau[4];
  switch (j * 10 + k) {
    case 11: return t1;
    case 21: return t2;
    case 22: return t1 * t1;
    case 31: return t3;
    case 32: return 3 * t1 * t2;
    case 33: return t1 * t1 * t1;
    case 41: return t4;
    case 42: return 4 * t1 * t3 + 3 * t2 * t2;
    case 43: return 6 * t1 * t1 * t2;
    case 44: return t1 * t1 * t1 * t1;
    default: return 0;
  }
}

}  // namespace

BumpProfile::BumpProfile(ProfileParameters params) : params_(params) {
  if (params_.r_max < 1 || params_.r_max > kMaxOrder) throw Error("profile r_max must lie in [1, 4]");
  if (!(params_.grid_step > 0) || !(params_.safety >= 1) || params_.s_samples < 1)
    throw Error("invalid profile sampling parameters");

  // Majorant of |D^p (psi_s(|x|) z_i)| / s where psi_s = exp(2 pi i s mu) - 1,
  // using |D^n |x|| <= tau_n and Faa di Bruno.
  std::array<double, kMaxOrder + 1> worst{};
  double kappa = 0;
  const long steps = std::lround((kOuter - kInner) / params_.grid_step);
  for (long i = 0; i <= steps; ++i) {
    const double t = std::min(kOuter, kInner + static_cast<double>(i) * params_.grid_step);
    RealJet m = mu_jet(t);
    kappa = std::max(kappa, std::abs(m.derivative(1)));
    const std::array<double, 5> tau{0, 1, 1 / t, 3 / (t * t), 15 / (t * t * t)};
    for (int si = 1; si <= params_.s_samples; ++si) {
      const double s = static_cast<double>(si) / params_.s_samples;
      ComplexJet w;
      for (int n = 0; n <= kMaxOrder; ++n) w.c[n] = std::complex<double>(0, kTwoPi * s * m.c[n]);
      ComplexJet e = exp(w);
      std::array<double, kMaxOrder + 1> dpsi{};
      dpsi[0] = std::abs(e.c[0] - 1.0);
      for (int n = 1; n <= kMaxOrder; ++n) dpsi[n] = std::abs(e.derivative(n));
      std::array<double, kMaxOrder + 1> big_m{};
      big_m[0] = dpsi[0];
      for (int j = 1; j <= kMaxOrder; ++j)
        for (int k = 1; k <= j; ++k) big_m[j] += dpsi[k] * bell(j, k, tau);
      for (int p = 1; p <= kMaxOrder; ++p) {
        double b = big_m[p] * t + p * big_m[p - 1];
        worst[p] = std::max(worst[p], b / s);
      }
    }
  }
  kappa1_ = kappa * params_.safety;
  for (int p = 1; p <= kMaxOrder; ++p) cbound_[p] = worst[p] * params_.safety;
  // inner plateau contributes |exp(2 pi i s) - 1| / s <= 2 pi to order 1
  cbound_[1] = std::max(cbound_[1], 1 + kTwoPi * kappa1_);
  for (int p = 2; p <= kMaxOrder; ++p) cbound_[p] = std::max(cbound_[p], cbound_[p - 1]);
}

const BumpProfile& BumpProfile::standard() {
  static const BumpProfile profile;
  return profile;
}

double BumpProfile::mu(double t) const {
  if (t < 0 || std::isnan(t)) throw Error("mu: negative argument");
  return mu_jet(t).c[0];
}

double BumpProfile::deriv(double t, int p) const {
  if (p < 1 || p > kMaxOrder) throw Error("mu derivative order beyond supported maximum");
  if (t < 0 || std::isnan(t)) throw Error("mu: negative argument");
  return mu_jet(t).derivative(p);
}

std::array<double, kMaxOrder + 1> BumpProfile::derivatives(double t) const {
  if (t < 0 || std::isnan(t)) throw Error("mu: negative argument");
  RealJet m = mu_jet(t);
  std::array<double, kMaxOrder + 1> d{};
  for (int n = 0; n <= kMaxOrder; ++n) d[n] = m.derivative(n);
  return d;
}

double BumpProfile::cbound(int p) const {
  if (p < 1 || p > params_.r_max) throw Error("derivative bound requested beyond supported order " + std::to_string(params_.r_max));
  return cbound_[p];
}

nlohmann::json BumpProfile::to_json() const {
  nlohmann::json cb = nlohmann::json::array();
  for (int p = 1; p <= params_.r_max; ++p) cb.push_back(cbound_[p]);
  return {{"family", "logistic-smooth-step"},
          {"inner", "2/3"},
          {"outer", "3/4"},
          {"safety", params_.safety},
          {"grid_step", params_.grid_step},
          {"r_max", params_.r_max},
          {"s_samples", params_.s_samples},
          {"kappa1", kappa1_},
          {"cbounds", cb}};
}

BumpProfile BumpProfile::from_json(const nlohmann::json& j) {
  if (j.value("inner", "2/3") != "2/3" || j.value("outer", "3/4") != "3/4")
    throw Error("only the plateau edges 2/3 and 3/4 are supported");
  ProfileParameters p;
  p.safety = j.value("safety", p.safety);
  p.grid_step = j.value("grid_step", p.grid_step);
  p.r_max = j.value("r_max", p.r_max);
  p.s_samples = j.value("s_samples", p.s_samples);
  ProfileParameters d;
  if (p.safety == d.safety && p.grid_step == d.grid_step && p.r_max == d.r_max && p.s_samples == d.s_samples)
    return standard();
  return BumpProfile(p);
}

Phase exact_phase(const Rat& turns) {
  Rat f = frac(turns);
  if (f == 0) return {1, 0};
  if (f == Rat(1, 4)) return {0, 1};
  if (f == Rat(1, 2)) return {-1, 0};
  if (f == Rat(3, 4)) return {0, -1};
  double g = f.get_d();
  if (g > 0.5) g -= 1;
  return {std::cos(kTwoPi * g), std::sin(kTwoPi * g)};
}

Phase phase_of(double turns) {
  double f = turns - std::floor(turns);
  if (f == 0) return {1, 0};
  if (f == 0.25) return {0, 1};
  if (f == 0.5) return {-1, 0};
  if (f == 0.75) return {0, -1};
  if (f > 0.5) f -= 1;
  return {std::cos(kTwoPi * f), std::sin(kTwoPi * f)};
}

RotationVector RotationVector::from_rational(const RatVector& a) {
  RotationVector r;
  for (const auto& x : a) {
    r.value.push_back(x.get_d());
    r.phase.push_back(exact_phase(x));
  }
  return r;
}

RotationVector RotationVector::from_double(const std::vector<double>& a) {
  RotationVector r;
  r.value = a;
  for (double x : a) r.phase.push_back(phase_of(x));
  return r;
}

double RotationVector::norm() const {
  double s = 0;
  for (double x : value) s += x * x;
  return std::sqrt(s);
}

double norm(const Point& p) {
  double s = 0;
  for (double x : p) s += x * x;
  return std::sqrt(s);
}

namespace {

void check_shape(const RotationVector& a, const Point& z) {
  if (z.size() != 2 * a.m() && z.size() != 2 * a.m() + 1)
    throw Error("point dimension does not match rotation vector (need q = 2m or 2m+1)");
}

std::vector<Phase> scaled_phases(const RotationVector& a, double scale) {
  std::vector<Phase> ph(a.m());
  for (std::size_t i = 0; i < a.m(); ++i) {
    const double th = kTwoPi * scale * a.value[i];
    ph[i] = {std::cos(th), std::sin(th)};
  }
  return ph;
}

Point rotate(const std::vector<Phase>& ph, const Point& z) {
  Point out = z;
  for (std::size_t i = 0; i < ph.size(); ++i) {
    const double x = z[2 * i], y = z[2 * i + 1];
    out[2 * i] = ph[i].re * x - ph[i].im * y;
    out[2 * i + 1] = ph[i].im * x + ph[i].re * y;
  }
  return out;
}

RealMatrix rotation_matrix(const std::vector<Phase>& ph, std::size_t q) {
  RealMatrix r(q, std::vector<double>(q, 0.0));
  for (std::size_t i = 0; i < q; ++i) r[i][i] = 1;
  for (std::size_t i = 0; i < ph.size(); ++i) {
    r[2 * i][2 * i] = ph[i].re;
    r[2 * i][2 * i + 1] = -ph[i].im;
    r[2 * i + 1][2 * i] = ph[i].im;
    r[2 * i + 1][2 * i + 1] = ph[i].re;
  }
  return r;
}

}  // namespace

Point torus_rotation(const RotationVector& a, const Point& z) {
  check_shape(a, z);
  return rotate(a.phase, z);
}

Point standard_model(const BumpProfile& profile, const RotationVector& a, const Point& z) {
  check_shape(a, z);
  const double t = norm(z);
  if (t >= BumpProfile::kOuter) return z;
  if (t <= BumpProfile::kInner) return rotate(a.phase, z);
  return rotate(scaled_phases(a, profile.mu(t)), z);
}

Point standard_model_displacement(const BumpProfile& profile, const RotationVector& a, const Point& z) {
  check_shape(a, z);
  Point out(z.size(), 0.0);
  const double t = norm(z);
  if (t >= BumpProfile::kOuter) return out;
  const double scale = t <= BumpProfile::kInner ? 1.0 : profile.mu(t);
  for (std::size_t i = 0; i < a.m(); ++i) {
    const double th = kTwoPi * scale * a.value[i];
    const double h = std::sin(th / 2);
    const double cm1 = -2 * h * h;  // cos(th) - 1 without cancellation
    const double sn = std::sin(th);
    const double x = z[2 * i], y = z[2 * i + 1];
    out[2 * i] = cm1 * x - sn * y;
    out[2 * i + 1] = sn * x + cm1 * y;
  }
  return out;
}

RealMatrix standard_model_jacobian(const BumpProfile& profile, const RotationVector& a, const Point& z) {
  check_shape(a, z);
  const std::size_t q = z.size();
  const double t = norm(z);
  if (t >= BumpProfile::kOuter) return rotation_matrix({}, q);
  if (t <= BumpProfile::kInner) return rotation_matrix(a.phase, q);
  auto d = profile.derivatives(t);
  auto ph = scaled_phases(a, d[0]);
  RealMatrix jac = rotation_matrix(ph, q);
  Point w = rotate(ph, z);
  // J = R + u v^T with v = z / t, u = d/dt of the rotated point
  for (std::size_t i = 0; i < a.m(); ++i) {
    const double f = kTwoPi * d[1] * a.value[i];
    const double ux = -f * w[2 * i + 1];
    const double uy = f * w[2 * i];
    for (std::size_t c = 0; c < q; ++c) {
      const double v = z[c] / t;
      jac[2 * i][c] += ux * v;
      jac[2 * i + 1][c] += uy * v;
    }
  }
  return jac;
}

double determinant(const RealMatrix& input) {
  RealMatrix a = input;
  const std::size_t n = a.size();
  double det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (a[p][c] == 0) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

}  // namespace solenoid
