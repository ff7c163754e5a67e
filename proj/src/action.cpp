#include "solenoid/action.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

namespace solenoid {

// Child-offset template of one level: rho_{l+1}(w) z_{l+1} for every w, bucketed on a grid.
struct DiskTree::Template {
  std::size_t q = 0;
  double radius = 0;
  double cell = 0;
  std::vector<double> points;  // order x q
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;

  std::uint64_t key(const std::vector<std::int64_t>& c) const {
    std::uint64_t h = 0x12345678abcdefULL;
    for (auto x : c) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
  std::vector<std::int64_t> cell_of(const double* p) const {
    std::vector<std::int64_t> c(q);
    for (std::size_t i = 0; i < q; ++i) c[i] = static_cast<std::int64_t>(std::floor(p[i] / cell));
    return c;
  }
};

DiskTree::DiskTree(const SolenoidPlan& plan)
    : plan_(plan), templates_(plan.depth()), template_once_(plan.depth()) {
  for (std::size_t s = 1; s <= plan.depth(); ++s) {
    const ChainLevel& lv = plan.chain.level(s);
    std::vector<std::pair<RotationVector, RotationVector>> gens;
    for (std::size_t j = 0; j < plan.k; ++j) {
      RatVector a = lv.alpha_prime.generator(j);
      RatVector neg = a;
      for (auto& x : neg) x = -x;
      gens.emplace_back(RotationVector::from_rational(a), RotationVector::from_rational(neg));
    }
    rotations_.push_back(std::move(gens));
    groups_.push_back(lv.group);
  }
}

DiskTree::~DiskTree() = default;

const RotationVector& DiskTree::rotation(std::size_t s, std::size_t j, int sign) const {
  if (s == 0 || s > rotations_.size() || j >= plan_.k) throw Error("generator index out of range");
  return sign >= 0 ? rotations_[s - 1][j].first : rotations_[s - 1][j].second;
}

DiskNode DiskTree::root() const { return DiskNode{0, IntVector(plan_.k), Point(plan_.q, 0.0), 1.0}; }

DiskNode DiskTree::node(std::size_t level, const IntVector& gamma) const {
  if (level > depth()) throw Error("disk level out of range");
  IntVector g = plan_.chain.coset(level, gamma);
  return DiskNode{level, g, center(plan_, level, g), plan_.level(level).eps()};
}

const DiskTree::Template& DiskTree::level_template(std::size_t l) const {
  std::call_once(template_once_[l], [&] {
    auto t = std::make_unique<Template>();
    const FiniteQuotient& g = groups_[l];
    const std::uint64_t order = g.order().get_ui();
    ResidueMap res(plan_.chain.level(l + 1).alpha);
    const Point& z = plan_.level(l + 1).z;
    t->q = plan_.q;
    t->radius = plan_.level(l + 1).eps();
    t->cell = 2 * t->radius;
    t->points.resize(order * t->q);
    for (std::uint64_t idx = 0; idx < order; ++idx) {
      auto f = res.fractions(g.representative(idx));
      double* p = &t->points[idx * t->q];
      for (std::size_t d = 0; d < t->q; ++d) p[d] = z[d];
      for (std::size_t i = 0; i < f.size(); ++i) {
        Phase ph = phase_of(f[i]);
        p[2 * i] = ph.re * z[2 * i] - ph.im * z[2 * i + 1];
        p[2 * i + 1] = ph.im * z[2 * i] + ph.re * z[2 * i + 1];
      }
      t->grid[t->key(t->cell_of(p))].push_back(static_cast<std::uint32_t>(idx));
    }
    templates_[l] = std::move(t);
  });
  return *templates_[l];
}

DiskNode DiskTree::make_child(const DiskNode& parent, std::uint64_t w_index) const {
  const std::size_t l = parent.level;
  IntVector w = groups_[l].representative(w_index);
  IntVector shift = plan_.chain.big_phi(l) * w;
  IntVector g = parent.gamma;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += shift[i];
  g = plan_.chain.coset(l + 1, g);
  Point off = center_offset(plan_, l + 1, g);
  Point c = parent.center;
  for (std::size_t d = 0; d < c.size(); ++d) c[d] += off[d];
  return DiskNode{l + 1, g, c, plan_.level(l + 1).eps()};
}

std::vector<DiskNode> DiskTree::children(const DiskNode& parent) const {
  std::vector<DiskNode> out;
  if (parent.level >= depth()) return out;
  const std::uint64_t order = groups_[parent.level].order().get_ui();
  out.reserve(order);
  for (std::uint64_t i = 0; i < order; ++i) out.push_back(make_child(parent, i));
  return out;
}

std::optional<DiskNode> DiskTree::child_containing(const DiskNode& parent, const Point& p) const {
  const std::size_t l = parent.level;
  if (l >= depth()) return std::nullopt;
  const Template& t = level_template(l);
  // undo the parent's cumulative rotation so the template applies
  RatVector b = plan_.chain.beta(l + 1, parent.gamma);
  Point d(plan_.q);
  for (std::size_t i = 0; i < plan_.q; ++i) d[i] = p[i] - parent.center[i];
  for (std::size_t i = 0; i < plan_.m; ++i) {
    Phase ph = exact_phase(-b[i]);
    const double x = d[2 * i], y = d[2 * i + 1];
    d[2 * i] = ph.re * x - ph.im * y;
    d[2 * i + 1] = ph.im * x + ph.re * y;
  }
  const double slack = t.radius * (1 + 1e-9);
  auto base = t.cell_of(d.data());
  std::vector<std::int64_t> c(t.q);
  const std::size_t combos = static_cast<std::size_t>(std::pow(3, t.q));
  std::set<std::uint32_t> tried;
  for (std::size_t n = 0; n < combos; ++n) {
    std::size_t code = n;
    for (std::size_t i = 0; i < t.q; ++i) {
      c[i] = base[i] + static_cast<std::int64_t>(code % 3) - 1;
      code /= 3;
    }
    auto it = t.grid.find(t.key(c));
    if (it == t.grid.end()) continue;
    for (std::uint32_t idx : it->second) {
      const double* tp = &t.points[static_cast<std::size_t>(idx) * t.q];
      double s = 0;
      for (std::size_t i = 0; i < t.q; ++i) s += (d[i] - tp[i]) * (d[i] - tp[i]);
      if (std::sqrt(s) > slack || !tried.insert(idx).second) continue;
      DiskNode child = make_child(parent, idx);
      double e = 0;
      for (std::size_t i = 0; i < plan_.q; ++i) e += (p[i] - child.center[i]) * (p[i] - child.center[i]);
      if (std::sqrt(e) <= child.radius) return child;
    }
  }
  return std::nullopt;
}

std::vector<DiskNode> DiskTree::descend(const Point& z, std::size_t max_level) const {
  if (z.size() != plan_.q) throw Error("point has the wrong dimension");
  std::vector<DiskNode> out;
  DiskNode cur = root();
  for (std::size_t l = 1; l <= std::min(max_level, depth()); ++l) {
    auto child = child_containing(cur, z);
    if (!child) break;
    out.push_back(*child);
    cur = *child;
  }
  return out;
}

std::vector<IntVector> DiskTree::locate(const Point& z, std::size_t max_level) const {
  std::vector<IntVector> out;
  for (auto& n : descend(z, max_level)) out.push_back(n.gamma);
  return out;
}

Point DiskTree::apply_in_frame(const DiskNode& node, const RotationVector& a, const Point& p) const {
  if (node.level == 0) return standard_model(plan_.profile, a, p);
  const std::size_t q = plan_.q;
  Point w(q);
  for (std::size_t i = 0; i < q; ++i) w[i] = (p[i] - node.center[i]) / node.radius;
  if (norm(w) >= BumpProfile::kOuter) return p;
  Point g = standard_model(plan_.profile, a, w);
  Point out(q);
  for (std::size_t i = 0; i < q; ++i) out[i] = node.center[i] + node.radius * g[i];
  return out;
}

Point DiskTree::stage(std::size_t s, std::size_t j, int sign, const Point& z) const {
  if (s == 0 || s > depth()) throw Error("stage index out of range");
  if (z.size() != plan_.q) throw Error("point has the wrong dimension");
  if (s == 1) return apply_in_frame(root(), rotation(1, j, sign), z);
  auto nodes = descend(z, s - 1);
  if (nodes.size() < s - 1) return z;
  return apply_in_frame(nodes.back(), rotation(s, j, sign), z);
}

Point DiskTree::eval_generator(std::size_t L, std::size_t j, const Point& z, int sign) const {
  if (L > depth()) throw Error("evaluation depth exceeds plan depth");
  if (j >= plan_.k) throw Error("generator index out of range");
  if (z.size() != plan_.q) throw Error("point has the wrong dimension");
  Point p = z;
  DiskNode cur = root();
  for (std::size_t s = 1; s <= L; ++s) {
    p = apply_in_frame(cur, rotation(s, j, sign), p);
    if (s == L) break;
    auto child = child_containing(cur, p);
    if (!child) break;
    cur = *child;
  }
  return p;
}

Point DiskTree::eval_element(std::size_t L, const IntVector& g, const Point& z) const {
  if (g.size() != plan_.k) throw Error("group element has the wrong rank");
  Point p = z;
  for (std::size_t j = 0; j < plan_.k; ++j) {
    const int sign = g[j] < 0 ? -1 : 1;
    Int n = abs(g[j]);
    for (Int t = 0; t < n; ++t) p = eval_generator(L, j, p, sign);
  }
  return p;
}

DiskNode DiskTree::image_node(const DiskNode& n, std::size_t j, int sign) const {
  if (j >= plan_.k) throw Error("generator index out of range");
  IntVector g = n.gamma;
  g[j] += sign >= 0 ? 1 : -1;
  return node(n.level, g);
}

Point DiskTree::eval_generator_framed(std::size_t L, std::size_t j, const DiskNode& n, const Point& w, int sign,
                                     const DiskNode& image) const {
  const std::size_t d = n.level;
  if (L < d || L > depth()) throw Error("framed evaluation needs node level <= L <= depth");
  if (j >= plan_.k) throw Error("generator index out of range");
  if (w.size() != plan_.q) throw Error("point has the wrong dimension");
  const std::size_t q = plan_.q;
  Point p = w;
  if (d > 0) {
    // stages 1..d act on n as one rigid motion onto image, linear part beta_d(e_j)
    IntVector e(plan_.k);
    e[j] = sign >= 0 ? 1 : -1;
    p = torus_rotation(RotationVector::from_rational(plan_.chain.beta(d, e)), p);
  }
  DiskNode cur = image;
  Point acc(q, 0.0);
  for (std::size_t s = d + 1; s <= L; ++s) {
    p = standard_model(plan_.profile, rotation(s, j, sign), p);
    if (s == L) break;
    Point global(q);
    for (std::size_t i = 0; i < q; ++i) global[i] = cur.center[i] + cur.radius * p[i];
    auto child = child_containing(cur, global);
    if (!child) break;
    Point off = center_offset(plan_, child->level, child->gamma);
    for (std::size_t i = 0; i < q; ++i) {
      p[i] = (cur.radius * p[i] - off[i]) / child->radius;
      acc[i] += off[i];
    }
    cur = *child;
  }
  Point out(q);
  for (std::size_t i = 0; i < q; ++i) out[i] = (acc[i] + cur.radius * p[i]) / image.radius;
  return out;
}

Point DiskTree::stage_framed(std::size_t j, int sign, const DiskNode& n, const Point& w) const {
  if (w.size() != plan_.q) throw Error("point has the wrong dimension");
  return standard_model(plan_.profile, rotation(n.level + 1, j, sign), w);
}

Point DiskTree::stage_framed_displacement(std::size_t j, int sign, const DiskNode& n, const Point& w) const {
  if (w.size() != plan_.q) throw Error("point has the wrong dimension");
  return standard_model_displacement(plan_.profile, rotation(n.level + 1, j, sign), w);
}

bool DiskTree::in_U_level(std::size_t l, const Point& z) const {
  if (l > depth()) throw Error("level out of range");
  DiskNode n = root();
  if (l > 0) {
    auto nodes = descend(z, l);
    if (nodes.size() < l) return false;
    n = nodes.back();
  }
  double s = 0;
  for (std::size_t i = 0; i < plan_.q; ++i) s += (z[i] - n.center[i]) * (z[i] - n.center[i]);
  return std::sqrt(s) < n.radius / 6;
}

std::vector<std::pair<IntVector, Point>> DiskTree::orbit_sample(std::size_t L, const Point& z, int R,
                                                              std::size_t cap) const {
  if (R < 0) throw Error("word radius must be non-negative");
  const std::size_t k = plan_.k;
  double count = std::pow(2.0 * R + 1, static_cast<double>(k));
  if (count > static_cast<double>(cap)) throw Error("orbit sample size exceeds cap");
  std::vector<std::pair<IntVector, Point>> out;
  std::set<Point> seen;
  std::vector<long> w(k, -R);
  for (;;) {
    IntVector g(w.begin(), w.end());
    Point p = eval_element(L, g, z);
    for (auto& x : p) x += 0.0;
    if (seen.insert(p).second) out.emplace_back(g, p);
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (++w[i] <= R) break;
      w[i] = -R;
      if (i == 0) return out;
    }
    if (k == 0) return out;
  }
}

std::vector<CantorDisk> DiskTree::cantor_approx(std::size_t L, std::size_t cap) const {
  if (L > depth()) throw Error("level out of range");
  if (plan_.chain.gamma_index(L) > Int(static_cast<unsigned long>(cap))) throw Error("disk count exceeds cap");
  std::vector<DiskNode> cur{root()};
  for (std::size_t l = 0; l < L; ++l) {
    std::vector<DiskNode> next;
    for (const auto& n : cur) {
      auto ch = children(n);
      next.insert(next.end(), ch.begin(), ch.end());
    }
    cur = std::move(next);
  }
  std::vector<CantorDisk> out;
  for (auto& n : cur) out.push_back({n.gamma, n.center, n.radius});
  return out;
}

nlohmann::json DiskTree::export_tree(std::size_t max_level, std::size_t cap) const {
  max_level = std::min(max_level, depth());
  Int total = 0;
  for (std::size_t l = 0; l <= max_level; ++l) total += plan_.chain.gamma_index(l);
  if (total > Int(static_cast<unsigned long>(cap))) throw Error("tree export exceeds node cap");
  auto rec = [&](auto&& self, const DiskNode& n) -> nlohmann::json {
    nlohmann::json coset = nlohmann::json::array();
    for (auto& x : n.gamma) coset.push_back(to_string(x));
    nlohmann::json j{{"level", n.level},
                     {"coset", coset},
                     {"center", n.center},
                     {"radius", to_string(plan_.level(n.level).epsilon)},
                     {"children", nlohmann::json::array()}};
    if (n.level < max_level)
      for (const auto& c : children(n)) j["children"].push_back(self(self, c));
    return j;
  };
  return rec(rec, root());
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);
  return buf;
}

std::string orbit_csv(const std::vector<std::pair<IntVector, Point>>& orbit, std::size_t k, std::size_t q) {
  std::ostringstream os;
  for (std::size_t j = 0; j < k; ++j) os << (j ? "," : "") << "g" << j + 1;
  for (std::size_t i = 0; i < q; ++i) os << ",x" << i + 1;
  os << "\n";
  for (const auto& [g, p] : orbit) {
    for (std::size_t j = 0; j < k; ++j) os << (j ? "," : "") << to_string(g[j]);
    for (double x : p) os << "," << format_double(x);
    os << "\n";
  }
  return os.str();
}

}  // namespace solenoid
