#include "solenoid/lattice.hpp"

#include <algorithm>
#include <limits>

namespace solenoid {

RatVector RationalRep::apply(const IntVector& v) const {
  if (v.size() != k()) throw Error("representation applied to a vector of the wrong rank");
  RatVector out(m());
  for (std::size_t i = 0; i < m(); ++i)
    for (std::size_t j = 0; j < k(); ++j) out[i] += matrix(i, j) * v[j];
  return out;
}

bool RationalRep::is_zero() const {
  for (std::size_t i = 0; i < m(); ++i)
    for (std::size_t j = 0; j < k(); ++j)
      if (matrix(i, j) != 0) return false;
  return true;
}

namespace {

void add_row_multiple(IntMatrix& a, std::size_t dst, std::size_t src, const Int& f) {
  if (f == 0) return;
  for (std::size_t j = 0; j < a.cols(); ++j) a(dst, j) += f * a(src, j);
}

void add_column_multiple(IntMatrix& a, std::size_t dst, std::size_t src, const Int& f) {
  if (f == 0) return;
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, dst) += f * a(i, src);
}

void negate_row(IntMatrix& a, std::size_t r) {
  for (std::size_t j = 0; j < a.cols(); ++j) a(r, j) = -a(r, j);
}

void negate_column(IntMatrix& a, std::size_t c) {
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, c) = -a(i, c);
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  IntMatrix a = m;
  IntMatrix u = IntMatrix::identity(rows);
  IntMatrix v = IntMatrix::identity(cols);

  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    for (;;) {
      // smallest nonzero entry of the trailing block becomes the pivot
      std::size_t pi = rows, pj = cols;
      Int best;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j) {
          if (a(i, j) == 0) continue;
          Int mag = abs(a(i, j));
          if (pi == rows || mag < best) {
            best = mag;
            pi = i;
            pj = j;
          }
        }
      if (pi == rows) break;
      a.swap_rows(t, pi);
      u.swap_rows(t, pi);
      a.swap_columns(t, pj);
      v.swap_columns(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        Int q = floor_div(a(i, t), a(t, t));
        add_row_multiple(a, i, t, -q);
        add_row_multiple(u, i, t, -q);
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        Int q = floor_div(a(t, j), a(t, t));
        add_column_multiple(a, j, t, -q);
        add_column_multiple(v, j, t, -q);
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // divisibility: fold an offending row into the pivot row and retry
      std::size_t bad = rows;
      for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (a(i, j) % a(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad == rows) break;
      add_row_multiple(a, t, bad, Int(1));
      add_row_multiple(u, t, bad, Int(1));
    }
    if (a(t, t) < 0) {
      negate_row(a, t);
      negate_row(u, t);
    }
  }
  return {u, a, v};
}

IntMatrix hermite_normal_form(const IntMatrix& basis) {
  const std::size_t k = basis.rows();
  if (basis.cols() != k) throw Error("hermite_normal_form expects a square basis");
  IntMatrix h = basis;
  for (std::size_t i = 0; i < k; ++i) {
    // Euclid across columns i..k-1 on row i
    for (;;) {
      std::size_t piv = k;
      for (std::size_t j = i; j < k; ++j)
        if (h(i, j) != 0 && (piv == k || abs(h(i, j)) < abs(h(i, piv)))) piv = j;
      if (piv == k) throw Error("lattice basis is not of full rank");
      h.swap_columns(i, piv);
      bool done = true;
      for (std::size_t j = i + 1; j < k; ++j) {
        if (h(i, j) == 0) continue;
        Int q = floor_div(h(i, j), h(i, i));
        add_column_multiple(h, j, i, -q);
        if (h(i, j) != 0) done = false;
      }
      if (done) break;
    }
    if (h(i, i) < 0) negate_column(h, i);
    for (std::size_t j = 0; j < i; ++j) {
      Int q = floor_div(h(i, j), h(i, i));
      add_column_multiple(h, j, i, -q);
    }
  }
  return h;
}

IntegerLattice kernel_lattice(const RationalRep& alpha) {
  const std::size_t k = alpha.k();
  const std::size_t m = alpha.m();
  if (k == 0 || m == 0) throw Error("representation must have k >= 1 and m >= 1");

  Int den = 1;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), alpha.matrix(i, j).get_den_mpz_t());

  // v in kernel  <=>  (den * A) v == 0 mod den
  IntMatrix scaled(m, k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      Rat x = alpha.matrix(i, j) * den;
      scaled(i, j) = x.get_num();
    }
  SmithForm snf = smith_normal_form(scaled);

  IntMatrix basis = snf.v;
  for (std::size_t j = 0; j < k; ++j) {
    Int s = j < m ? snf.d(j, j) : Int(0);
    Int g;
    mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), s.get_mpz_t());
    Int c = den / g;
    for (std::size_t i = 0; i < k; ++i) basis(i, j) *= c;
  }
  return oriented_basis(IntegerLattice{basis});
}

IntegerLattice oriented_basis(const IntegerLattice& lattice) {
  IntMatrix h = hermite_normal_form(lattice.basis);
  // Hermite form already has a positive diagonal; kept for bases built elsewhere.
  if (determinant(h) < 0) negate_column(h, h.cols() - 1);
  return IntegerLattice{h};
}

FiniteQuotient::FiniteQuotient(const IntegerLattice& lattice)
    : hermite_(hermite_normal_form(lattice.basis)) {
  order_ = 1;
  for (std::size_t i = 0; i < hermite_.rows(); ++i) order_ *= hermite_(i, i);
  SmithForm snf = smith_normal_form(lattice.basis);
  for (std::size_t i = 0; i < snf.d.rows(); ++i) {
    Int d = abs(snf.d(i, i));
    if (d != 1) factors_.push_back(d);
  }
}

FiniteQuotient quotient(const IntegerLattice& lattice) { return FiniteQuotient(lattice); }

IntVector FiniteQuotient::coset_map(const IntVector& input) const {
  const std::size_t k = hermite_.rows();
  if (input.size() != k) throw Error("coset_map: vector of the wrong rank");
  IntVector v = input;
  for (std::size_t i = 0; i < k; ++i) {
    Int q = floor_div(v[i], hermite_(i, i));
    if (q == 0) continue;
    for (std::size_t r = i; r < k; ++r) v[r] -= q * hermite_(r, i);
  }
  return v;
}

bool FiniteQuotient::is_zero(const IntVector& v) const {
  auto c = coset_map(v);
  return std::all_of(c.begin(), c.end(), [](const Int& x) { return x == 0; });
}

IntVector FiniteQuotient::representative(std::uint64_t index) const {
  const std::size_t k = hermite_.rows();
  IntVector v(k);
  for (std::size_t i = k; i-- > 0;) {
    std::uint64_t radix = hermite_(i, i).get_ui();
    v[i] = Int(static_cast<unsigned long>(index % radix));
    index /= radix;
  }
  return v;
}

std::uint64_t FiniteQuotient::index_of(const IntVector& canonical) const {
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < hermite_.rows(); ++i) index = index * hermite_(i, i).get_ui() + canonical[i].get_ui();
  return index;
}

RatMatrix phi_inverse(const IntMatrix& phi) {
  const std::size_t n = phi.rows();
  if (phi.cols() != n) throw Error("phi_inverse expects a square matrix");
  RatMatrix a = to_rational(phi);
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) throw Error("singular chain matrix (corrupted chain)");
    a.swap_rows(c, p);
    inv.swap_rows(c, p);
    Rat pivot = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= pivot;
      inv(c, j) /= pivot;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a(r, c) == 0) continue;
      Rat f = a(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

Rat column_sum_norm(const RatMatrix& m) {
  Rat best = 0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Rat s = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += abs(m(i, j));
    if (s > best) best = s;
  }
  return best;
}

const ChainLevel& LatticeChain::level(std::size_t l) const {
  if (l == 0 || l > levels_.size()) throw Error("chain level out of range");
  return levels_[l - 1];
}

IntMatrix LatticeChain::big_phi(std::size_t l) const {
  if (l == 0) return IntMatrix::identity(k_);
  return level(l).big_phi;
}

RatMatrix LatticeChain::big_phi_inverse(std::size_t l) const {
  if (l == 0) return RatMatrix::identity(k_);
  return level(l).big_phi_inverse;
}

RatVector LatticeChain::beta(std::size_t l, const IntVector& gamma) const {
  if (l == 0) return RatVector(m_);
  return level(l).beta.apply(gamma);
}

IntVector LatticeChain::coset(std::size_t l, const IntVector& gamma) const {
  if (l == 0) return IntVector(k_);
  return level(l).gamma.coset_map(gamma);
}

Int LatticeChain::gamma_index(std::size_t l) const {
  if (l == 0) return 1;
  return level(l).gamma.order();
}

LatticeChain extend_chain(const LatticeChain& chain, const RationalRep& alpha) {
  if (alpha.k() != chain.k() || alpha.m() != chain.m()) throw Error("representation shape does not match the chain");
  IntegerLattice lambda = kernel_lattice(alpha);
  FiniteQuotient group(lambda);
  if (group.order() == 1)
    throw Error("representation is trivial modulo Z^m (finite quotient is trivial); not admissible as a thin level");

  const std::size_t l = chain.size();
  IntMatrix prev = chain.big_phi(l);
  RatMatrix prev_inv = chain.big_phi_inverse(l);
  IntMatrix big = prev * lambda.basis;

  RationalRep alpha_prime{alpha.matrix * prev_inv};
  RatMatrix beta = alpha_prime.matrix;
  if (l > 0) {
    const RatMatrix& old = chain.level(l).beta.matrix;
    for (std::size_t i = 0; i < beta.rows(); ++i)
      for (std::size_t j = 0; j < beta.cols(); ++j) beta(i, j) += old(i, j);
  }

  LatticeChain out = chain;
  out.levels_.push_back(ChainLevel{alpha, lambda, lambda.basis, big, phi_inverse(big), group,
                                   FiniteQuotient(IntegerLattice{big}), alpha_prime, RationalRep{beta}});
  return out;
}

nlohmann::json rational_matrix_to_json(const RatMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json integer_matrix_to_json(const IntMatrix& m) { return rational_matrix_to_json(to_rational(m)); }

namespace {

Rat rational_from_json(const nlohmann::json& x) {
  if (x.is_string()) return parse_rational(x.get<std::string>());
  if (x.is_number_integer()) return Rat(Int(std::to_string(x.get<long long>())));
  throw Error("expected a rational as a \"p/q\" string or an integer");
}

}  // namespace

RatMatrix rational_matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw Error("expected a non-empty array of rows");
  RatMatrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != m.cols()) throw Error("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols(); ++c) m(i, c) = rational_from_json(j[i][c]);
  }
  return m;
}

IntMatrix integer_matrix_from_json(const nlohmann::json& j) {
  RatMatrix r = rational_matrix_from_json(j);
  IntMatrix m(r.rows(), r.cols());
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t c = 0; c < r.cols(); ++c) {
      if (r(i, c).get_den() != 1) throw Error("expected an integer matrix");
      m(i, c) = r(i, c).get_num();
    }
  return m;
}

nlohmann::json chain_to_json(const LatticeChain& chain) {
  nlohmann::json levels = nlohmann::json::array();
  for (std::size_t l = 1; l <= chain.size(); ++l) {
    const ChainLevel& lv = chain.level(l);
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& f : lv.group.invariant_factors()) factors.push_back(to_string(f));
    levels.push_back({{"alpha", rational_matrix_to_json(lv.alpha.matrix)},
                      {"phi", integer_matrix_to_json(lv.phi)},
                      {"Phi", integer_matrix_to_json(lv.big_phi)},
                      {"Phi_inverse", rational_matrix_to_json(lv.big_phi_inverse)},
                      {"invariant_factors", factors},
                      {"order", to_string(lv.group.order())},
                      {"alpha_prime", rational_matrix_to_json(lv.alpha_prime.matrix)},
                      {"beta", rational_matrix_to_json(lv.beta.matrix)}});
  }
  return {{"k", chain.k()}, {"m", chain.m()}, {"levels", levels}};
}

LatticeChain chain_from_json(const nlohmann::json& j) {
  LatticeChain chain(j.at("k").get<std::size_t>(), j.at("m").get<std::size_t>());
  for (const auto& lv : j.at("levels")) {
    chain = extend_chain(chain, RationalRep{rational_matrix_from_json(lv.at("alpha"))});
    const ChainLevel& got = chain.level(chain.size());
    bool ok = integer_matrix_from_json(lv.at("phi")) == got.phi &&
              integer_matrix_from_json(lv.at("Phi")) == got.big_phi &&
              rational_matrix_from_json(lv.at("Phi_inverse")) == got.big_phi_inverse &&
              parse_integer(lv.at("order").get<std::string>()) == got.group.order() &&
              rational_matrix_from_json(lv.at("alpha_prime")) == got.alpha_prime.matrix &&
              rational_matrix_from_json(lv.at("beta")) == got.beta.matrix;
    if (!ok) throw Error("stored chain data at level " + std::to_string(chain.size()) + " is inconsistent");
  }
  return chain;
}

}  // namespace solenoid
