#pragma once

// Exact integer-lattice algebra for representation kernels, finite quotients
// and the composed chain maps of the construction.

#include "solenoid/arith.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace solenoid {

/// Linear map Z^k -> Q^m; column j is the image of the j-th standard generator.
struct RationalRep {
  RatMatrix matrix;  // m x k

  std::size_t k() const { return matrix.cols(); }
  std::size_t m() const { return matrix.rows(); }

  RatVector apply(const IntVector& v) const;
  RatVector generator(std::size_t j) const { return matrix.column(j); }
  bool is_zero() const;
};

/// Full-rank sublattice of Z^k given by the columns of a k x k basis matrix.
struct IntegerLattice {
  IntMatrix basis;

  std::size_t k() const { return basis.rows(); }
};

/// Z^k / L, with the canonical representative box of the Hermite basis.
class FiniteQuotient {
 public:
  explicit FiniteQuotient(const IntegerLattice& lattice);

  const std::vector<Int>& invariant_factors() const { return factors_; }
  const Int& order() const { return order_; }
  const IntMatrix& hermite_basis() const { return hermite_; }

  /// Unique representative of v + L with 0 <= r_i < H_ii.
  IntVector coset_map(const IntVector& v) const;
  bool is_zero(const IntVector& v) const;

  /// Mixed-radix enumeration of the representatives (index < order).
  IntVector representative(std::uint64_t index) const;
  std::uint64_t index_of(const IntVector& canonical) const;

 private:
  IntMatrix hermite_;
  std::vector<Int> factors_;
  Int order_;
};

struct SmithForm {
  IntMatrix u;  // m x m unimodular
  IntMatrix d;  // m x n diagonal, d_1 | d_2 | ...
  IntMatrix v;  // n x n unimodular
};

SmithForm smith_normal_form(const IntMatrix& m);

/// Lower-triangular column Hermite form: positive diagonal, 0 <= h_ij < h_ii for j < i.
IntMatrix hermite_normal_form(const IntMatrix& basis);

IntegerLattice kernel_lattice(const RationalRep& alpha);
IntegerLattice oriented_basis(const IntegerLattice& lattice);
FiniteQuotient quotient(const IntegerLattice& lattice);
RatMatrix phi_inverse(const IntMatrix& phi);

/// Max column sum of absolute values.
Rat column_sum_norm(const RatMatrix& m);

struct ChainLevel {
  RationalRep alpha;
  IntegerLattice lambda;
  IntMatrix phi;        // oriented basis of lambda
  IntMatrix big_phi;    // composed map, image = Gamma_l
  RatMatrix big_phi_inverse;
  FiniteQuotient group;      // Z^k / Lambda_l
  FiniteQuotient gamma;      // Z^k / Gamma_l
  RationalRep alpha_prime;   // alpha o Phi_{l-1}^{-1}
  RationalRep beta;          // cumulative rotation
};

/// Immutable tower of lattices; level index 1..size(), level 0 is implicit.
class LatticeChain {
 public:
  LatticeChain(std::size_t k, std::size_t m) : k_(k), m_(m) {}

  std::size_t k() const { return k_; }
  std::size_t m() const { return m_; }
  std::size_t size() const { return levels_.size(); }
  bool empty() const { return levels_.empty(); }

  /// Level l (1-based).
  const ChainLevel& level(std::size_t l) const;

  /// Phi_l with Phi_0 = identity.
  IntMatrix big_phi(std::size_t l) const;
  RatMatrix big_phi_inverse(std::size_t l) const;

  /// beta_l(gamma); beta_0 = 0.
  RatVector beta(std::size_t l, const IntVector& gamma) const;

  /// Canonical label of gamma in Z^k / Gamma_l.
  IntVector coset(std::size_t l, const IntVector& gamma) const;
  Int gamma_index(std::size_t l) const;

  friend LatticeChain extend_chain(const LatticeChain& chain, const RationalRep& alpha);

 private:
  std::size_t k_;
  std::size_t m_;
  std::vector<ChainLevel> levels_;
};

/// Appends alpha as the next level; throws Error when Z^k / ker(alpha) is trivial.
LatticeChain extend_chain(const LatticeChain& chain, const RationalRep& alpha);

nlohmann::json rational_matrix_to_json(const RatMatrix& m);
nlohmann::json integer_matrix_to_json(const IntMatrix& m);
RatMatrix rational_matrix_from_json(const nlohmann::json& j);
IntMatrix integer_matrix_from_json(const nlohmann::json& j);

nlohmann::json chain_to_json(const LatticeChain& chain);
/// Rebuilds the chain from the stored representations and verifies every stored matrix.
LatticeChain chain_from_json(const nlohmann::json& j);

}  // namespace solenoid
