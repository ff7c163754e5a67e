#pragma once

// Covering degrees, the supernatural-number fiber invariant and Baer equivalence.

#include "solenoid/action.hpp"
#include "solenoid/lattice.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace solenoid {

/// d_1, d_2, ... as a finite prefix followed by a tail repeated forever (empty tail: finite sequence).
struct CoveringDegrees {
  std::vector<Int> prefix;
  std::vector<Int> tail;

  bool infinite() const { return !tail.empty(); }
  nlohmann::json to_json() const;
  static CoveringDegrees from_json(const nlohmann::json& j);
};

struct Multiplicity {
  bool infinite = false;
  Int count = 0;

  bool operator==(const Multiplicity& o) const { return infinite == o.infinite && (infinite || count == o.count); }
};

/// prime -> multiplicity; absent primes have multiplicity 0.
class SupernaturalNumber {
 public:
  void add(const Int& prime, const Multiplicity& m);
  void add(const SupernaturalNumber& other);
  Multiplicity at(const Int& prime) const;
  const std::map<Int, Multiplicity>& entries() const { return entries_; }
  bool operator==(const SupernaturalNumber& o) const { return entries_ == o.entries_; }
  bool empty() const { return entries_.empty(); }

  std::string to_string() const;
  nlohmann::json to_json() const;
  static SupernaturalNumber from_json(const nlohmann::json& j);

 private:
  std::map<Int, Multiplicity> entries_;
};

/// Prime factorization (trial division, then Pollard rho).
std::map<Int, unsigned long> factorize(const Int& n);

CoveringDegrees covering_degrees(const LatticeChain& chain);
SupernaturalNumber cech_invariant(const CoveringDegrees& degrees);

struct BaerVerdict {
  bool equivalent = false;
  SupernaturalNumber discard_left;   // finite factors removed from the left operand
  SupernaturalNumber discard_right;  // finite factors removed from the right operand
};

BaerVerdict baer_compare(const SupernaturalNumber& p, const SupernaturalNumber& q);
bool baer_equivalent(const SupernaturalNumber& p, const SupernaturalNumber& q);

/// Coset itinerary of z down to level L, projection-compatible; throws when z is not in the level-L disks.
std::vector<IntVector> fiber_address(const DiskTree& tree, const Point& z, std::size_t L);

}  // namespace solenoid
