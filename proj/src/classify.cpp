#include "solenoid/classify.hpp"

#include <random>
#include <sstream>

namespace solenoid {

namespace {

Int json_integer(const nlohmann::json& x) {
  if (x.is_number_integer()) return Int(std::to_string(x.get<long long>()));
  if (x.is_string()) return parse_integer(x.get<std::string>());
  throw Error("expected an integer");
}

nlohmann::json integer_list(const std::vector<Int>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& x : v) {
    if (x.fits_slong_p())
      a.push_back(x.get_si());
    else
      a.push_back(solenoid::to_string(x));
  }
  return a;
}

bool is_prime(const Int& n) { return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0; }

Int pollard_rho(const Int& n, std::uint64_t seed) {
  if (n % 2 == 0) return 2;
  std::mt19937_64 rng(seed);
  for (;;) {
    Int x = Int(static_cast<unsigned long>(rng() % 1000000)) % n, y = x, c = Int(static_cast<unsigned long>(rng() % 1000 + 1));
    Int d = 1;
    while (d == 1) {
      x = (x * x + c) % n;
      y = (y * y + c) % n;
      y = (y * y + c) % n;
      Int diff = abs(x - y);
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != n) return d;
  }
}

void factor_into(const Int& n, std::map<Int, unsigned long>& out, std::uint64_t seed) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  Int d = pollard_rho(n, seed);
  factor_into(d, out, seed + 1);
  factor_into(n / d, out, seed + 2);
}

}  // namespace

nlohmann::json CoveringDegrees::to_json() const { return {{"prefix", integer_list(prefix)}, {"tail", integer_list(tail)}}; }

CoveringDegrees CoveringDegrees::from_json(const nlohmann::json& j) {
  CoveringDegrees d;
  auto read = [](const nlohmann::json& a, std::vector<Int>& v) {
    if (!a.is_array()) throw Error("degree list must be an array");
    for (const auto& x : a) {
      Int n = json_integer(x);
      if (n < 1) throw Error("covering degrees must be positive");
      v.push_back(n);
    }
  };
  if (j.contains("prefix")) read(j["prefix"], d.prefix);
  if (j.contains("degrees")) read(j["degrees"], d.prefix);
  if (j.contains("tail")) read(j["tail"], d.tail);
  return d;
}

void SupernaturalNumber::add(const Int& prime, const Multiplicity& m) {
  if (!m.infinite && m.count == 0) return;
  Multiplicity& e = entries_[prime];
  if (m.infinite || e.infinite) {
    e.infinite = true;
    e.count = 0;
  } else {
    e.count += m.count;
  }
}

void SupernaturalNumber::add(const SupernaturalNumber& other) {
  for (const auto& [p, m] : other.entries_) add(p, m);
}

Multiplicity SupernaturalNumber::at(const Int& prime) const {
  auto it = entries_.find(prime);
  return it == entries_.end() ? Multiplicity{} : it->second;
}

std::string SupernaturalNumber::to_string() const {
  if (entries_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, m] : entries_) {
    os << (first ? "" : " * ") << solenoid::to_string(p) << "^" << (m.infinite ? "inf" : solenoid::to_string(m.count));
    first = false;
  }
  return os.str();
}

nlohmann::json SupernaturalNumber::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [p, m] : entries_) {
    if (m.infinite)
      j[solenoid::to_string(p)] = "inf";
    else if (m.count.fits_slong_p())
      j[solenoid::to_string(p)] = m.count.get_si();
    else
      j[solenoid::to_string(p)] = solenoid::to_string(m.count);
  }
  return j;
}

SupernaturalNumber SupernaturalNumber::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("supernatural number must be a JSON object");
  SupernaturalNumber s;
  for (const auto& [key, val] : j.items()) {
    Int p = parse_integer(key);
    if (p < 2 || !is_prime(p)) throw Error("supernatural number key '" + key + "' is not a prime");
    Multiplicity m;
    if (val.is_string() && val.get<std::string>() == "inf") {
      m.infinite = true;
    } else {
      m.count = json_integer(val);
      if (m.count < 0) throw Error("multiplicities must be non-negative");
    }
    s.add(p, m);
  }
  return s;
}

std::map<Int, unsigned long> factorize(const Int& n_in) {
  if (n_in < 1) throw Error("factorize needs a positive integer");
  std::map<Int, unsigned long> out;
  Int n = n_in;
  for (unsigned long p = 2; p < 10000 && Int(p) * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      ++out[Int(p)];
      n /= p;
    }
  }
  if (n > 1) factor_into(n, out, 1);
  return out;
}

CoveringDegrees covering_degrees(const LatticeChain& chain) {
  CoveringDegrees d;
  for (std::size_t l = 1; l <= chain.size(); ++l) d.prefix.push_back(chain.level(l).group.order());
  return d;
}

SupernaturalNumber cech_invariant(const CoveringDegrees& degrees) {
  SupernaturalNumber s;
  for (const auto& d : degrees.prefix) {
    if (d < 1) throw Error("covering degrees must be positive");
    for (const auto& [p, e] : factorize(d)) s.add(p, Multiplicity{false, Int(e)});
  }
  for (const auto& d : degrees.tail) {
    if (d < 1) throw Error("covering degrees must be positive");
    for (const auto& [p, e] : factorize(d)) s.add(p, Multiplicity{true, 0});
  }
  return s;
}

BaerVerdict baer_compare(const SupernaturalNumber& p, const SupernaturalNumber& q) {
  BaerVerdict v;
  v.equivalent = true;
  std::map<Int, bool> primes;
  for (const auto& [k, m] : p.entries()) primes[k] = true;
  for (const auto& [k, m] : q.entries()) primes[k] = true;
  for (const auto& [prime, unused] : primes) {
    Multiplicity a = p.at(prime), b = q.at(prime);
    if (a.infinite != b.infinite) {
      v.equivalent = false;
      continue;
    }
    if (a.infinite) continue;
    if (a.count > b.count) v.discard_left.add(prime, Multiplicity{false, a.count - b.count});
    if (b.count > a.count) v.discard_right.add(prime, Multiplicity{false, b.count - a.count});
  }
  if (!v.equivalent) {
    v.discard_left = {};
    v.discard_right = {};
  }
  return v;
}

bool baer_equivalent(const SupernaturalNumber& p, const SupernaturalNumber& q) { return baer_compare(p, q).equivalent; }

std::vector<IntVector> fiber_address(const DiskTree& tree, const Point& z, std::size_t L) {
  auto it = tree.locate(z, L);
  if (it.size() < L) throw Error("point does not lie in a level-" + std::to_string(L) + " disk");
  for (std::size_t l = 1; l < it.size(); ++l)
    if (tree.plan().chain.coset(l, it[l]) != it[l - 1]) throw Error("incompatible coset projection in fiber address");
  return it;
}

}  // namespace solenoid
