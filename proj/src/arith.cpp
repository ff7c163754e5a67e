#include "solenoid/arith.hpp"

#include <cmath>
#include <regex>

namespace solenoid {

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
  return r;
}

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Rat frac(const Rat& x) {
  Int fl = floor_div(x.get_num(), x.get_den());
  Rat r = x - Rat(fl);
  r.canonicalize();
  return r;
}

std::string to_string(const Rat& x) { return x.get_str(); }
std::string to_string(const Int& x) { return x.get_str(); }

Rat parse_rational(const std::string& text) {
  static const std::regex pattern(R"(\s*([+-]?\d+)(\s*/\s*(\d+))?\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw Error("malformed rational: '" + text + "'");
  Int num(m[1].str().front() == '+' ? m[1].str().substr(1) : m[1].str());
  Int den(1);
  if (m[3].matched) den = Int(m[3].str());
  if (den == 0) throw Error("zero denominator in rational: '" + text + "'");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Int parse_integer(const std::string& text) {
  Rat r = parse_rational(text);
  if (r.get_den() != 1) throw Error("expected an integer, got '" + text + "'");
  return r.get_num();
}

Rat exact_rational(double x) {
  if (!std::isfinite(x)) throw Error("cannot convert non-finite double to a rational");
  Rat r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

Rat dyadic_floor(double x, int bits) {
  if (!(x > 0) || !std::isfinite(x)) throw Error("dyadic_floor needs a finite positive value");
  int e = 0;
  std::frexp(x, &e);  // x = f * 2^e, f in [0.5, 1)
  const int shift = bits - e;
  double scaled = std::ldexp(x, shift);
  Int num(std::floor(scaled));
  Rat r;
  if (shift >= 0) {
    Int den;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(shift));
    r = Rat(num, den);
  } else {
    Int mul;
    mpz_ui_pow_ui(mul.get_mpz_t(), 2, static_cast<unsigned long>(-shift));
    r = Rat(num * mul);
  }
  r.canonicalize();
  return r;
}

Rat norm_squared(const RatVector& v) {
  Rat s = 0;
  for (const auto& x : v) s += x * x;
  return s;
}

Int determinant(const IntMatrix& input) {
  const std::size_t n = input.rows();
  if (n != input.cols()) throw Error("determinant of a non-square matrix");
  if (n == 0) return 1;
  // Bareiss elimination keeps every intermediate integral.
  IntMatrix a = input;
  Int sign = 1;
  Int prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a(i, j) = v;
      }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

}  // namespace solenoid
