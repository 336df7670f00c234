#ifndef CANLIFT_ARITH_HPP
#define CANLIFT_ARITH_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace canlift {

/* Error taxonomy, mirrored by the CLI exit codes:
   precondition_error -> 1, parse_error -> 2, crosscheck_error -> 3. */
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class precondition_error : public error {
 public:
  using error::error;
};

class parse_error : public error {
 public:
  parse_error(const std::string& msg, std::size_t pos)
      : error(msg + " (at position " + std::to_string(pos) + ")"), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_ = 0;
};

/* Raised when two independent computations of the same value disagree.
   Reaching this means a bug, not bad input. */
class crosscheck_error : public error {
 public:
  using error::error;
};

/* Inline coefficient storage bound for F_{p^n}; keeps field elements
   allocation-free inside polynomial merge loops. */
inline constexpr unsigned kMaxExtDegree = 4;

/* Immutable description of F_{p^n} = F_p[y]/(modulus). Instances are interned:
   get() returns a pointer that stays valid for the process lifetime, and equal
   parameters yield the same pointer, so specs compare by address. */
struct FieldSpec {
  std::uint64_t p = 0;
  unsigned n = 0;
  std::array<std::uint32_t, kMaxExtDegree + 1> mod{};  // mod[i] multiplies y^i, mod[n] = 1
  std::uint64_t p2 = 0;                                // p*p, p < 2^31 so this fits
  std::vector<std::uint64_t> pow_p_tab;                // a^p mod p² for a < p (small p, n = 1)

  /* modulus == nullptr picks the default: the lexicographically smallest monic
     irreducible, ordering coefficient tuples (c_{n-1},...,c_0). */
  static const FieldSpec* get(std::uint64_t p, unsigned n = 1,
                              const std::vector<std::uint32_t>* modulus = nullptr);

  std::uint64_t q() const;  // p^n
  std::string modulus_text() const;

  // residues mod p
  std::uint64_t radd(std::uint64_t a, std::uint64_t b) const { return (a + b) % p; }
  std::uint64_t rsub(std::uint64_t a, std::uint64_t b) const { return (a + p - b) % p; }
  std::uint64_t rmul(std::uint64_t a, std::uint64_t b) const { return a * b % p; }
  std::uint64_t rinv(std::uint64_t a) const;
  std::uint64_t rpow(std::uint64_t a, std::uint64_t e) const;

  // residues mod p²
  std::uint64_t add2(std::uint64_t a, std::uint64_t b) const { return (a + b) % p2; }
  std::uint64_t sub2(std::uint64_t a, std::uint64_t b) const { return (a + p2 - b) % p2; }
  std::uint64_t mul2(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p2);
  }
  std::uint64_t inv2(std::uint64_t a) const;
  std::uint64_t pow2(std::uint64_t a, std::uint64_t e) const;
  std::uint64_t pow_p2(std::uint64_t a) const {  // a^p mod p², a < p
    return pow_p_tab.empty() ? pow2(a, p) : pow_p_tab[a];
  }
};

class FieldElement {
 public:
  FieldElement() = default;

  static FieldElement zero(const FieldSpec* s);
  static FieldElement one(const FieldSpec* s);
  static FieldElement from_int(const FieldSpec* s, std::int64_t v);
  static FieldElement from_coeffs(const FieldSpec* s, const std::vector<std::int64_t>& c);
  static FieldElement from_index(const FieldSpec* s, std::uint64_t idx);  // base-p digits
  static FieldElement generator(const FieldSpec* s);                      // the class of y

  const FieldSpec* spec() const { return spec_; }
  std::uint64_t coeff(unsigned i) const { return c_[i]; }
  std::uint64_t index() const;
  bool is_zero() const;

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator-() const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement inv() const;  // precondition_error on zero
  FieldElement pow(std::uint64_t e) const;
  FieldElement frobenius() const { return pow(spec_->p); }
  FieldElement frobenius_inv() const;

  bool operator==(const FieldElement& o) const;
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

  std::string str() const;  // "3" for n = 1, "c0,c1" otherwise

 private:
  const FieldSpec* spec_ = nullptr;
  std::array<std::uint32_t, kMaxExtDegree> c_{};
  void check_same(const FieldElement& o) const;
};

FieldElement field_from_string(const FieldSpec* s, std::string_view text);

/* Length-2 Witt vector over F_{p^n}; represents an element of W₂(k), the
   weight-2 truncation with p² = 0. For n = 1, W₂(F_p) ≅ Z/p² through
   witt_prime_iso and the arithmetic below routes through that isomorphism;
   for n > 1 the generic coordinate formulas are used. */
class Witt2 {
 public:
  Witt2() = default;
  Witt2(const FieldElement& a0, const FieldElement& a1);

  static Witt2 zero(const FieldSpec* s);
  static Witt2 one(const FieldSpec* s);
  static Witt2 from_int(const FieldSpec* s, std::int64_t v);
  static Witt2 teichmuller(const FieldElement& a);  // (a, 0)
  static Witt2 times_p(const FieldElement& a);      // (0, a^p)

  const FieldSpec* spec() const { return a0_.spec(); }
  const FieldElement& a0() const { return a0_; }
  const FieldElement& a1() const { return a1_; }
  FieldElement reduce() const { return a0_; }
  bool is_zero() const { return a0_.is_zero() && a1_.is_zero(); }
  bool is_unit() const { return !a0_.is_zero(); }

  Witt2 operator+(const Witt2& o) const;
  Witt2 operator-(const Witt2& o) const;
  Witt2 operator-() const;
  Witt2 operator*(const Witt2& o) const;
  Witt2 inv() const;  // precondition_error on non-unit
  Witt2 pow(std::uint64_t e) const;
  Witt2 frobenius() const;  // (a0^p, a1^p)

  bool operator==(const Witt2& o) const { return a0_ == o.a0_ && a1_ == o.a1_; }
  bool operator!=(const Witt2& o) const { return !(*this == o); }

  std::string str() const;  // "(a0|a1)"

 private:
  FieldElement a0_, a1_;
};

/* Ring isomorphism W₂(F_p) → Z/p², (a0,a1) ↦ a0^p + p·a1. n = 1 only. */
std::uint64_t witt_prime_iso(const Witt2& x);
Witt2 witt_from_residue(const FieldSpec* s, std::uint64_t r);  // inverse, n = 1 only

/* Preimage of (0,a1) under times_p; precondition: a0 = 0. */
FieldElement witt_div_p(const Witt2& x);

Witt2 witt_from_string(const FieldSpec* s, std::string_view text);

namespace detail {
/* Direct coordinate formulas, any n. Production Witt2 arithmetic uses these
   for n > 1 and the Z/p² route for n = 1; tests compare the two paths. */
Witt2 witt_add_formula(const Witt2& x, const Witt2& y);
Witt2 witt_mul_formula(const Witt2& x, const Witt2& y);
}  // namespace detail

}  // namespace canlift

#endif
