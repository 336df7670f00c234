#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "canlift/arith.hpp"
#include "oracles.hpp"

using namespace canlift;

TEST_CASE("field spec construction and default moduli") {
  const FieldSpec* f9 = FieldSpec::get(3, 2);
  CHECK(f9->modulus_text() == "1,0,1");  // y^2 + 1
  const FieldSpec* f25 = FieldSpec::get(5, 2);
  CHECK(f25->modulus_text() == "2,0,1");  // y^2 + 2
  CHECK(FieldSpec::get(3, 2) == f9);      // interned

  CHECK_THROWS_AS(FieldSpec::get(2), precondition_error);
  CHECK_THROWS_AS(FieldSpec::get(9), precondition_error);
  CHECK_THROWS_AS(FieldSpec::get(5, 0), precondition_error);
  CHECK_THROWS_AS(FieldSpec::get(5, kMaxExtDegree + 1), precondition_error);

  std::vector<std::uint32_t> red{2, 3, 1};  // (y+1)(y+2) over F_5
  CHECK_THROWS_AS(FieldSpec::get(5, 2, &red), precondition_error);
  std::vector<std::uint32_t> notmonic{1, 0, 2};
  CHECK_THROWS_AS(FieldSpec::get(5, 2, &notmonic), precondition_error);
}

TEST_CASE("prime field arithmetic matches integers") {
  for (std::uint64_t p : {3ull, 5ull, 7ull, 11ull}) {
    const FieldSpec* s = FieldSpec::get(p);
    for (std::uint64_t a = 0; a < p; ++a) {
      auto fa = FieldElement::from_int(s, static_cast<std::int64_t>(a));
      for (std::uint64_t b = 0; b < p; ++b) {
        auto fb = FieldElement::from_int(s, static_cast<std::int64_t>(b));
        CHECK((fa + fb).coeff(0) == (a + b) % p);
        CHECK((fa * fb).coeff(0) == a * b % p);
        CHECK((fa - fb).coeff(0) == (a + p - b) % p);
      }
      if (a) CHECK((fa * fa.inv()) == FieldElement::one(s));
    }
    CHECK_THROWS_AS(FieldElement::zero(s).inv(), precondition_error);
  }
}

TEST_CASE("extension field arithmetic") {
  const FieldSpec* f9 = FieldSpec::get(3, 2);
  auto a = FieldElement::from_coeffs(f9, {1, 1});  // 1 + y
  auto b = FieldElement::from_coeffs(f9, {2, 1});  // 2 + y
  CHECK((a * b) == FieldElement::one(f9));         // (y+1)(y+2) = y^2+2 = 1 mod (y^2+1)

  for (const FieldSpec* s : {FieldSpec::get(3, 2), FieldSpec::get(5, 2), FieldSpec::get(3, 3)}) {
    std::uint64_t q = s->q();
    for (std::uint64_t i = 0; i < q; ++i) {
      auto x = FieldElement::from_index(s, i);
      CHECK(x.index() == i);
      if (!x.is_zero()) {
        CHECK((x * x.inv()) == FieldElement::one(s));
        CHECK(x.pow(q - 1) == FieldElement::one(s));  // Lagrange
      }
      // frobenius is a field automorphism with exact order n
      auto fx = x;
      for (unsigned k = 0; k < s->n; ++k) fx = fx.frobenius();
      CHECK(fx == x);
      CHECK(x.frobenius().frobenius_inv() == x);
    }
    // additivity of frobenius on a sample
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
      auto x = FieldElement::from_index(s, rng() % q);
      auto y = FieldElement::from_index(s, rng() % q);
      CHECK((x + y).frobenius() == x.frobenius() + y.frobenius());
      CHECK((x * y).frobenius() == x.frobenius() * y.frobenius());
    }
  }
}

TEST_CASE("mismatched specs are rejected") {
  auto a = FieldElement::from_int(FieldSpec::get(5), 1);
  auto b = FieldElement::from_int(FieldSpec::get(7), 1);
  CHECK_THROWS_AS(a + b, precondition_error);
  auto wa = Witt2::one(FieldSpec::get(5));
  auto wb = Witt2::one(FieldSpec::get(7));
  CHECK_THROWS_AS(wa + wb, precondition_error);
  CHECK_THROWS_AS(wa * wb, precondition_error);
}

TEST_CASE("witt arithmetic over F_p equals the Z/p^2 oracle, exhaustively") {
  for (std::uint64_t p : {3ull, 5ull, 7ull}) {
    const FieldSpec* s = FieldSpec::get(p);
    std::uint64_t p2 = p * p;

    // iso is a bijection and matches the oracle encode/decode
    for (std::uint64_t r = 0; r < p2; ++r) {
      Witt2 w = witt_from_residue(s, r);
      CHECK(witt_prime_iso(w) == r);
      auto [a0, a1] = oracles::w2_iso_inv(p, r);
      CHECK(w.a0().coeff(0) == a0);
      CHECK(w.a1().coeff(0) == a1);
    }

    // both the production path and the coordinate formulas agree with Z/p^2
    for (std::uint64_t x = 0; x < p2; ++x) {
      Witt2 wx = witt_from_residue(s, x);
      CHECK(witt_prime_iso(-wx) == (p2 - x) % p2);
      if (x % p) CHECK(witt_prime_iso(wx.inv()) == oracles::powmod(x, p * (p - 1) - 1, p2));
      for (std::uint64_t y = 0; y < p2; ++y) {
        Witt2 wy = witt_from_residue(s, y);
        CHECK(witt_prime_iso(wx + wy) == (x + y) % p2);
        CHECK(witt_prime_iso(wx * wy) == x * y % p2);
        CHECK(witt_prime_iso(detail::witt_add_formula(wx, wy)) == (x + y) % p2);
        CHECK(witt_prime_iso(detail::witt_mul_formula(wx, wy)) == x * y % p2);
      }
    }
  }
}

TEST_CASE("frozen witt examples") {
  const FieldSpec* s5 = FieldSpec::get(5);
  CHECK(witt_prime_iso(Witt2::teichmuller(FieldElement::from_int(s5, 3))) == 18);
  Witt2 w32(FieldElement::from_int(s5, 3), FieldElement::from_int(s5, 2));
  CHECK(witt_prime_iso(w32) == 3);
  CHECK(Witt2::from_int(s5, 3) == w32);
  CHECK(Witt2::from_int(s5, 18) == Witt2::teichmuller(FieldElement::from_int(s5, 3)));
  CHECK(Witt2::from_int(s5, -1) == -Witt2::one(s5));

  // (1,0) + (1,0) over W2(F_3): decode 2 in Z/9 gives a1 = 1
  const FieldSpec* s3 = FieldSpec::get(3);
  Witt2 one3 = Witt2::one(s3);
  Witt2 sum = one3 + one3;
  CHECK(sum.a0().coeff(0) == 2);
  CHECK(sum.a1().coeff(0) == 1);
  CHECK(witt_prime_iso(sum) == 2);
}

TEST_CASE("witt ring axioms and structural maps over extensions") {
  for (const FieldSpec* s : {FieldSpec::get(3, 2), FieldSpec::get(5, 2)}) {
    std::uint64_t q = s->q();
    std::mt19937_64 rng(11);
    auto rnd = [&] {
      return Witt2(FieldElement::from_index(s, rng() % q), FieldElement::from_index(s, rng() % q));
    };
    for (int t = 0; t < 300; ++t) {
      Witt2 x = rnd(), y = rnd(), z = rnd();
      CHECK((x + y) + z == x + (y + z));
      CHECK((x * y) * z == x * (y * z));
      CHECK(x + y == y + x);
      CHECK(x * y == y * x);
      CHECK(x * (y + z) == x * y + x * z);
      CHECK((x + (-x)).is_zero());
      CHECK(x - y == x + (-y));
      CHECK(x * Witt2::one(s) == x);
      if (x.is_unit()) CHECK(x * x.inv() == Witt2::one(s));

      // frobenius is a ring endomorphism of order n
      CHECK((x + y).frobenius() == x.frobenius() + y.frobenius());
      CHECK((x * y).frobenius() == x.frobenius() * y.frobenius());
      Witt2 fx = x;
      for (unsigned k = 0; k < s->n; ++k) fx = fx.frobenius();
      CHECK(fx == x);

      // p-fold sum is times_p of the reduction
      Witt2 acc = Witt2::zero(s);
      for (std::uint64_t k = 0; k < s->p; ++k) acc = acc + x;
      CHECK(acc == Witt2::times_p(x.reduce()));
      CHECK(acc == Witt2::from_int(s, static_cast<std::int64_t>(s->p)) * x);

      // times_p lands in the square-zero ideal; teichmuller is multiplicative
      CHECK((Witt2::times_p(x.reduce()) * Witt2::times_p(y.reduce())).is_zero());
      CHECK(Witt2::teichmuller(x.reduce() * y.reduce()) ==
            Witt2::teichmuller(x.reduce()) * Witt2::teichmuller(y.reduce()));

      // div_p inverts times_p
      CHECK(witt_div_p(Witt2::times_p(x.reduce())) == x.reduce());
    }
  }
  CHECK_THROWS_AS(witt_div_p(Witt2::one(FieldSpec::get(5))), precondition_error);
  CHECK_THROWS_AS(Witt2::times_p(FieldElement::one(FieldSpec::get(5))).inv(), precondition_error);
  CHECK_THROWS_AS(witt_prime_iso(Witt2::one(FieldSpec::get(3, 2))), precondition_error);
}

TEST_CASE("text round trips") {
  const FieldSpec* s5 = FieldSpec::get(5);
  const FieldSpec* f9 = FieldSpec::get(3, 2);

  CHECK(field_from_string(s5, "3").str() == "3");
  CHECK(field_from_string(s5, "-1").str() == "4");
  CHECK(field_from_string(f9, "1,2").str() == "1,2");
  CHECK(field_from_string(f9, "7").str() == "1,0");  // constant embeds
  CHECK_THROWS_AS(field_from_string(s5, "x"), parse_error);
  CHECK_THROWS_AS(field_from_string(f9, "1,2,3"), precondition_error);

  CHECK(witt_from_string(s5, "(3|2)").str() == "(3|2)");
  CHECK(witt_from_string(s5, "(3|2)") == Witt2::from_int(s5, 3));
  CHECK(witt_from_string(s5, "7") == Witt2::from_int(s5, 7));
  CHECK(witt_from_string(f9, "(1,2|0,1)").str() == "(1,2|0,1)");
  CHECK_THROWS_AS(witt_from_string(s5, "(3|"), parse_error);
  CHECK_THROWS_AS(witt_from_string(s5, "(3)"), parse_error);

  // round trip through the string form on a sample
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    Witt2 x(FieldElement::from_index(f9, rng() % 9), FieldElement::from_index(f9, rng() % 9));
    CHECK(witt_from_string(f9, x.str()) == x);
  }
}
