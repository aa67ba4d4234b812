#include <doctest.h>

#include <numeric>
#include <string>

#include "ies/error.hpp"
#include "ies/galois_field.hpp"

TEST_CASE("prime fields agree with modular arithmetic") {
  for (int q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
    const ies::GaloisField f(q);
    CHECK(f.characteristic() == q);
    CHECK(f.degree() == 1);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        REQUIRE(f.add(a, b) == (a + b) % q);
        REQUIRE(f.mul(a, b) == (a * b) % q);
        REQUIRE(f.sub(a, b) == ((a - b) % q + q) % q);
      }
  }
}

TEST_CASE("GF(4) and GF(8) match hand-computed products") {
  const ies::GaloisField f4(4);  // x^2 = x + 1
  CHECK(f4.mul(2, 2) == 3);
  CHECK(f4.mul(2, 3) == 1);
  CHECK(f4.mul(3, 3) == 2);
  CHECK(f4.add(2, 3) == 1);
  const ies::GaloisField f8(8);  // x^3 = x + 1
  CHECK(f8.mul(2, 4) == 3);
  CHECK(f8.mul(4, 4) == 6);  // x^4 = x^2 + x
}

TEST_CASE("every supported field has a cyclic multiplicative group") {
  for (int q : ies::GaloisField::supported_orders()) {
    const ies::GaloisField f(q);
    CHECK(f.order() == q);
    int p = 1;
    for (int k = 0; k < f.degree(); ++k) p *= f.characteristic();
    CHECK(p == q);
    bool found = false;
    for (int g = 2; g < q && !found; ++g) {
      int x = g, k = 1;
      while (x != 1) {
        x = f.mul(x, g);
        ++k;
      }
      found = (k == q - 1);
    }
    if (q > 2) CHECK_MESSAGE(found, "no primitive element in GF(" << q << ")");
    for (int a = 1; a < q; ++a) REQUIRE(f.mul(a, f.inv(a)) == 1);
    for (int a = 0; a < q; ++a) REQUIRE(f.add(a, f.neg(a)) == 0);
  }
}

TEST_CASE("unsupported orders name nearby supported ones") {
  for (int q : {0, 1, 6, 10, 12, 33, 64}) {
    try {
      ies::GaloisField f(q);
      FAIL("expected an error for q = " << q);
    } catch (const ies::Error& e) {
      CHECK(std::string(e.what()).find("supported") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(ies::GaloisField(3).inv(0), ies::Error);
}
