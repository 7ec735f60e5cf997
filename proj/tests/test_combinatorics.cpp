#include "mcadiff/combinatorics.hpp"
#include "mcadiff/errors.hpp"

#include <doctest.h>

using namespace mcadiff;
using namespace mcadiff::comb;

TEST_CASE("binomial") {
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(4, 7) == 0);
    CHECK(binomial(4, -1) == 0);
    CHECK(binomial(60, 30) == Integer("118264581564861424"));
    CHECK_THROWS_AS(binomial(-1, 0), InvalidArgument);
}

TEST_CASE("binomial symmetry and Pascal rule up to 64") {
    for (long n = 0; n <= 64; ++n) {
        for (long k = 0; k <= n; ++k) {
            REQUIRE(binomial(n, k) == binomial(n, n - k));
            if (n > 0) REQUIRE(binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k));
        }
    }
}

TEST_CASE("factorial") {
    CHECK(factorial(0) == 1);
    CHECK(factorial(10) == 3628800);
    CHECK(factorial(25) == Integer("15511210043330985984000000"));
}

TEST_CASE("pochhammer") {
    CHECK(pochhammer(Rational(1), 4) == 24);
    CHECK(pochhammer(ratio(1, 2), 1) == ratio(1, 2));
    CHECK(pochhammer(ratio(-5, 2), 2) == ratio(15, 4));
    CHECK(pochhammer(ratio(7, 3), 0) == 1);
    CHECK(pochhammer(-2.5, 2) == doctest::Approx(3.75));
}

TEST_CASE("jacobi small cases") {
    CHECK(jacobi(0, 3, 4, ratio(7, 5)) == 1);
    CHECK(jacobi(1, 0, 0, ratio(7, 3)) == ratio(7, 3));
    CHECK(jacobi(1, 2, 0, Rational(3)) == 7);
    CHECK(jacobi(1, 2, 0, 3.0) == doctest::Approx(7.0));
    // Legendre P_2(x) = (3x^2 - 1)/2
    CHECK(jacobi(2, 0, 0, ratio(1, 2)) == ratio(-1, 8));
}

TEST_CASE("jacobi recurrence equals the hypergeometric representation") {
    const Rational xs[] = {Rational(-2), Rational(-1), Rational(0), Rational(1), Rational(2), ratio(5, 3)};
    for (unsigned n = 0; n <= 20; ++n) {
        for (unsigned a = 0; a <= 10; ++a) {
            for (unsigned b = 0; b <= 10; ++b) {
                for (const auto& x : xs) {
                    REQUIRE(jacobi(n, a, b, x) == jacobi_hypergeometric(n, a, b, x));
                }
            }
        }
    }
}

TEST_CASE("jacobi floating recurrence tracks the exact one") {
    for (unsigned n = 0; n <= 20; ++n) {
        const Rational x = ratio(3, 7);
        CHECK(jacobi(n, 2, 1, x.get_d()) == doctest::Approx(jacobi(n, 2, 1, x).get_d()).epsilon(1e-12));
    }
}

TEST_CASE("jacobi contiguous relation") {
    const Rational xs[] = {ratio(-3, 2), ratio(1, 3), ratio(7, 4), Rational(5)};
    for (unsigned n = 0; n <= 15; ++n) {
        for (unsigned a = 0; a <= 10; ++a) {
            for (const auto& x : xs) {
                const Rational lhs = ratio(2 * n + a + 2, 2 * (n + 1)) * (1 + x) * jacobi(n, a, 1, x);
                REQUIRE(lhs == jacobi(n + 1, a, 0, x) + jacobi(n, a, 0, x));
            }
        }
    }
}

TEST_CASE("terminating 2F1") {
    CHECK(hyp2f1_terminating(0, ratio(3, 2), ratio(5, 7), ratio(9, 4)) == 1);
    const Rational b = ratio(2, 3), c = ratio(5, 2), z = ratio(-4, 9);
    CHECK(hyp2f1_terminating(-1, b, c, z) == 1 - b / c * z);
    // Three-term direct sum: 1 + (-2)(-5/2)/(1/2) + (-2)(-1)(-5/2)(-3/2)/((1/2)(3/2) 2) = 1 + 10 + 5
    CHECK(hyp2f1_terminating(-2, ratio(-5, 2), ratio(1, 2), Rational(1)) == 16);
    // Chu-Vandermonde: 2F1(-n, b; c; 1) = (c - b)_n / (c)_n
    for (long n = 0; n <= 12; ++n) {
        CHECK(hyp2f1_terminating(-n, b, c, Rational(1)) == pochhammer(c - b, n) / pochhammer(c, n));
    }
    CHECK(hyp2f1_terminating(-3, 0.5, 1.5, 0.25) ==
          doctest::Approx(hyp2f1_terminating(-3, ratio(1, 2), ratio(3, 2), ratio(1, 4)).get_d()));
}

TEST_CASE("terminating 2F1 errors") {
    CHECK_THROWS_AS(hyp2f1_terminating(1, Rational(1), Rational(1), Rational(1)), InvalidArgument);
    CHECK_THROWS_AS(hyp2f1_terminating(-3, Rational(1), Rational(-1), Rational(1)), PoleError);
    CHECK_THROWS_AS(hyp2f1_terminating(-3, 1.0, -2.0, 1.0), PoleError);
    // The pole sits beyond the last term.
    CHECK_NOTHROW(hyp2f1_terminating(-2, Rational(1), Rational(-2), Rational(1)));
}

TEST_CASE("Q numbers") {
    for (long n = 0; n <= 6; ++n) CHECK(q_number(n, n) == 1);
    CHECK(q_number(2, 1) == 12);
    CHECK(q_number_direct(2, 1) == 12);
    CHECK(q_number(3, -1) == 0);
    CHECK(q_number(HalfInteger::from_twice(5), -1) == 0);
    CHECK_THROWS_AS(q_number(2, 5), InvalidArgument);
}

TEST_CASE("R numbers") {
    CHECK(r_number(1, 0) == 8);
    CHECK(r_number_direct(1, 0) == 8);
    CHECK(r_number(4, -1) == 0);
    // Only j = 0 survives in the defining sum: C(6, 1) C(2, 2) = 6.
    CHECK(r_number(2, 2) == 6);
    CHECK(r_number_direct(2, 2) == 6);
}

TEST_CASE("Q and R closed forms equal their defining sums for n <= 25") {
    for (long n = 0; n <= 25; ++n) {
        for (long k = 0; k <= n; ++k) {
            REQUIRE(q_number(n, k) == q_number_direct(n, k));
            REQUIRE(r_number(n, k) == r_number_direct(n, k));
            REQUIRE(r_number(n, k) == q_number(HalfInteger(n).plus_half(), k));
        }
    }
}

TEST_CASE("half-integer representation") {
    const HalfInteger h = HalfInteger(3).plus_half();
    CHECK(h.twice() == 7);
    CHECK_FALSE(h.is_integer());
    CHECK(HalfInteger(4).is_integer());
}
