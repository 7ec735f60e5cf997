#pragma once

// Exact combinatorial and special-function primitives behind the closed-form
// displacement distribution. Every function is pure.

#include "mcadiff/rational.hpp"

namespace mcadiff::comb {

/// n!/(k!(n-k)!) for 0 <= k <= n, zero outside that range. Requires n >= 0.
Integer binomial(long n, long k);

Integer factorial(unsigned long n);

/// Rising factorial x(x+1)...(x+n-1); 1 for n == 0.
Rational pochhammer(const Rational& x, unsigned long n);
double pochhammer(double x, unsigned long n);

/// Jacobi polynomial P_n^{(alpha,beta)}(x) by the three-term recurrence.
Rational jacobi(unsigned n, unsigned alpha, unsigned beta, const Rational& x);
double jacobi(unsigned n, unsigned alpha, unsigned beta, double x);

/// Jacobi polynomial through its terminating Gauss series,
///   (alpha+1)_n / n! * 2F1(-n, n+alpha+beta+1; alpha+1; (1-x)/2).
/// Kept as an independent route for cross-checking the recurrence.
Rational jacobi_hypergeometric(unsigned n, unsigned alpha, unsigned beta, const Rational& x);

/// Terminating series 2F1(neg_n, b; c; z) = sum_{j=0}^{n} (neg_n)_j (b)_j / ((c)_j j!) z^j
/// with neg_n = -n <= 0. Throws PoleError if (c)_j vanishes for some j <= n and
/// InvalidArgument if neg_n > 0.
Rational hyp2f1_terminating(long neg_n, const Rational& b, const Rational& c, const Rational& z);
double hyp2f1_terminating(long neg_n, double b, double c, double z);

/// Integer or half-integer argument, stored as twice its value.
class HalfInteger {
public:
    constexpr HalfInteger(long value) : twice_(2 * value) {}

    static constexpr HalfInteger from_twice(long twice) {
        HalfInteger h(0);
        h.twice_ = twice;
        return h;
    }

    constexpr long twice() const { return twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    constexpr HalfInteger plus_half() const { return from_twice(twice_ + 1); }

private:
    long twice_;
};

/// Q(n, k) = 2^{2(n-k)} C(2n-k, k). Defined for integer and half-integer n >= 0 and
/// -1 <= k <= 2n, with Q(n, -1) = 0.
Integer q_number(HalfInteger n, long k);

/// Q(n, k) as the defining sum  sum_{j=0}^{n-k} C(2n+1, 2j) C(n-j, k)  (integer n only).
Integer q_number_direct(long n, long k);

/// R(n, k) = 2^{2(n-k)+1} C(2n-k+1, k), with R(n, -1) = 0. Equals Q(n + 1/2, k).
Integer r_number(long n, long k);

/// R(n, k) as the defining sum  sum_{j=0}^{n-k} C(2n+2, 2j+1) C(n-j, k).
Integer r_number_direct(long n, long k);

}  // namespace mcadiff::comb
