#include "mcadiff/combinatorics.hpp"

#include "mcadiff/errors.hpp"

#include <string>

namespace mcadiff::comb {

Integer binomial(long n, long k) {
    if (n < 0) throw InvalidArgument("binomial: n must be non-negative");
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    // Each partial product C(n-k+i, i) is an integer, so the division is exact.
    Integer result = 1;
    for (long i = 1; i <= k; ++i) {
        result *= n - k + i;
        mpz_divexact_ui(result.get_mpz_t(), result.get_mpz_t(), static_cast<unsigned long>(i));
    }
    return result;
}

Integer factorial(unsigned long n) {
    Integer result = 1;
    for (unsigned long i = 2; i <= n; ++i) result *= i;
    return result;
}

Rational pochhammer(const Rational& x, unsigned long n) {
    Rational result = 1;
    Rational factor = x;
    for (unsigned long i = 0; i < n; ++i) {
        result *= factor;
        factor += 1;
    }
    return result;
}

double pochhammer(double x, unsigned long n) {
    double result = 1.0;
    for (unsigned long i = 0; i < n; ++i) result *= x + static_cast<double>(i);
    return result;
}

namespace {

template <class T>
T jacobi_recurrence(unsigned n, unsigned alpha, unsigned beta, const T& x) {
    if (n == 0) return T(1);
    const long a = alpha;
    const long b = beta;
    T prev = 1;
    T curr = T(a + 1) + T(a + b + 2) * (x - T(1)) / T(2);
    for (long k = 2; k <= static_cast<long>(n); ++k) {
        const long s = 2 * k + a + b;
        const T lead = T(2 * k * (k + a + b) * (s - 2));
        const T c1 = T(s - 1) * (T(s * (s - 2)) * x + T(a * a - b * b));
        const T c2 = T(2 * (k + a - 1) * (k + b - 1) * s);
        T next = (c1 * curr - c2 * prev) / lead;
        prev = std::move(curr);
        curr = std::move(next);
    }
    return curr;
}

template <class T>
T hyp2f1_series(long neg_n, const T& b, const T& c, const T& z) {
    if (neg_n > 0) throw InvalidArgument("hyp2f1_terminating: first parameter must be a non-positive integer");
    const long n = -neg_n;
    for (long i = 0; i < n; ++i) {
        if (c + T(i) == T(0)) {
            throw PoleError("hyp2f1_terminating: (c)_j vanishes at j = " + std::to_string(i + 1) +
                            " before the series terminates");
        }
    }
    T term = 1;
    T sum = 1;
    for (long j = 0; j < n; ++j) {
        // ratio t_{j+1}/t_j = (j - n)(b + j) / ((c + j)(j + 1)) * z
        term *= T(j - n) * (b + T(j)) / ((c + T(j)) * T(j + 1)) * z;
        sum += term;
    }
    return sum;
}

}  // namespace

Rational jacobi(unsigned n, unsigned alpha, unsigned beta, const Rational& x) {
    return jacobi_recurrence<Rational>(n, alpha, beta, x);
}

double jacobi(unsigned n, unsigned alpha, unsigned beta, double x) {
    return jacobi_recurrence<double>(n, alpha, beta, x);
}

Rational jacobi_hypergeometric(unsigned n, unsigned alpha, unsigned beta, const Rational& x) {
    const Rational lead = pochhammer(Rational(alpha + 1), n) / Rational(factorial(n));
    const Rational b(static_cast<long>(n + alpha + beta + 1));
    const Rational c(static_cast<long>(alpha + 1));
    return lead * hyp2f1_terminating(-static_cast<long>(n), b, c, Rational((1 - x) / 2));
}

Rational hyp2f1_terminating(long neg_n, const Rational& b, const Rational& c, const Rational& z) {
    return hyp2f1_series<Rational>(neg_n, b, c, z);
}

double hyp2f1_terminating(long neg_n, double b, double c, double z) {
    return hyp2f1_series<double>(neg_n, b, c, z);
}

Integer q_number(HalfInteger n, long k) {
    const long twice = n.twice();
    if (twice < 0) throw InvalidArgument("q_number: n must be non-negative");
    if (k < -1 || k > twice) throw InvalidArgument("q_number: k outside [-1, 2n]");
    if (k == -1) return 0;
    const Integer c = binomial(twice - k, k);
    if (c == 0) return 0;
    Integer power;
    mpz_ui_pow_ui(power.get_mpz_t(), 2, static_cast<unsigned long>(twice - 2 * k));
    return power * c;
}

Integer q_number_direct(long n, long k) {
    if (n < 0) throw InvalidArgument("q_number_direct: n must be non-negative");
    if (k < -1) throw InvalidArgument("q_number_direct: k must be >= -1");
    Integer sum = 0;
    for (long j = 0; j <= n - k; ++j) sum += binomial(2 * n + 1, 2 * j) * binomial(n - j, k);
    return sum;
}

Integer r_number(long n, long k) {
    if (n < 0) throw InvalidArgument("r_number: n must be non-negative");
    if (k < -1 || k > 2 * n + 1) throw InvalidArgument("r_number: k outside [-1, 2n+1]");
    if (k == -1) return 0;
    const Integer c = binomial(2 * n - k + 1, k);
    if (c == 0) return 0;
    Integer power;
    mpz_ui_pow_ui(power.get_mpz_t(), 2, static_cast<unsigned long>(2 * (n - k) + 1));
    return power * c;
}

Integer r_number_direct(long n, long k) {
    if (n < 0) throw InvalidArgument("r_number_direct: n must be non-negative");
    if (k < -1) throw InvalidArgument("r_number_direct: k must be >= -1");
    Integer sum = 0;
    for (long j = 0; j <= n - k; ++j) sum += binomial(2 * n + 2, 2 * j + 1) * binomial(n - j, k);
    return sum;
}

}  // namespace mcadiff::comb
