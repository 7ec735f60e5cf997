#include "mcadiff/analytic.hpp"

#include "mcadiff/combinatorics.hpp"
#include "mcadiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace mcadiff::analytic {

namespace {

template <class T>
void require_open_probability(const T& p, const char* what) {
    if (!(p > 0 && p < 1)) throw InvalidArgument(std::string(what) + ": p must lie in (0, 1)");
}

void require_time(int t, const char* what) {
    if (t < 0) throw InvalidArgument(std::string(what) + ": t must be non-negative");
}

// One summand group of an interior probability:
//
//   scale * p^p_power * C(binom_n, binom_k) * S(m, b, c, e)
//
//   S(m, b, c, e) = sum_{k=0}^{m} C(m, k) (b)_k / (c)_k  p^{2k} (1-2p)^{e-k},   e >= m
//
// Every term of S is non-negative for p <= 1/2, and at p = 1/2 only k = e survives.
struct SeriesPiece {
    bool half_scale;  // scale is 1/2, otherwise (1 - p)
    long p_power;
    long binom_n;
    long binom_k;
    long m;
    long b;
    long c;
    long e;
};

// Interior points 0 <= x < t, t >= 1, as a sum of at most two pieces.
std::vector<SeriesPiece> interior_pieces(int t, long x) {
    const long n = t / 2;
    if (t % 2 == 1) {
        if (x % 2 == 0) {
            const long j = x / 2;
            return {{false, 2 * j, j + n, 2 * j, n - j, 1 + j + n, 1 + 2 * j, n - j}};
        }
        const long j = (x - 1) / 2;
        return {{true, 2 * j + 1, j + n, 2 * j + 1, n - j - 1, 1 + j + n, 2 + 2 * j, n - j},
                {true, 2 * j + 1, j + n + 1, 2 * j + 1, n - j, 2 + j + n, 2 + 2 * j, n - j}};
    }
    if (x % 2 == 0) {
        const long j = x / 2;
        return {{true, 2 * j, j + n, 2 * j, n - j, 1 + j + n, 1 + 2 * j, n - j},
                {true, 2 * j, n + j - 1, 2 * j, n - j - 1, j + n, 1 + 2 * j, n - j}};
    }
    const long j = (x - 1) / 2;
    return {{false, 2 * j + 1, j + n, 2 * j + 1, n - j - 1, 1 + j + n, 2 + 2 * j, n - j - 1}};
}

Rational exact_piece(const SeriesPiece& piece, const Rational& p) {
    const Rational p2 = p * p;
    const Rational one_minus_2p = 1 - 2 * p;

    Rational coef = 1;  // C(m, k) (b)_k / (c)_k
    Rational sum = 0;
    for (long k = 0; k <= piece.m; ++k) {
        sum += coef * pow(p2, static_cast<unsigned long>(k)) *
               pow(one_minus_2p, static_cast<unsigned long>(piece.e - k));
        coef *= ratio((piece.m - k) * (piece.b + k), (k + 1) * (piece.c + k));
    }
    const Rational scale = piece.half_scale ? ratio(1, 2) : Rational(1 - p);
    return scale * pow(p, static_cast<unsigned long>(piece.p_power)) *
           Rational(comb::binomial(piece.binom_n, piece.binom_k)) * sum;
}

// log(k!) for k = 0..n, accumulated in extended precision.
class LogFactorials {
public:
    explicit LogFactorials(long n) : table_(static_cast<std::size_t>(std::max(n, 1L)) + 1, 0.0) {
        long double acc = 0.0L;
        for (std::size_t k = 2; k < table_.size(); ++k) {
            acc += std::log(static_cast<long double>(k));
            table_[k] = static_cast<double>(acc);
        }
    }
    double operator()(long k) const { return table_[static_cast<std::size_t>(k)]; }
    double choose(long n, long k) const { return (*this)(n) - (*this)(k) - (*this)(n - k); }

private:
    std::vector<double> table_;
};

double log_sum_exp(const std::vector<double>& logs) {
    if (logs.empty()) return -std::numeric_limits<double>::infinity();
    const double top = *std::max_element(logs.begin(), logs.end());
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double v : logs) sum += std::exp(v - top);
    return top + std::log(sum);
}

// Requires 0 < p < 1/2.
double floating_interior(int t, long x, double p, const LogFactorials& lf) {
    const double log_p = std::log(p);
    const double log_1m2p = std::log1p(-2.0 * p);
    const double log_1mp = std::log1p(-p);
    std::vector<double> logs;
    for (const SeriesPiece& piece : interior_pieces(t, x)) {
        if (piece.m < 0) continue;
        const double head = (piece.half_scale ? -std::numbers::ln2 : log_1mp) +
                            static_cast<double>(piece.p_power) * log_p + lf.choose(piece.binom_n, piece.binom_k);
        for (long k = 0; k <= piece.m; ++k) {
            const double coef = lf.choose(piece.m, k) + lf(piece.b + k - 1) - lf(piece.b - 1) -
                                lf(piece.c + k - 1) + lf(piece.c - 1);
            logs.push_back(head + coef + 2.0 * static_cast<double>(k) * log_p +
                           static_cast<double>(piece.e - k) * log_1m2p);
        }
    }
    return std::exp(log_sum_exp(logs));
}

Rational half_pow2(long exponent) {
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(exponent));
    return Rational(Integer(1), den);
}

}  // namespace

Rational closed_form_prob_half(int t, long x) {
    require_time(t, "closed_form_prob_half");
    x = std::abs(x);
    if (x > t) return 0;
    if (t == 0) return 1;
    if (x == t) return half_pow2(t + 1);
    const long n = t / 2;
    if (t % 2 == 1) {
        if (x % 2 == 0) return half_pow2(2 * n + 1) * Rational(comb::binomial(2 * n, x / 2 + n));
        return half_pow2(2 * n + 2) * Rational(comb::binomial(2 * n + 1, (x - 1) / 2 + n + 1));
    }
    if (x % 2 == 0) return half_pow2(2 * n + 1) * Rational(comb::binomial(2 * n, x / 2 + n));
    return half_pow2(2 * n) * Rational(comb::binomial(2 * n - 1, (x - 1) / 2 + n));
}

Rational closed_form_prob(int t, long x, const Rational& p) {
    require_open_probability(p, "closed_form_prob");
    require_time(t, "closed_form_prob");
    x = std::abs(x);
    if (x > t) return 0;
    if (t == 0) return 1;
    if (x == t) return Rational(pow(p, static_cast<unsigned long>(t)) / 2);
    if (p == ratio(1, 2)) return closed_form_prob_half(t, x);

    Rational sum = 0;
    for (const SeriesPiece& piece : interior_pieces(t, x)) {
        if (piece.m >= 0) sum += exact_piece(piece, p);
    }
    return sum;
}

double closed_form_prob(int t, long x, double p, const ClosedFormOptions& options) {
    require_open_probability(p, "closed_form_prob");
    require_time(t, "closed_form_prob");
    x = std::abs(x);
    if (x > t) return 0.0;
    if (t == 0) return 1.0;
    if (x == t) return 0.5 * std::pow(p, t);
    if (p == 0.5) return closed_form_prob_half(t, x).get_d();
    if (p > 0.5) {
        if (t > options.max_exact_fallback_t) {
            throw DomainError("closed_form_prob: floating evaluation for p > 1/2 is limited to t <= " +
                              std::to_string(options.max_exact_fallback_t));
        }
        return closed_form_prob(t, x, Rational(p)).get_d();
    }
    const LogFactorials lf(t + 2);
    return floating_interior(t, x, p, lf);
}

Rational closed_form_prob_jacobi(int t, long x, const Rational& p) {
    require_open_probability(p, "closed_form_prob_jacobi");
    require_time(t, "closed_form_prob_jacobi");
    if (p == ratio(1, 2)) throw DomainError("closed_form_prob_jacobi: undefined at p = 1/2");
    x = std::abs(x);
    if (x > t) return 0;
    if (t == 0) return 1;
    if (x == t) return Rational(pow(p, static_cast<unsigned long>(t)) / 2);

    const Rational one_minus_p = 1 - p;
    const Rational one_minus_2p = 1 - 2 * p;
    const Rational arg = 2 * p * p / one_minus_2p + 1;
    // (1-2p)^e for a possibly negative e
    const auto power_1m2p = [&](long e) {
        return e >= 0 ? pow(one_minus_2p, static_cast<unsigned long>(e))
                      : Rational(1 / pow(one_minus_2p, static_cast<unsigned long>(-e)));
    };
    const auto upow = [&](long e) { return pow(p, static_cast<unsigned long>(e)); };

    const long n = t / 2;
    if (t % 2 == 1) {
        if (x % 2 == 0) {
            const long j = x / 2;
            return one_minus_p * upow(2 * j) * power_1m2p(n - j) *
                   comb::jacobi(static_cast<unsigned>(n - j), static_cast<unsigned>(2 * j), 0, arg);
        }
        const long j = (x - 1) / 2;
        return one_minus_p * one_minus_p * upow(2 * j + 1) * power_1m2p(n - j - 1) *
               ratio(2 * n + 1, 2 * (n - j)) *
               comb::jacobi(static_cast<unsigned>(n - j - 1), static_cast<unsigned>(2 * j + 1), 1, arg);
    }
    if (x % 2 == 0) {
        const long j = x / 2;
        return one_minus_p * one_minus_p * upow(2 * j) * power_1m2p(n - j - 1) * ratio(n, n - j) *
               comb::jacobi(static_cast<unsigned>(n - j - 1), static_cast<unsigned>(2 * j), 1, arg);
    }
    const long j = (x - 1) / 2;
    return one_minus_p * upow(2 * j + 1) * power_1m2p(n - j - 1) *
           comb::jacobi(static_cast<unsigned>(n - j - 1), static_cast<unsigned>(2 * j + 1), 0, arg);
}

Distribution<Rational> closed_form_dist(int t, const Rational& p) {
    require_open_probability(p, "closed_form_dist");
    require_time(t, "closed_form_dist");
    Distribution<Rational> dist{t, -static_cast<long>(t), std::vector<Rational>(2 * static_cast<std::size_t>(t) + 1)};
    for (long x = 0; x <= t; ++x) {
        const Rational value = closed_form_prob(t, x, p);
        dist.probs[static_cast<std::size_t>(t + x)] = value;
        dist.probs[static_cast<std::size_t>(t - x)] = value;
    }
    return dist;
}

Distribution<double> closed_form_dist(int t, double p, const ClosedFormOptions& options) {
    require_open_probability(p, "closed_form_dist");
    require_time(t, "closed_form_dist");
    if (p >= 0.5) {
        if (p > 0.5 && t > options.max_exact_fallback_t) {
            throw DomainError("closed_form_dist: floating evaluation for p > 1/2 is limited to t <= " +
                              std::to_string(options.max_exact_fallback_t));
        }
        return to_double(closed_form_dist(t, Rational(p)));
    }
    Distribution<double> dist{t, -static_cast<long>(t), std::vector<double>(2 * static_cast<std::size_t>(t) + 1)};
    const LogFactorials lf(t + 2);
    for (long x = 0; x <= t; ++x) {
        double value;
        if (t == 0) {
            value = 1.0;
        } else if (x == t) {
            value = 0.5 * std::pow(p, t);
        } else {
            value = floating_interior(t, x, p, lf);
        }
        dist.probs[static_cast<std::size_t>(t + x)] = value;
        dist.probs[static_cast<std::size_t>(t - x)] = value;
    }
    return dist;
}

namespace {

template <class T>
T transient_factor(int t, const T& p) {
    // -1 + 2(1-p)t/p + (2p-1)^t
    T power = 1;
    const T base = 2 * p - 1;
    for (int i = 0; i < t; ++i) power *= base;
    return T(-1) + T(2) * (T(1) - p) * T(t) / p + power;
}

template <class T>
MomentReport<T> moments_impl(int t, const T& p) {
    require_open_probability(p, "directional_moments");
    require_time(t, "directional_moments");
    T power = 1;
    const T base = 2 * p - 1;
    for (int i = 0; i < t; ++i) power *= base;

    const T one_minus_p = 1 - p;
    const T dispersion = p * p / (T(2) * one_minus_p * one_minus_p) * transient_factor(t, p);
    MomentReport<T> report;
    report.time = t;
    report.mean = 0;
    report.dispersion = dispersion;
    report.mu1_plus = p / (T(4) * one_minus_p) * (T(1) - power);
    report.mu1_minus = -report.mu1_plus;
    report.mu2_plus = dispersion / T(2);
    report.mu2_minus = report.mu2_plus;
    return report;
}

}  // namespace

Rational variance(int t, const Rational& p) { return moments_impl<Rational>(t, p).dispersion; }
double variance(int t, double p) { return moments_impl<double>(t, p).dispersion; }

MomentReport<Rational> directional_moments(int t, const Rational& p) { return moments_impl<Rational>(t, p); }
MomentReport<double> directional_moments(int t, double p) { return moments_impl<double>(t, p); }

PgfKernel make_pgf_kernel(double z, double p) {
    require_open_probability(p, "pgf");
    if (!(z > 0.0)) throw DomainError("pgf: z must be positive");
    PgfKernel k;
    k.p = p;
    k.z = z;
    k.q = p * (z + 1.0 / z);
    const double disc = k.q * k.q - 8.0 * p + 4.0;
    if (disc < 0.0) throw DomainError("pgf: m(z) is imaginary at this z");
    k.m = std::sqrt(disc);
    if (k.m == 0.0) throw DomainError("pgf: m(z) vanishes, eigenvalues coincide");
    k.r = p * (z - 1.0 / z);
    k.lambda1 = 0.5 * (k.q + k.m);
    k.lambda2 = 0.5 * (k.q - k.m);
    return k;
}

PgfValue pgf_eval(double z, int t, double p) {
    require_time(t, "pgf_eval");
    const PgfKernel k = make_pgf_kernel(z, p);
    const double l1t = std::pow(k.lambda1, t);
    const double l2t = std::pow(k.lambda2, t);
    const double diff = l1t - l2t;
    PgfValue v;
    v.plus = (-l1t * k.lambda2 + k.lambda1 * l2t + (1.0 - p + p * z) * diff) / (2.0 * k.m);
    v.minus = (l1t * k.lambda1 - l2t * k.lambda2 + (1.0 - p - p * z) * diff) / (2.0 * k.m);
    return v;
}

double diffusion_coefficient(double p) {
    require_open_probability(p, "diffusion_coefficient");
    return 0.5 * p / (1.0 - p);
}

Rational diffusion_coefficient(const Rational& p) {
    require_open_probability(p, "diffusion_coefficient");
    return Rational(p / (2 * (1 - p)));
}

Calibration calibrate_p(double target_dc) {
    if (!(target_dc > 0.0) || !std::isfinite(target_dc)) {
        throw InvalidArgument("calibrate_p: target diffusion coefficient must be positive");
    }
    Calibration c;
    c.p = 2.0 * target_dc / (1.0 + 2.0 * target_dc);
    c.realizable = is_realizable(c.p);
    return c;
}

double type2_diffusion_coefficient(double ps) {
    if (!(ps >= 0.0 && ps <= 1.0)) throw InvalidArgument("type2_diffusion_coefficient: ps must lie in [0, 1]");
    return (1.0 - ps) * diffusion_coefficient(0.5);
}

double type2_dispersion(int t, double ps) {
    if (!(ps >= 0.0 && ps <= 1.0)) throw InvalidArgument("type2_dispersion: ps must lie in [0, 1]");
    return (1.0 - ps) * variance(t, 0.5);
}

double normal_pdf(double x, int t, double p) {
    require_open_probability(p, "normal_pdf");
    if (t < 1) throw InvalidArgument("normal_pdf: t must be positive");
    const double tp = static_cast<double>(t) * p;
    return std::sqrt((1.0 - p) / (2.0 * std::numbers::pi * tp)) * std::exp(-(1.0 - p) * x * x / (2.0 * tp));
}

double tv_distance_to_normal(int t, double p) {
    if (t < 1) throw InvalidArgument("tv_distance_to_normal: t must be positive");
    const Distribution<double> dist = closed_form_dist(t, p);
    double sum = 0.0;
    for (long x = -t; x <= t; ++x) sum += std::abs(dist.at(x) - normal_pdf(static_cast<double>(x), t, p));
    return 0.5 * sum;
}

bool nonmonotone_on_nonnegative(const Distribution<double>& dist) {
    for (long x = std::max(0L, dist.support_min); x < dist.support_max(); ++x) {
        if (dist.at(x + 1) > dist.at(x) + 1e-15) return true;
    }
    return false;
}

double regression_p(double r) {
    if (!(r >= 0.0)) throw InvalidArgument("regression_p: r must be non-negative");
    return -0.35 * r * r + 0.86 * r;
}

double xi_to_p(double xi) {
    if (!(xi > 0.0 && xi <= 1.0)) throw InvalidArgument("xi_to_p: xi must lie in (0, 1]");
    return 0.5 * xi;
}

}  // namespace mcadiff::analytic
