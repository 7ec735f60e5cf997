#pragma once

// Closed-form displacement law of the tagged particle for the symmetric start
// P_0(0, +1) = P_0(0, -1) = 1/2, its generating function and moments, and the derived
// diffusion coefficients of both automaton variants.

#include "mcadiff/distribution.hpp"
#include "mcadiff/rational.hpp"

namespace mcadiff::analytic {

struct ClosedFormOptions {
    /// Floating evaluation for p > 1/2 goes through exact arithmetic (the series alternate
    /// in sign there); beyond this t it is refused with DomainError.
    int max_exact_fallback_t = 200;
};

/// P_t(x). Interior points are summed from series whose terms are all non-negative for
/// p <= 1/2; p == 1/2 uses the binomial constants; |x| == t gives p^t / 2.
Rational closed_form_prob(int t, long x, const Rational& p);
double closed_form_prob(int t, long x, double p, const ClosedFormOptions& options = {});

/// P_t(x) from the Jacobi-polynomial representation, evaluated exactly. Undefined at
/// p == 1/2 (the polynomial argument diverges) and rejected there.
Rational closed_form_prob_jacobi(int t, long x, const Rational& p);

/// P_t(x) at p == 1/2 from the binomial constants.
Rational closed_form_prob_half(int t, long x);

/// The full law over [-t, t].
Distribution<Rational> closed_form_dist(int t, const Rational& p);
Distribution<double> closed_form_dist(int t, double p, const ClosedFormOptions& options = {});

/// Dispersion D_{X_t} = p^2/(2(1-p)^2) (-1 + 2(1-p)t/p + (2p-1)^t). The mean is 0.
Rational variance(int t, const Rational& p);
double variance(int t, double p);

template <class T>
struct MomentReport {
    int time = 0;
    T mean{};
    T dispersion{};
    T mu1_plus{};
    T mu1_minus{};
    T mu2_plus{};
    T mu2_minus{};
};

/// First and second raw moments of X_t restricted to each direction, plus mean and
/// dispersion of the marginal.
MomentReport<Rational> directional_moments(int t, const Rational& p);
MomentReport<double> directional_moments(int t, double p);

/// Quantities of the 2x2 generating-function recursion g_{t+1}(z) = b(z) g_t(z).
struct PgfKernel {
    double p = 0.0;
    double z = 0.0;
    double q = 0.0;        // p (z + 1/z)
    double m = 0.0;        // sqrt(p^2 (z + 1/z)^2 - 8p + 4), principal root
    double r = 0.0;        // p (z - 1/z)
    double lambda1 = 0.0;  // (q + m) / 2
    double lambda2 = 0.0;  // (q - m) / 2
};

/// Throws DomainError for z <= 0 or when m(z) would be imaginary.
PgfKernel make_pgf_kernel(double z, double p);

struct PgfValue {
    double plus = 0.0;
    double minus = 0.0;
    double total() const { return plus + minus; }
};

/// G_t^+(z) and G_t^-(z) from the eigen-decomposition of b(z).
PgfValue pgf_eval(double z, int t, double p);

/// Asymptotic slope D_c(p) = p / (2(1 - p)), in cell^2 per step.
double diffusion_coefficient(double p);
Rational diffusion_coefficient(const Rational& p);

/// True when the rotation probability can be realized by the automaton (p <= 1/2).
inline bool is_realizable(double p) { return p > 0.0 && p <= 0.5; }

struct Calibration {
    double p = 0.0;
    bool realizable = true;
};

/// Inverse of diffusion_coefficient: p = 2D / (1 + 2D).
Calibration calibrate_p(double target_dc);

/// Type-2 automaton (p = 1/2 with pairs of steps skipped with probability ps).
double type2_diffusion_coefficient(double ps);
double type2_dispersion(int t, double ps);

/// Gaussian density with the asymptotic dispersion t p / (1 - p).
double normal_pdf(double x, int t, double p);

/// (1/2) sum_{x=-t}^{t} |P_t(x) - f_t(x)|.
double tv_distance_to_normal(int t, double p);

/// True if P(x) increases somewhere on x >= 0 (beyond a 1e-15 tolerance).
bool nonmonotone_on_nonnegative(const Distribution<double>& dist);

/// Empirical quadratic model p = -0.35 r^2 + 0.86 r with r = D_c(p) / D_c(1/2).
double regression_p(double r);

/// Rotation probability equivalent to rotating a fraction xi of integer-valued cells.
double xi_to_p(double xi);

}  // namespace mcadiff::analytic
