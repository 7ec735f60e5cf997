#pragma once

#include "mcadiff/rational.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace mcadiff {

/// Probability vector over the integer positions support_min, support_min + 1, ...
/// at a given time step. T is double (floating mode) or Rational (exact mode).
template <class T>
struct Distribution {
    int time = 0;
    long support_min = 0;
    std::vector<T> probs;

    long support_max() const { return support_min + static_cast<long>(probs.size()) - 1; }

    /// Zero outside the stored support.
    T at(long x) const {
        if (x < support_min || x > support_max()) return T(0);
        return probs[static_cast<std::size_t>(x - support_min)];
    }

    T total() const;
    T mean() const;
    /// sum_x x^n P(x)
    T raw_moment(unsigned n) const;
    /// sum_x (x - mean)^n P(x)
    T central_moment(unsigned n) const;
};

extern template struct Distribution<double>;
extern template struct Distribution<Rational>;

/// Total-variation distance (1/2) sum_x |a(x) - b(x)| over the union of supports.
double total_variation(const Distribution<double>& a, const Distribution<double>& b);

/// CSV rows "t,x,prob". Floating values carry 17 significant digits.
void write_distribution_csv(std::ostream& out, const Distribution<double>& dist, bool header = true);
/// CSV rows "t,x,prob" with prob written as num/den.
void write_distribution_csv(std::ostream& out, const Distribution<Rational>& dist, bool header = true);

/// Converts an exact distribution to floating mode.
Distribution<double> to_double(const Distribution<Rational>& dist);

}  // namespace mcadiff
