#include "mcadiff/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace mcadiff {

namespace {

template <class T>
T ipow(const T& base, unsigned n) {
    T result = 1;
    for (unsigned i = 0; i < n; ++i) result *= base;
    return result;
}

}  // namespace

template <class T>
T Distribution<T>::total() const {
    T sum = 0;
    for (const auto& p : probs) sum += p;
    return sum;
}

template <class T>
T Distribution<T>::mean() const {
    return raw_moment(1);
}

template <class T>
T Distribution<T>::raw_moment(unsigned n) const {
    T sum = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const T x(support_min + static_cast<long>(i));
        sum += ipow(x, n) * probs[i];
    }
    return sum;
}

template <class T>
T Distribution<T>::central_moment(unsigned n) const {
    const T m = mean();
    T sum = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const T dx = T(support_min + static_cast<long>(i)) - m;
        sum += ipow(dx, n) * probs[i];
    }
    return sum;
}

template struct Distribution<double>;
template struct Distribution<Rational>;

double total_variation(const Distribution<double>& a, const Distribution<double>& b) {
    const long lo = std::min(a.support_min, b.support_min);
    const long hi = std::max(a.support_max(), b.support_max());
    double sum = 0.0;
    for (long x = lo; x <= hi; ++x) sum += std::abs(a.at(x) - b.at(x));
    return 0.5 * sum;
}

void write_distribution_csv(std::ostream& out, const Distribution<double>& dist, bool header) {
    if (header) out << "t,x,prob\n";
    const auto old_precision = out.precision(17);
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        out << dist.time << ',' << dist.support_min + static_cast<long>(i) << ',' << dist.probs[i] << '\n';
    }
    out.precision(old_precision);
}

void write_distribution_csv(std::ostream& out, const Distribution<Rational>& dist, bool header) {
    if (header) out << "t,x,prob\n";
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        out << dist.time << ',' << dist.support_min + static_cast<long>(i) << ','
            << to_fraction_string(dist.probs[i]) << '\n';
    }
}

Distribution<double> to_double(const Distribution<Rational>& dist) {
    Distribution<double> out{dist.time, dist.support_min, {}};
    out.probs.reserve(dist.probs.size());
    for (const auto& p : dist.probs) out.probs.push_back(p.get_d());
    return out;
}

}  // namespace mcadiff
