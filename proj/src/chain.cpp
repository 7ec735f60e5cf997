#include "mcadiff/chain.hpp"

#include "mcadiff/errors.hpp"

#include <string>

namespace mcadiff::chain {

namespace {

template <class T>
void require_open_probability(const T& p, const char* what) {
    if (!(p > 0 && p < 1)) throw InvalidArgument(std::string(what) + ": p must lie in (0, 1)");
}

template <class T>
T ipow(const T& base, unsigned n) {
    T result = 1;
    for (unsigned i = 0; i < n; ++i) result *= base;
    return result;
}

}  // namespace

template <class T>
T ChainState<T>::at(long x, Direction d) const {
    if (x < support_min || x > support_max()) return T(0);
    const auto i = static_cast<std::size_t>(x - support_min);
    return d == Direction::Plus ? probs_plus[i] : probs_minus[i];
}

template <class T>
T ChainState<T>::total() const {
    T sum = 0;
    for (std::size_t i = 0; i < probs_plus.size(); ++i) sum += probs_plus[i] + probs_minus[i];
    return sum;
}

template <class T>
ChainState<T> init(const T& eps) {
    if (!(eps >= 0 && eps <= 1)) throw InvalidArgument("chain::init: eps must lie in [0, 1]");
    ChainState<T> state;
    state.probs_plus = {eps};
    state.probs_minus = {T(1 - eps)};
    return state;
}

template <class T>
ChainState<T> step(const ChainState<T>& state, const T& p) {
    require_open_probability(p, "chain::step");
    const T q = 1 - p;
    const std::size_t n = state.probs_plus.size();

    ChainState<T> next;
    next.time = state.time + 1;
    next.support_min = state.support_min - 1;
    next.probs_plus.assign(n + 2, T(0));
    next.probs_minus.assign(n + 2, T(0));

    // Old index i holds x = support_min + i, which is new index i + 1.
    for (std::size_t i = 0; i < n; ++i) {
        const T& plus = state.probs_plus[i];
        const T& minus = state.probs_minus[i];
        next.probs_plus[i + 2] += p * plus;   // x -> x + 1, keep +1
        next.probs_minus[i + 1] += q * plus;  // stay, flip to -1
        next.probs_minus[i] += p * minus;     // x -> x - 1, keep -1
        next.probs_plus[i + 1] += q * minus;  // stay, flip to +1
    }
    return next;
}

template <class T>
ChainState<T> evolve(const T& eps, const T& p, int t) {
    if (t < 0) throw InvalidArgument("chain::evolve: t must be non-negative");
    require_open_probability(p, "chain::evolve");
    ChainState<T> state = init(eps);
    for (int i = 0; i < t; ++i) state = step(state, p);
    return state;
}

template <class T>
Distribution<T> marginal(const ChainState<T>& state) {
    Distribution<T> dist;
    dist.time = state.time;
    dist.support_min = state.support_min;
    dist.probs.reserve(state.probs_plus.size());
    for (std::size_t i = 0; i < state.probs_plus.size(); ++i) {
        dist.probs.push_back(state.probs_plus[i] + state.probs_minus[i]);
    }
    return dist;
}

template <class T>
T raw_moment(const ChainState<T>& state, unsigned n, std::optional<Direction> direction) {
    if (n == 0) throw InvalidArgument("chain::raw_moment: n must be positive");
    if (!direction) {
        const Distribution<T> dist = marginal(state);
        return n == 2 ? dist.central_moment(2) : dist.raw_moment(n);
    }
    const auto& probs = *direction == Direction::Plus ? state.probs_plus : state.probs_minus;
    T sum = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        sum += ipow(T(state.support_min + static_cast<long>(i)), n) * probs[i];
    }
    return sum;
}

Trajectory sample_path(double p, double eps, int t, std::mt19937_64& rng) {
    require_open_probability(p, "chain::sample_path");
    if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("chain::sample_path: eps must lie in [0, 1]");
    if (t < 0) throw InvalidArgument("chain::sample_path: t must be non-negative");

    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Trajectory path;
    path.reserve(static_cast<std::size_t>(t) + 1);
    PathPoint cur{0, uniform(rng) < eps ? Direction::Plus : Direction::Minus};
    path.push_back(cur);
    for (int i = 0; i < t; ++i) {
        if (uniform(rng) < p) {
            cur.x += sign(cur.d);
        } else {
            cur.d = flip(cur.d);
        }
        path.push_back(cur);
    }
    return path;
}

#define MCADIFF_INSTANTIATE(T)                                                           \
    template struct ChainState<T>;                                                       \
    template ChainState<T> init(const T&);                                               \
    template ChainState<T> step(const ChainState<T>&, const T&);                         \
    template ChainState<T> evolve(const T&, const T&, int);                              \
    template Distribution<T> marginal(const ChainState<T>&);                             \
    template T raw_moment(const ChainState<T>&, unsigned, std::optional<Direction>);

MCADIFF_INSTANTIATE(double)
MCADIFF_INSTANTIATE(Rational)

#undef MCADIFF_INSTANTIATE

}  // namespace mcadiff::chain
