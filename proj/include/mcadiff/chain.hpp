#pragma once

// Two-dimensional Markov chain (X_t, D_t) of a tagged particle's x-coordinate and the
// direction in which it may move next:
//
//   with probability p:     X_{t+1} = X_t + D_t,  D_{t+1} = D_t
//   with probability 1 - p: X_{t+1} = X_t,        D_{t+1} = -D_t
//
// The exact evolution of the joint law is the reference every other route is checked
// against.

#include "mcadiff/distribution.hpp"
#include "mcadiff/rational.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace mcadiff::chain {

enum class Direction : int { Minus = -1, Plus = 1 };

constexpr int sign(Direction d) { return static_cast<int>(d); }
constexpr Direction flip(Direction d) { return d == Direction::Plus ? Direction::Minus : Direction::Plus; }

/// Joint law P_t(x, d) stored densely over [-t, t].
template <class T>
struct ChainState {
    int time = 0;
    long support_min = 0;
    std::vector<T> probs_plus;
    std::vector<T> probs_minus;

    long support_max() const { return support_min + static_cast<long>(probs_plus.size()) - 1; }
    T at(long x, Direction d) const;
    T total() const;
};

/// P_0(0, +1) = eps, P_0(0, -1) = 1 - eps. Throws InvalidArgument unless 0 <= eps <= 1.
template <class T>
ChainState<T> init(const T& eps);

/// One application of P_{t+1}(x,d) = p P_t(x-d, d) + (1-p) P_t(x, -d). Requires 0 < p < 1.
template <class T>
ChainState<T> step(const ChainState<T>& state, const T& p);

template <class T>
ChainState<T> evolve(const T& eps, const T& p, int t);

/// P_t(x) = P_t(x, +1) + P_t(x, -1).
template <class T>
Distribution<T> marginal(const ChainState<T>& state);

/// With a direction: sum_x x^n P_t(x, d). Without: the n-th raw moment of the marginal,
/// except that n == 2 returns the dispersion (central second moment).
template <class T>
T raw_moment(const ChainState<T>& state, unsigned n, std::optional<Direction> direction = std::nullopt);

struct PathPoint {
    long x;
    Direction d;
};
using Trajectory = std::vector<PathPoint>;

/// Draws a sample path of t steps. The initial direction is +1 with probability eps; each
/// step compares one uniform draw against p.
Trajectory sample_path(double p, double eps, int t, std::mt19937_64& rng);

}  // namespace mcadiff::chain
