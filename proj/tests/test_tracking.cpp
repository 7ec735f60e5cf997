#include "mcadiff/analytic.hpp"
#include "mcadiff/errors.hpp"
#include "mcadiff/tracking.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

using namespace mcadiff;
using namespace mcadiff::mca;

namespace {

Grid lone(int w, int h, int col, int row, std::uint64_t seed) {
    Grid g(w, h, 1, seed);
    g.set(0, col, row, true);
    return g;
}

ParticleTrace parse_trace(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    ParticleTrace trace;
    while (std::getline(in, line)) {
        TracePoint p;
        char c = 0;
        std::istringstream ls(line);
        ls >> p.t >> c >> p.col >> c >> p.row >> c >> p.x >> c >> p.d;
        trace.points.push_back(p);
    }
    return trace;
}

}  // namespace

TEST_CASE("direction parity") {
    CHECK(direction_at(0, 0) == 1);
    CHECK(direction_at(1, 0) == -1);
    CHECK(direction_at(1, 1) == 1);
    CHECK(direction_at(0, 1) == -1);
}

TEST_CASE("traces follow the chain transitions") {
    std::mt19937_64 rng(1);
    for (const auto& rule : {RuleParams::type1(0.1), RuleParams::type1(1.0 / 3.0), RuleParams::type1(0.5),
                             RuleParams::type2(0.4)}) {
        for (int trial = 0; trial < 200; ++trial) {
            Grid g = lone(12, 10, static_cast<int>(rng() % 12), static_cast<int>(rng() % 10), rng());
            const auto trace = track_particle(g, rule, 40);
            REQUIRE(trace.points.size() == 41);
            CHECK(trace.points[0].x == 0);
            for (std::size_t i = 1; i < trace.points.size(); ++i) {
                const auto& a = trace.points[i - 1];
                const auto& b = trace.points[i];
                const long dx = b.x - a.x;
                REQUIRE(std::abs(dx) <= 1);
                REQUIRE(b.t == a.t + 1);
                if (dx == 0) {
                    REQUIRE(b.d == -a.d);
                } else {
                    REQUIRE(dx == a.d);
                    REQUIRE(b.d == a.d);
                }
            }
        }
    }
}

TEST_CASE("traced move frequency equals p") {
    // The chain moves in direction d with probability p, whatever (x, d) is.
    for (const double p : {0.1, 0.25, 0.5}) {
        long moves = 0, total = 0;
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 2000; ++trial) {
            Grid g = lone(16, 16, static_cast<int>(rng() % 16), static_cast<int>(rng() % 16), rng());
            const auto trace = track_particle(g, RuleParams::type1(p), 50);
            for (std::size_t i = 1; i < trace.points.size(); ++i) {
                moves += trace.points[i].x != trace.points[i - 1].x;
                ++total;
            }
        }
        const double freq = static_cast<double>(moves) / static_cast<double>(total);
        const double se = std::sqrt(p * (1 - p) / static_cast<double>(total));
        CHECK(std::abs(freq - p) <= 4 * se);
    }
}

TEST_CASE("occupied-block engine equals full-grid stepping") {
    std::mt19937_64 rng(3);
    for (const auto& rule : {RuleParams::type1(0.2), RuleParams::type1(0.5), RuleParams::type2(0.5)}) {
        for (int trial = 0; trial < 100; ++trial) {
            const int w = 2 * static_cast<int>(2 + rng() % 40), h = 2 * static_cast<int>(2 + rng() % 40);
            const int col = static_cast<int>(rng() % static_cast<unsigned>(w));
            const int row = static_cast<int>(rng() % static_cast<unsigned>(h));
            const std::uint64_t seed = rng();
            Grid a = lone(w, h, col, row, seed);
            Grid b = lone(w, h, col, row, seed);
            const auto ta = track_particle(a, rule, 60, 0, Engine::OccupiedBlock);
            const auto tb = track_particle(b, rule, 60, 0, Engine::FullGrid);
            REQUIRE(a == b);
            REQUIRE(ta.points.size() == tb.points.size());
            for (std::size_t i = 0; i < ta.points.size(); ++i) {
                REQUIRE(ta.points[i].col == tb.points[i].col);
                REQUIRE(ta.points[i].row == tb.points[i].row);
                REQUIRE(ta.points[i].x == tb.points[i].x);
            }
        }
    }
}

TEST_CASE("ensemble engines agree") {
    EnsembleOptions block;
    block.batches = 10;
    EnsembleOptions full = block;
    full.engine = Engine::FullGrid;
    const auto a = ensemble_dispersion(RuleParams::type1(0.3), 20, 300, 9, block);
    const auto b = ensemble_dispersion(RuleParams::type1(0.3), 20, 300, 9, full);
    CHECK(a.sum1 == b.sum1);
    CHECK(a.sum2 == b.sum2);
    CHECK(a.sum4 == b.sum4);
    CHECK(a.endpoint_counts == b.endpoint_counts);
}

TEST_CASE("tracking preconditions") {
    Grid empty(8, 8, 1);
    CHECK_THROWS_AS(track_particle(empty, RuleParams::type1(0.3), 5), InvalidArgument);
    Grid two = lone(8, 8, 1, 1, 0);
    two.set(0, 4, 4, true);
    CHECK_THROWS_AS(track_particle(two, RuleParams::type1(0.3), 5), InvalidArgument);
    Grid layered(8, 8, 2);
    layered.set(0, 2, 2, true);
    CHECK_THROWS_AS(track_particle(layered, RuleParams::type1(0.3), 5, 0, Engine::OccupiedBlock), InvalidArgument);
    CHECK_NOTHROW(track_particle(layered, RuleParams::type1(0.3), 5, 0, Engine::FullGrid));
    Grid one = lone(8, 8, 0, 0, 0);
    CHECK_THROWS_AS(track_particle(one, RuleParams::type1(0.3), 5, 1), InvalidArgument);
}

TEST_CASE("endpoint histogram matches the closed form") {
    const auto series = ensemble_dispersion(RuleParams::type1(1.0 / 3.0), 50, 100000, 12345);
    Distribution<double> hist{50, -50, {}};
    for (auto c : series.endpoint_counts) hist.probs.push_back(static_cast<double>(c) / 1e5);
    CHECK(total_variation(hist, analytic::closed_form_dist(50, 1.0 / 3.0)) <= 0.02);
}

TEST_CASE("type-1 at p = 1/2 and type-2 at ps = 0 coincide") {
    const auto a = ensemble_dispersion(RuleParams::type1(0.5), 30, 2000, 5);
    const auto b = ensemble_dispersion(RuleParams::type2(0.0), 30, 2000, 5);
    CHECK(a.endpoint_counts == b.endpoint_counts);
}

TEST_CASE("ensemble dispersion at t = 1") {
    const auto s = ensemble_dispersion(RuleParams::type1(0.25), 1, 100000, 77);
    CHECK(std::abs(s.dispersion(1) - 0.25) <= 3 * s.standard_error(1));
    CHECK(s.dispersion(0) == 0.0);
    CHECK(std::abs(s.mean(1)) <= 0.01);
}

TEST_CASE("type-2 dispersion follows the skip-pair timing") {
    // Step 0 always rotates; afterwards each pair (2i-1, 2i) is frozen with probability ps,
    // giving 1/2 + (1 - ps)(t - 1) for t >= 1.
    for (const double ps : {0.25, 0.5}) {
        const auto s = ensemble_dispersion(RuleParams::type2(ps), 12, 200000, 31);
        for (int t = 1; t <= 12; ++t) {
            const double want = 0.5 + (1.0 - ps) * (t - 1);
            CHECK(std::abs(s.dispersion(t) - want) <= 3.5 * s.standard_error(t));
        }
    }
}

TEST_CASE("type-1 approaches its slope faster than a matched type-2 rule") {
    for (const double dc : {0.15, 0.25, 0.4}) {
        const double p = analytic::calibrate_p(dc).p;
        const double ps = 1.0 - dc / analytic::diffusion_coefficient(0.5);
        const double gap1 = std::abs(analytic::variance(10, p) / (20.0 * dc) - 1.0);
        const double gap2 = std::abs(analytic::type2_dispersion(10, ps) / (20.0 * dc) - 1.0);
        CHECK(gap1 < gap2);
    }
}

TEST_CASE("ensemble preconditions") {
    CHECK_THROWS_AS(ensemble_dispersion(RuleParams::type1(0.3), 10, 99, 1), InvalidArgument);
    CHECK_THROWS_AS(ensemble_dispersion(RuleParams::type1(0.3), 0, 1000, 1), InvalidArgument);
    EnsembleOptions odd;
    odd.width = 7;
    odd.height = 8;
    CHECK_THROWS_AS(ensemble_dispersion(RuleParams::type1(0.3), 10, 1000, 1, odd), InvalidArgument);
}

TEST_CASE("torus size rule") {
    CHECK(auto_torus_size(RuleParams::type1(0.5), 1000) == 190);
    CHECK(auto_torus_size(RuleParams::type1(0.5), 0) == 4);
    CHECK(auto_torus_size(RuleParams::type2(1.0), 1000) == 4);
    for (int t : {1, 10, 100, 1000}) {
        const int side = auto_torus_size(RuleParams::type1(0.2), t);
        CHECK(side % 2 == 0);
        CHECK(side >= 6.0 * std::sqrt(2.0 * analytic::diffusion_coefficient(0.2) * t));
    }
}

TEST_CASE("ensemble results do not depend on the thread count") {
    EnsembleOptions o1, o3;
    o3.threads = 3;
    const auto a = ensemble_dispersion(RuleParams::type2(0.3), 40, 5000, 4242, o1);
    const auto b = ensemble_dispersion(RuleParams::type2(0.3), 40, 5000, 4242, o3);
    CHECK(a.sum1 == b.sum1);
    CHECK(a.sum2 == b.sum2);
    CHECK(a.sum3 == b.sum3);
    CHECK(a.sum4 == b.sum4);
    CHECK(a.endpoint_counts == b.endpoint_counts);
}

TEST_CASE("diffusion estimate") {
    const auto s = ensemble_dispersion(RuleParams::type1(1.0 / 3.0), 400, 20000, 2718);
    const auto est = estimate_diffusion(s, {200, 400});
    CHECK(est.k == doctest::Approx(0.25).epsilon(0.05));
    CHECK(est.ci_low <= est.k);
    CHECK(est.k <= est.ci_high);
    CHECK(est.ci_low <= 0.25);
    CHECK(0.25 <= est.ci_high);
    CHECK(est.seed == 2718);
    CHECK(est.window.from == 200);

    const auto scaled = estimate_diffusion(s, {200, 400}, 2.0, 1.0);
    CHECK(scaled.k == doctest::Approx(4.0 * est.k).epsilon(1e-12));
    CHECK(scaled.ci_low == doctest::Approx(4.0 * est.ci_low).epsilon(1e-12));

    CHECK_THROWS_AS(estimate_diffusion(s, {300, 200}), InvalidArgument);
    CHECK_THROWS_AS(estimate_diffusion(s, {0, 10}), InvalidArgument);
    CHECK_THROWS_AS(estimate_diffusion(s, {10, 401}), InvalidArgument);
}

TEST_CASE("trace csv round trip") {
    Grid g = lone(10, 10, 3, 4, 55);
    const auto trace = track_particle(g, RuleParams::type1(0.4), 25);
    std::ostringstream out;
    write_trace_csv(out, trace);
    CHECK(out.str().rfind("t,col,row,x,d\n", 0) == 0);
    const auto back = parse_trace(out.str());
    REQUIRE(back.points.size() == trace.points.size());
    for (std::size_t i = 0; i < back.points.size(); ++i) {
        CHECK(back.points[i].t == trace.points[i].t);
        CHECK(back.points[i].col == trace.points[i].col);
        CHECK(back.points[i].row == trace.points[i].row);
        CHECK(back.points[i].x == trace.points[i].x);
        CHECK(back.points[i].d == trace.points[i].d);
    }
}

TEST_CASE("series csv") {
    const auto s = ensemble_dispersion(RuleParams::type1(0.5), 3, 100, 1, EnsembleOptions{0, 0, 1, 10});
    std::ostringstream out;
    write_series_csv(out, s);
    const std::string text = out.str();
    CHECK(text.rfind("t,dispersion,stderr\n0,0,0\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
