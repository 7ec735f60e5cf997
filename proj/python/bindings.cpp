#include "mcadiff/analytic.hpp"
#include "mcadiff/chain.hpp"
#include "mcadiff/combinatorics.hpp"
#include "mcadiff/errors.hpp"
#include "mcadiff/tracking.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace mcadiff;

namespace {

// Exact values cross the boundary as fractions.Fraction and Python int.
Rational to_rational(const py::handle& value) { return parse_rational(py::str(value).cast<std::string>()); }

py::object to_fraction(const Rational& value) {
    static const py::object fraction = py::module_::import("fractions").attr("Fraction");
    return fraction(to_fraction_string(value));
}

py::object to_int(const Integer& value) {
    return py::reinterpret_steal<py::object>(PyLong_FromString(value.get_str().c_str(), nullptr, 10));
}

py::list fraction_list(const std::vector<Rational>& values) {
    py::list out;
    for (const auto& v : values) out.append(to_fraction(v));
    return out;
}

py::dict moment_dict(const analytic::MomentReport<double>& m) {
    py::dict d;
    d["t"] = m.time;
    d["mean"] = m.mean;
    d["dispersion"] = m.dispersion;
    d["mu1_plus"] = m.mu1_plus;
    d["mu1_minus"] = m.mu1_minus;
    d["mu2_plus"] = m.mu2_plus;
    d["mu2_minus"] = m.mu2_minus;
    return d;
}

py::dict moment_dict(const analytic::MomentReport<Rational>& m) {
    py::dict d;
    d["t"] = m.time;
    d["mean"] = to_fraction(m.mean);
    d["dispersion"] = to_fraction(m.dispersion);
    d["mu1_plus"] = to_fraction(m.mu1_plus);
    d["mu1_minus"] = to_fraction(m.mu1_minus);
    d["mu2_plus"] = to_fraction(m.mu2_plus);
    d["mu2_minus"] = to_fraction(m.mu2_minus);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Margolus-automaton diffusion: exact chain, closed form and simulation";

    // InvalidArgument derives from std::invalid_argument and arrives as ValueError.
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);

    // combinatorics
    m.def("binomial", [](long n, long k) { return to_int(comb::binomial(n, k)); }, py::arg("n"), py::arg("k"));
    m.def(
        "q_number", [](long twice_n, long k) { return to_int(comb::q_number(comb::HalfInteger::from_twice(twice_n), k)); },
        py::arg("twice_n"), py::arg("k"), "Q(n, k) with n given as 2n, so half-integers stay exact.");
    m.def("q_number_direct", [](long n, long k) { return to_int(comb::q_number_direct(n, k)); });
    m.def("r_number", [](long n, long k) { return to_int(comb::r_number(n, k)); });
    m.def("r_number_direct", [](long n, long k) { return to_int(comb::r_number_direct(n, k)); });
    m.def(
        "jacobi", [](unsigned n, unsigned a, unsigned b, double x) { return comb::jacobi(n, a, b, x); }, py::arg("n"),
        py::arg("alpha"), py::arg("beta"), py::arg("x"));
    m.def(
        "jacobi_exact",
        [](unsigned n, unsigned a, unsigned b, py::handle x) { return to_fraction(comb::jacobi(n, a, b, to_rational(x))); },
        py::arg("n"), py::arg("alpha"), py::arg("beta"), py::arg("x"));
    m.def(
        "hyp2f1_terminating",
        [](long neg_n, double b, double c, double z) { return comb::hyp2f1_terminating(neg_n, b, c, z); },
        py::arg("neg_n"), py::arg("b"), py::arg("c"), py::arg("z"));
    m.def(
        "hyp2f1_terminating_exact",
        [](long neg_n, py::handle b, py::handle c, py::handle z) {
            return to_fraction(comb::hyp2f1_terminating(neg_n, to_rational(b), to_rational(c), to_rational(z)));
        },
        py::arg("neg_n"), py::arg("b"), py::arg("c"), py::arg("z"));

    // chain
    m.def(
        "chain_marginal",
        [](double p, int t, double eps) {
            const auto d = chain::marginal(chain::evolve(eps, p, t));
            return py::make_tuple(d.support_min, d.probs);
        },
        py::arg("p"), py::arg("t"), py::arg("eps") = 0.5, "(support_min, probabilities) of P_t(x).");
    m.def(
        "chain_marginal_exact",
        [](py::handle p, int t, py::handle eps) {
            const auto d = chain::marginal(chain::evolve(to_rational(eps), to_rational(p), t));
            return py::make_tuple(d.support_min, fraction_list(d.probs));
        },
        py::arg("p"), py::arg("t"), py::arg("eps") = "1/2");
    m.def(
        "sample_path",
        [](double p, double eps, int t, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            std::vector<std::pair<long, int>> out;
            for (const auto& pt : chain::sample_path(p, eps, t, rng)) out.emplace_back(pt.x, chain::sign(pt.d));
            return out;
        },
        py::arg("p"), py::arg("eps"), py::arg("t"), py::arg("seed"));

    // analytic
    m.def("closed_form_prob", [](int t, long x, double p) { return analytic::closed_form_prob(t, x, p); },
          py::arg("t"), py::arg("x"), py::arg("p"));
    m.def(
        "closed_form_prob_exact", [](int t, long x, py::handle p) { return to_fraction(analytic::closed_form_prob(t, x, to_rational(p))); },
        py::arg("t"), py::arg("x"), py::arg("p"));
    m.def(
        "closed_form_dist",
        [](int t, double p) {
            const auto d = analytic::closed_form_dist(t, p);
            return py::make_tuple(d.support_min, d.probs);
        },
        py::arg("t"), py::arg("p"));
    m.def(
        "closed_form_dist_exact",
        [](int t, py::handle p) {
            const auto d = analytic::closed_form_dist(t, to_rational(p));
            return py::make_tuple(d.support_min, fraction_list(d.probs));
        },
        py::arg("t"), py::arg("p"));
    m.def("variance", [](int t, double p) { return analytic::variance(t, p); }, py::arg("t"), py::arg("p"));
    m.def(
        "variance_exact", [](int t, py::handle p) { return to_fraction(analytic::variance(t, to_rational(p))); },
        py::arg("t"), py::arg("p"));
    m.def(
        "directional_moments", [](int t, double p) { return moment_dict(analytic::directional_moments(t, p)); },
        py::arg("t"), py::arg("p"));
    m.def(
        "directional_moments_exact",
        [](int t, py::handle p) { return moment_dict(analytic::directional_moments(t, to_rational(p))); },
        py::arg("t"), py::arg("p"));
    m.def(
        "pgf_eval",
        [](double z, int t, double p) {
            const auto g = analytic::pgf_eval(z, t, p);
            return py::make_tuple(g.plus, g.minus);
        },
        py::arg("z"), py::arg("t"), py::arg("p"));
    m.def("diffusion_coefficient", py::overload_cast<double>(&analytic::diffusion_coefficient), py::arg("p"));
    m.def(
        "calibrate_p",
        [](double dc) {
            const auto c = analytic::calibrate_p(dc);
            return py::make_tuple(c.p, c.realizable);
        },
        py::arg("target_dc"), "(p, realizable) with D_c(p) = target_dc.");
    m.def("type2_diffusion_coefficient", &analytic::type2_diffusion_coefficient, py::arg("ps"));
    m.def("type2_dispersion", &analytic::type2_dispersion, py::arg("t"), py::arg("ps"));
    m.def("normal_pdf", &analytic::normal_pdf, py::arg("x"), py::arg("t"), py::arg("p"));
    m.def("tv_distance_to_normal", &analytic::tv_distance_to_normal, py::arg("t"), py::arg("p"));
    m.def("regression_p", &analytic::regression_p, py::arg("r"));
    m.def("xi_to_p", &analytic::xi_to_p, py::arg("xi"));

    // automaton
    py::class_<mca::RuleParams>(m, "RuleParams")
        .def_static("type1", &mca::RuleParams::type1, py::arg("p"))
        .def_static("type2", &mca::RuleParams::type2, py::arg("ps"))
        .def_property_readonly("variant",
                               [](const mca::RuleParams& r) { return r.variant == mca::Variant::Type1 ? "type1" : "type2"; })
        .def_readonly("p", &mca::RuleParams::p)
        .def_readonly("ps", &mca::RuleParams::ps);

    py::class_<mca::Grid>(m, "Grid")
        .def(py::init<int, int, int, std::uint64_t, double, double>(), py::arg("width"), py::arg("height"),
             py::arg("layers") = 1, py::arg("seed") = 0, py::arg("dx") = 1.0, py::arg("dt") = 1.0)
        .def_static(
            "random",
            [](int width, int height, std::vector<double> densities, std::uint64_t seed) {
                mca::GridConfig cfg;
                cfg.width = width;
                cfg.height = height;
                cfg.seed = seed;
                for (double d : densities) cfg.layers.emplace_back(d);
                return mca::new_grid(cfg);
            },
            py::arg("width"), py::arg("height"), py::arg("densities"), py::arg("seed"))
        .def_static(
            "from_text",
            [](const std::string& text, std::uint64_t seed) {
                std::istringstream in(text);
                return mca::read_grid(in, seed);
            },
            py::arg("text"), py::arg("seed") = 0)
        .def_property_readonly("width", &mca::Grid::width)
        .def_property_readonly("height", &mca::Grid::height)
        .def_property_readonly("layers", &mca::Grid::layers)
        .def_property_readonly("time", &mca::Grid::time)
        .def_property_readonly("seed", &mca::Grid::seed)
        .def("get", &mca::Grid::get, py::arg("layer"), py::arg("col"), py::arg("row"))
        .def("set", &mca::Grid::set, py::arg("layer"), py::arg("col"), py::arg("row"), py::arg("value") = true)
        .def("count", &mca::Grid::count, py::arg("layer") = 0)
        .def(
            "step",
            [](mca::Grid& g, const std::vector<mca::RuleParams>& rules, unsigned threads) { mca::step(g, rules, threads); },
            py::arg("rules"), py::arg("threads") = 1, "One step; one rule per layer.")
        .def("to_text",
             [](const mca::Grid& g) {
                 std::ostringstream out;
                 mca::write_grid(out, g);
                 return out.str();
             })
        .def("__eq__", [](const mca::Grid& a, const mca::Grid& b) { return a == b; });

    m.def(
        "track_particle",
        [](mca::Grid& grid, const mca::RuleParams& rule, int steps, int layer, const std::string& engine) {
            if (engine != "full" && engine != "block") throw InvalidArgument("engine must be 'block' or 'full'");
            const auto e = engine == "full" ? mca::Engine::FullGrid : mca::Engine::OccupiedBlock;
            std::vector<py::tuple> out;
            for (const auto& p : mca::track_particle(grid, rule, steps, layer, e).points) {
                out.push_back(py::make_tuple(p.t, p.col, p.row, p.x, p.d));
            }
            return out;
        },
        py::arg("grid"), py::arg("rule"), py::arg("steps"), py::arg("layer") = 0, py::arg("engine") = "block",
        "List of (t, col, row, x, d).");

    py::class_<mca::DispersionSeries>(m, "DispersionSeries")
        .def_readonly("steps", &mca::DispersionSeries::steps)
        .def_readonly("trials", &mca::DispersionSeries::trials)
        .def_readonly("seed", &mca::DispersionSeries::seed)
        .def_readonly("endpoint_counts", &mca::DispersionSeries::endpoint_counts)
        .def("mean", &mca::DispersionSeries::mean, py::arg("t"))
        .def("dispersion", &mca::DispersionSeries::dispersion, py::arg("t"))
        .def("standard_error", &mca::DispersionSeries::standard_error, py::arg("t"));

    m.def(
        "ensemble_dispersion",
        [](const mca::RuleParams& rule, int steps, long trials, std::uint64_t seed, unsigned threads, int width,
           int height, int batches) {
            mca::EnsembleOptions options;
            options.threads = threads;
            options.width = width;
            options.height = height;
            options.batches = batches;
            py::gil_scoped_release release;
            return mca::ensemble_dispersion(rule, steps, trials, seed, options);
        },
        py::arg("rule"), py::arg("steps"), py::arg("trials"), py::arg("seed"), py::arg("threads") = 1,
        py::arg("width") = 0, py::arg("height") = 0, py::arg("batches") = 100);

    m.def(
        "estimate_diffusion",
        [](const mca::DispersionSeries& series, int fit_from, int fit_to, double dx, double dt) {
            const auto e = mca::estimate_diffusion(series, {fit_from, fit_to}, dx, dt);
            py::dict d;
            d["k"] = e.k;
            d["ci_low"] = e.ci_low;
            d["ci_high"] = e.ci_high;
            d["window"] = py::make_tuple(e.window.from, e.window.to);
            d["dx"] = e.dx;
            d["dt"] = e.dt;
            d["seed"] = e.seed;
            return d;
        },
        py::arg("series"), py::arg("fit_from"), py::arg("fit_to"), py::arg("dx") = 1.0, py::arg("dt") = 1.0);
}
