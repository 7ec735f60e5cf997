#include "cli.hpp"

#include "mcadiff/analytic.hpp"
#include "mcadiff/chain.hpp"
#include "mcadiff/errors.hpp"
#include "mcadiff/tracking.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

namespace mcadiff::cli {

namespace {

using nlohmann::json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Writes to --out when given, otherwise to the command's stdout.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw IoError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }
    void finish() {
        stream().flush();
        if (!stream()) throw IoError("write failed");
    }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

double parse_double(const std::string& text, const char* flag) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    // Fractions such as "1/3".
    try {
        return parse_rational(text).get_d();
    } catch (const std::exception&) {
        throw InvalidArgument(std::string(flag) + ": cannot parse '" + text + "'");
    }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err << "seed=" << s << '\n';
    return s;
}

void warn_if_unrealizable(double p, std::ostream& err) {
    if (p > 0.5) err << "warning: p=" << p << " > 1/2 cannot be realized by the automaton\n";
}

template <class T>
void write_moment_row(std::ostream& out, int t, const T& mean, const T& var, const T& mu1, const T& mu2) {
    if constexpr (std::is_same_v<T, Rational>) {
        out << t << ',' << to_fraction_string(mean) << ',' << to_fraction_string(var) << ','
            << to_fraction_string(mu1) << ',' << to_fraction_string(mu2) << '\n';
    } else {
        out << std::setprecision(17) << t << ',' << mean << ',' << var << ',' << mu1 << ',' << mu2 << '\n';
    }
}

// ---------------------------------------------------------------------------------------
// chain

struct ChainArgs {
    std::string p;
    std::string eps = "1/2";
    std::vector<int> t{10};
    bool exact = false;
    std::string out;
    std::string moments_out;
};

template <class T>
void run_chain_mode(const ChainArgs& a, const T& p, const T& eps, std::ostream& out) {
    Sink sink(a.out, out);
    std::optional<Sink> moments;
    if (!a.moments_out.empty()) {
        moments.emplace(a.moments_out, out);
        moments->stream() << "t,mean,variance,mu1_plus,mu2_plus\n";
    }
    bool header = true;
    for (int t : a.t) {
        const auto state = chain::evolve(eps, p, t);
        write_distribution_csv(sink.stream(), chain::marginal(state), header);
        header = false;
        if (moments) {
            const T mean = t == 0 ? T(0) : chain::raw_moment(state, 1);
            const T var = t == 0 ? T(0) : chain::raw_moment(state, 2);
            const T mu1 = t == 0 ? T(0) : chain::raw_moment(state, 1, chain::Direction::Plus);
            const T mu2 = t == 0 ? T(0) : chain::raw_moment(state, 2, chain::Direction::Plus);
            write_moment_row(moments->stream(), t, mean, var, mu1, mu2);
        }
    }
    sink.finish();
    if (moments) moments->finish();
}

int cmd_chain(const ChainArgs& a, std::ostream& out) {
    for (int t : a.t) {
        if (t < 0) throw InvalidArgument("--t must be non-negative");
    }
    if (a.exact) {
        run_chain_mode<Rational>(a, parse_rational(a.p), parse_rational(a.eps), out);
    } else {
        run_chain_mode<double>(a, parse_double(a.p, "--p"), parse_double(a.eps, "--eps"), out);
    }
    return kSuccess;
}

// ---------------------------------------------------------------------------------------
// analytic

struct AnalyticArgs {
    std::string p;
    std::vector<int> t{10};
    bool exact = false;
    bool dc = false;
    std::optional<double> calibrate;
    std::optional<double> type2_ps;
    std::string backend = "series";
    std::string out;
    std::string moments_out;
};

int cmd_analytic(const AnalyticArgs& a, std::ostream& out, std::ostream& err) {
    const auto old_precision = out.precision(17);
    if (a.calibrate) {
        const analytic::Calibration c = analytic::calibrate_p(*a.calibrate);
        out << "p=" << c.p << '\n';
        if (!c.realizable) warn_if_unrealizable(c.p, err);
        out.precision(old_precision);
        return kSuccess;
    }
    if (a.type2_ps) {
        out << "dc=" << analytic::type2_diffusion_coefficient(*a.type2_ps) << '\n';
        out.precision(old_precision);
        return kSuccess;
    }
    if (a.p.empty()) throw InvalidArgument("--p is required");
    if (a.dc) {
        if (a.exact) {
            out << "dc=" << to_fraction_string(analytic::diffusion_coefficient(parse_rational(a.p))) << '\n';
        } else {
            const double p = parse_double(a.p, "--p");
            out << "dc=" << analytic::diffusion_coefficient(p) << '\n';
            warn_if_unrealizable(p, err);
        }
        out.precision(old_precision);
        return kSuccess;
    }
    out.precision(old_precision);
    for (int t : a.t) {
        if (t < 0) throw InvalidArgument("--t must be non-negative");
    }

    Sink sink(a.out, out);
    std::optional<Sink> moments;
    if (!a.moments_out.empty()) {
        moments.emplace(a.moments_out, out);
        moments->stream() << "t,mean,variance,mu1_plus,mu2_plus\n";
    }
    bool header = true;
    if (a.exact) {
        const Rational p = parse_rational(a.p);
        for (int t : a.t) {
            Distribution<Rational> dist;
            if (a.backend == "jacobi") {
                dist = Distribution<Rational>{t, -static_cast<long>(t), {}};
                for (long x = -t; x <= t; ++x) dist.probs.push_back(analytic::closed_form_prob_jacobi(t, x, p));
            } else {
                dist = analytic::closed_form_dist(t, p);
            }
            write_distribution_csv(sink.stream(), dist, header);
            header = false;
            if (moments) {
                const auto m = analytic::directional_moments(t, p);
                write_moment_row(moments->stream(), t, m.mean, m.dispersion, m.mu1_plus, m.mu2_plus);
            }
        }
    } else {
        if (a.backend != "series") throw InvalidArgument("--backend jacobi requires --exact");
        const double p = parse_double(a.p, "--p");
        for (int t : a.t) {
            write_distribution_csv(sink.stream(), analytic::closed_form_dist(t, p), header);
            header = false;
            if (moments) {
                const auto m = analytic::directional_moments(t, p);
                write_moment_row(moments->stream(), t, m.mean, m.dispersion, m.mu1_plus, m.mu2_plus);
            }
        }
    }
    sink.finish();
    if (moments) moments->finish();
    return kSuccess;
}

// ---------------------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string variant = "type1";
    std::string p = "1/2";
    std::string ps = "0";
    int t = 1000;
    long trials = 10000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    int width = 0;
    int height = 0;
    double dx = 1.0;
    double dt = 1.0;
    int fit_from = 0;
    int fit_to = 0;
    int batches = 100;
    std::string engine = "block";
    std::string format = "json";
    std::string out;
    std::string series_out;
};

mca::RuleParams make_rule(const std::string& variant, double p, double ps) {
    if (variant == "type1") return mca::RuleParams::type1(p);
    if (variant == "type2") return mca::RuleParams::type2(ps);
    throw InvalidArgument("--variant must be type1 or type2");
}

mca::Engine parse_engine(const std::string& name) {
    if (name == "block") return mca::Engine::OccupiedBlock;
    if (name == "full") return mca::Engine::FullGrid;
    throw InvalidArgument("--engine must be block or full");
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    const mca::RuleParams rule = make_rule(a.variant, parse_double(a.p, "--p"), parse_double(a.ps, "--ps"));
    if (a.format != "json" && a.format != "csv") throw InvalidArgument("--format must be csv or json");
    const std::uint64_t seed = resolve_seed(a.seed, err);

    mca::EnsembleOptions options;
    options.width = a.width;
    options.height = a.height;
    options.threads = a.threads;
    options.batches = a.batches;
    options.engine = parse_engine(a.engine);
    if (a.width == 0 && a.height == 0) {
        const int side = mca::auto_torus_size(rule, a.t);
        options.width = side;
        options.height = side;
    } else if (a.width == 0 || a.height == 0) {
        throw InvalidArgument("--width and --height must be given together");
    }

    const mca::FitWindow window{a.fit_from > 0 ? a.fit_from : std::max(1, a.t / 2), a.fit_to > 0 ? a.fit_to : a.t};
    if (window.from < 1 || window.to < window.from || window.to > a.t) {
        throw InvalidArgument("fit window must satisfy 1 <= --fit-from <= --fit-to <= --t");
    }

    const mca::DispersionSeries series = mca::ensemble_dispersion(rule, a.t, a.trials, seed, options);
    if (!a.series_out.empty()) {
        Sink s(a.series_out, out);
        mca::write_series_csv(s.stream(), series);
        s.finish();
    }

    Sink sink(a.out, out);
    if (a.format == "csv") {
        mca::write_series_csv(sink.stream(), series);
    } else {
        const mca::DiffusionEstimate est = mca::estimate_diffusion(series, window, a.dx, a.dt);
        json j;
        j["k"] = est.k;
        j["ci_low"] = est.ci_low;
        j["ci_high"] = est.ci_high;
        j["window"] = {est.window.from, est.window.to};
        j["dx"] = est.dx;
        j["dt"] = est.dt;
        j["seed"] = est.seed;
        sink.stream() << j.dump() << '\n';
    }
    sink.finish();
    return kSuccess;
}

// ---------------------------------------------------------------------------------------
// compare

struct CompareArgs {
    std::string p;
    std::string ps;
    int t = 40;
    long trials = 0;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    bool dispersion = false;
    bool regression = false;
    std::string format = "csv";
    std::string out;
};

int compare_distribution(const CompareArgs& a, std::ostream& out, std::ostream& err) {
    if (a.t < 1) throw InvalidArgument("--t must be positive");
    const double p = parse_double(a.p, "--p");
    const Distribution<double> exact = analytic::closed_form_dist(a.t, p);
    const Distribution<double> oracle = chain::marginal(chain::evolve(0.5, p, a.t));

    std::optional<Distribution<double>> simulated;
    if (a.trials > 0) {
        const std::uint64_t seed = resolve_seed(a.seed, err);
        mca::EnsembleOptions options;
        options.threads = a.threads;
        const auto series = mca::ensemble_dispersion(mca::RuleParams::type1(p), a.t, a.trials, seed, options);
        Distribution<double> freq{a.t, -static_cast<long>(a.t), {}};
        for (auto c : series.endpoint_counts) freq.probs.push_back(static_cast<double>(c) / static_cast<double>(a.trials));
        simulated = std::move(freq);
    }

    Distribution<double> normal{a.t, -static_cast<long>(a.t), {}};
    for (long x = -a.t; x <= a.t; ++x) normal.probs.push_back(analytic::normal_pdf(static_cast<double>(x), a.t, p));

    const double tv_normal = total_variation(exact, normal);
    const double tv_oracle = total_variation(exact, oracle);
    const bool nonmonotone = analytic::nonmonotone_on_nonnegative(exact);
    const std::optional<double> tv_sim =
        simulated ? std::optional<double>(total_variation(*simulated, exact)) : std::nullopt;

    Sink sink(a.out, out);
    std::ostream& os = sink.stream();
    if (a.format == "json") {
        json j;
        j["t"] = a.t;
        j["p"] = p;
        json rows = json::array();
        for (long x = -a.t; x <= a.t; ++x) {
            json row{{"x", x}, {"analytic", exact.at(x)}, {"oracle", oracle.at(x)}, {"normal", normal.at(x)}};
            row["simulated"] = simulated ? json(simulated->at(x)) : json(nullptr);
            rows.push_back(row);
        }
        j["rows"] = rows;
        j["sum_analytic"] = exact.total();
        j["sum_oracle"] = oracle.total();
        j["tv_analytic_oracle"] = tv_oracle;
        j["tv_analytic_normal"] = tv_normal;
        j["tv_simulated_analytic"] = tv_sim ? json(*tv_sim) : json(nullptr);
        j["nonmonotone"] = nonmonotone;
        os << j.dump(2) << '\n';
    } else {
        os << std::setprecision(17);
        os << "t,x,analytic,oracle,simulated,normal\n";
        for (long x = -a.t; x <= a.t; ++x) {
            os << a.t << ',' << x << ',' << exact.at(x) << ',' << oracle.at(x) << ',';
            if (simulated) os << simulated->at(x);
            os << ',' << normal.at(x) << '\n';
        }
        os << "# sum_analytic=" << exact.total() << '\n';
        os << "# sum_oracle=" << oracle.total() << '\n';
        os << "# tv_analytic_oracle=" << tv_oracle << '\n';
        os << "# tv_analytic_normal=" << tv_normal << '\n';
        if (tv_sim) os << "# tv_simulated_analytic=" << *tv_sim << '\n';
        os << "# nonmonotone=" << (nonmonotone ? "true" : "false") << '\n';
    }
    sink.finish();
    return kSuccess;
}

int compare_dispersion(const CompareArgs& a, std::ostream& out) {
    if (a.t < 1) throw InvalidArgument("--t must be positive");
    // The two variants are matched on the diffusion coefficient; whichever parameter is
    // missing is calibrated from the other.
    double p = 0.0;
    double ps = 0.0;
    if (!a.p.empty()) {
        p = parse_double(a.p, "--p");
        ps = !a.ps.empty() ? parse_double(a.ps, "--ps") : 1.0 - analytic::diffusion_coefficient(p) / analytic::diffusion_coefficient(0.5);
    } else if (!a.ps.empty()) {
        ps = parse_double(a.ps, "--ps");
        p = analytic::calibrate_p(analytic::type2_diffusion_coefficient(ps)).p;
    } else {
        throw InvalidArgument("--dispersion needs --p or --ps");
    }
    const double dc = analytic::diffusion_coefficient(p);
    Sink sink(a.out, out);
    std::ostream& os = sink.stream();
    os << std::setprecision(17);
    os << "t,dispersion_type1,dispersion_type2,asymptote\n";
    for (int t = 0; t <= a.t; ++t) {
        os << t << ',' << analytic::variance(t, p) << ',' << analytic::type2_dispersion(t, ps) << ',' << 2.0 * dc * t
           << '\n';
    }
    os << "# p=" << p << '\n' << "# ps=" << ps << '\n';
    sink.finish();
    return kSuccess;
}

int compare_regression(const CompareArgs& a, std::ostream& out) {
    Sink sink(a.out, out);
    std::ostream& os = sink.stream();
    os << std::setprecision(17);
    os << "r,p_exact,p_regression\n";
    for (int i = 1; i <= 20; ++i) {
        const double r = 0.05 * i;
        os << r << ',' << analytic::calibrate_p(r * analytic::diffusion_coefficient(0.5)).p << ','
           << analytic::regression_p(r) << '\n';
    }
    sink.finish();
    return kSuccess;
}

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
    if (a.format != "json" && a.format != "csv") throw InvalidArgument("--format must be csv or json");
    if (a.regression) return compare_regression(a, out);
    if (a.dispersion) return compare_dispersion(a, out);
    if (a.p.empty()) throw InvalidArgument("--p is required");
    return compare_distribution(a, out, err);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Margolus-automaton diffusion: exact chain, closed form and simulation"};
    app.require_subcommand(1);

    ChainArgs chain_args;
    auto* chain_cmd = app.add_subcommand("chain", "Evolve the position/direction master equation");
    chain_cmd->add_option("--p", chain_args.p, "Rotation probability in (0, 1)")->required();
    chain_cmd->add_option("--eps", chain_args.eps, "Probability of initial direction +1");
    chain_cmd->add_option("--t", chain_args.t, "Time steps to report")->expected(1, -1);
    chain_cmd->add_flag("--exact", chain_args.exact, "Exact rational arithmetic");
    chain_cmd->add_option("--out", chain_args.out, "Distribution CSV path");
    chain_cmd->add_option("--moments-out", chain_args.moments_out, "Moment CSV path");

    AnalyticArgs analytic_args;
    auto* analytic_cmd = app.add_subcommand("analytic", "Closed-form distribution, moments and coefficients");
    analytic_cmd->add_option("--p", analytic_args.p, "Rotation probability in (0, 1)");
    analytic_cmd->add_option("--t", analytic_args.t, "Time steps to report")->expected(1, -1);
    analytic_cmd->add_flag("--exact", analytic_args.exact, "Exact rational arithmetic");
    analytic_cmd->add_flag("--dc", analytic_args.dc, "Print the diffusion coefficient for --p");
    analytic_cmd->add_option("--calibrate", analytic_args.calibrate, "Print p for a target diffusion coefficient");
    analytic_cmd->add_option("--type2-ps", analytic_args.type2_ps, "Print the type-2 diffusion coefficient");
    analytic_cmd->add_option("--backend", analytic_args.backend, "series or jacobi (exact only)");
    analytic_cmd->add_option("--out", analytic_args.out, "Distribution CSV path");
    analytic_cmd->add_option("--moments-out", analytic_args.moments_out, "Moment CSV path");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo ensemble of tracked particles");
    sim_cmd->add_option("--variant", sim_args.variant, "type1 or type2");
    sim_cmd->add_option("--p", sim_args.p, "Type-1 rotation probability in (0, 1/2]");
    sim_cmd->add_option("--ps", sim_args.ps, "Type-2 skip probability in [0, 1]");
    sim_cmd->add_option("--t", sim_args.t, "Number of steps");
    sim_cmd->add_option("--trials", sim_args.trials, "Number of independent particles");
    sim_cmd->add_option("--seed", sim_args.seed, "Random seed");
    sim_cmd->add_option("--threads", sim_args.threads, "Worker threads");
    sim_cmd->add_option("--width", sim_args.width, "Torus width (even)");
    sim_cmd->add_option("--height", sim_args.height, "Torus height (even)");
    sim_cmd->add_option("--dx", sim_args.dx, "Cell side length");
    sim_cmd->add_option("--dt", sim_args.dt, "Time per step");
    sim_cmd->add_option("--fit-from", sim_args.fit_from, "First step of the fit window");
    sim_cmd->add_option("--fit-to", sim_args.fit_to, "Last step of the fit window");
    sim_cmd->add_option("--batches", sim_args.batches, "Trial batches for the bootstrap");
    sim_cmd->add_option("--engine", sim_args.engine, "block or full");
    sim_cmd->add_option("--format", sim_args.format, "json (estimate) or csv (dispersion series)");
    sim_cmd->add_option("--out", sim_args.out, "Output path");
    sim_cmd->add_option("--series-out", sim_args.series_out, "Dispersion series CSV path");

    CompareArgs cmp_args;
    auto* cmp_cmd = app.add_subcommand("compare", "Closed form vs oracle vs simulation vs normal limit");
    cmp_cmd->add_option("--p", cmp_args.p, "Rotation probability in (0, 1)");
    cmp_cmd->add_option("--ps", cmp_args.ps, "Type-2 skip probability (with --dispersion)");
    cmp_cmd->add_option("--t", cmp_args.t, "Time step (or last step with --dispersion)");
    cmp_cmd->add_option("--trials", cmp_args.trials, "Simulated particles (0 disables the column)");
    cmp_cmd->add_option("--seed", cmp_args.seed, "Random seed");
    cmp_cmd->add_option("--threads", cmp_args.threads, "Worker threads");
    cmp_cmd->add_flag("--dispersion", cmp_args.dispersion, "Type-1 vs type-2 dispersion table");
    cmp_cmd->add_flag("--regression", cmp_args.regression, "Exact p(r) vs the empirical quadratic model");
    cmp_cmd->add_option("--format", cmp_args.format, "csv or json");
    cmp_cmd->add_option("--out", cmp_args.out, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidArgument;
    }

    try {
        if (*chain_cmd) return cmd_chain(chain_args, out);
        if (*analytic_cmd) return cmd_analytic(analytic_args, out, err);
        if (*sim_cmd) return cmd_simulate(sim_args, out, err);
        if (*cmp_cmd) return cmd_compare(cmp_args, out, err);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidArgument;
    } catch (const DomainError& e) {
        err << "numerical domain error: " << e.what() << '\n';
        return kDomainError;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    }
    return kInvalidArgument;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("mcadiff");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mcadiff::cli
