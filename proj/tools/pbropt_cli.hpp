#pragma once

// Command-line front end. Kept header-only so tests can drive run() in-process.

#include "pbr/pbr.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace pbr::cli {

inline constexpr const char* tool_version = "1.0.0";

enum ExitCode : int { ok = 0, usage_error = 2, numerical_failure = 3 };

class UsageError : public Error
{
public:
    using Error::Error;
};

struct CommonOptions
{
    std::string params_file;
    std::string preset_name = "table1-R-x10";
    std::optional<double> I_s;
    std::optional<double> alpha0;
    std::optional<double> alpha1;
    std::optional<double> s;
    std::string out_dir = "pbropt-out";
    std::string format = "csv";
};

struct YoptOptions
{
    bool scan = false;
    double scan_max = 30.0;
    double scan_step = 1e-5;
};

struct SweepOptions
{
    std::string kind;
    std::optional<double> lo;
    std::optional<double> hi;
    std::optional<int> n;
    double X = 50.0;
    double h = 0.15;
    double h_lo = 0.01;
    double h_hi = 1.0;
    int h_n = 100;
    std::vector<double> s_list;
};

struct OptimizeOptions
{
    std::optional<double> h;
    std::optional<double> X;
};

struct AlternateOptions
{
    double X0 = 50.0;
    std::size_t n_max = 10000;
    std::optional<double> h_min;
    std::string floor;
    bool log_coordinates = false;
};

struct SimulateOptions
{
    double X0 = 2500.0;
    double h = 0.1;
    double t_end = 30.0;
    std::optional<double> D_max;
    double D_max_factor = 10.0;
    std::optional<double> X_star;
    std::optional<double> X_bar;
    double noise = 0.0;
    double sample_period = 0.01;
    unsigned seed = 1;
};

namespace detail {

inline std::string iso8601_now()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

/// Collects output files and writes the run manifest once the command succeeded.
class Run
{
public:
    Run(std::string command, const CommonOptions& common, std::vector<std::string> argv)
        : command_(std::move(command)), common_(common), argv_(std::move(argv))
    {
        std::filesystem::create_directories(common_.out_dir);
    }

    std::filesystem::path path(const std::string& name) const { return std::filesystem::path(common_.out_dir) / name; }

    void write_text(const std::string& name, const std::string& text)
    {
        const auto p = path(name);
        std::ofstream f(p, std::ios::binary);
        if (!f)
            throw UsageError("cannot write '" + p.string() + "'");
        f << text;
        outputs_.push_back(p.string());
    }

    void write_table(const std::string& stem, const Table& t)
    {
        std::ostringstream s;
        if (common_.format == "json")
            write_json(s, t);
        else
            write_csv(s, t);
        write_text(stem + "." + common_.format, s.str());
    }

    void write_json_doc(const std::string& name, const nlohmann::json& j) { write_text(name, j.dump(2) + "\n"); }

    void finish()
    {
        nlohmann::json manifest{{"command", command_},
                                {"params_file", common_.params_file},
                                {"preset", common_.params_file.empty() ? common_.preset_name : ""},
                                {"outputs", outputs_},
                                {"tool_version", tool_version},
                                {"timestamp", iso8601_now()},
                                {"arguments", argv_}};
        const auto p = path("manifest.json");
        std::ofstream f(p, std::ios::binary);
        if (!f)
            throw UsageError("cannot write '" + p.string() + "'");
        f << manifest.dump(2) << "\n";
    }

private:
    std::string command_;
    const CommonOptions& common_;
    std::vector<std::string> argv_;
    std::vector<std::string> outputs_;
};

inline ModelSetup resolve_setup(const CommonOptions& o)
{
    ModelSetup s = o.params_file.empty() ? preset(o.preset_name) : load_params(o.params_file);
    if (o.I_s)
        s.I_s = *o.I_s;
    if (o.alpha1)
        s.extinction.alpha1 = *o.alpha1;
    if (o.s) {
        // Without an explicit alpha0, a new exponent gets the least-squares
        // fit to the linear law over X in [0, 1000].
        if (!o.alpha0 && s.extinction.s == 1.0)
            s.extinction.alpha0 = fit_alpha0(s.extinction.alpha0, *o.s, 0.0, 1000.0, 1001);
        s.extinction.s = *o.s;
    }
    if (o.alpha0)
        s.extinction.alpha0 = *o.alpha0;
    try {
        s.extinction.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    if (!(s.I_s > 0.0))
        throw UsageError("--I_s must be > 0");
    return s;
}

/// Reference linear alpha0 used when fitting alpha0(s) for curve families.
inline double reference_alpha0(const ModelSetup& s) { return s.extinction.s == 1.0 ? s.extinction.alpha0 : 0.2; }

struct Range
{
    double lo;
    double hi;
    int n;

    double at(int i) const { return i + 1 == n ? hi : lo + (hi - lo) * i / (n - 1); }
};

inline Range make_range(std::optional<double> lo, std::optional<double> hi, std::optional<int> n, Range def)
{
    Range r{lo.value_or(def.lo), hi.value_or(def.hi), n.value_or(def.n)};
    if (!(r.lo < r.hi) || r.n < 2)
        throw UsageError("malformed range: need lo < hi and n >= 2");
    return r;
}

inline std::string describe(const ModelSetup& s)
{
    std::ostringstream o;
    o << "I_s=" << format_number(s.I_s) << " theta_per_d=" << format_number(s.haldane.theta)
      << " mu_max_per_d=" << format_number(s.haldane.mu_max) << " I_star=" << format_number(s.haldane.I_star)
      << " R_per_d=" << format_number(s.haldane.R) << " alpha0=" << format_number(s.extinction.alpha0)
      << " alpha1=" << format_number(s.extinction.alpha1) << " s=" << format_number(s.extinction.s);
    return o.str();
}

inline nlohmann::json growth_json(const ModelSetup& s)
{
    return {{"theta_per_s_basis", s.haldane.theta_per_second()},
            {"mu_max_per_d", s.haldane.mu_max},
            {"I_star", s.haldane.I_star},
            {"R_per_d", s.haldane.R},
            {"I_s", s.I_s}};
}

} // namespace detail

inline nlohmann::json cmd_yopt(const ModelSetup& s, const YoptOptions& o)
{
    const YOptResult r = y_opt(s.haldane, s.I_s);
    nlohmann::json j{{"Y_opt", r.Y_opt},
                     {"branch", std::string(to_string(r.branch))},
                     {"I_bottom", r.I_bottom},
                     {"mu_at_bottom", haldane_mu(s.haldane, r.I_bottom)},
                     {"R", s.haldane.R},
                     {"compensated", r.compensated},
                     {"P_at_Y_opt", optical_productivity(s.haldane, s.I_s, r.Y_opt)},
                     {"growth", detail::growth_json(s)}};
    if (o.scan) {
        if (!(o.scan_step > 0.0) || !(o.scan_max > o.scan_step))
            throw UsageError("--scan-step must be > 0 and below --scan-max");
        const auto steps = static_cast<long>(std::floor(o.scan_max / o.scan_step));
        double best_y = 0.0;
        double best_P = 0.0;
        for (long i = 0; i <= steps; ++i) {
            const double y = o.scan_step * static_cast<double>(i);
            const double P = optical_productivity(s.haldane, s.I_s, y);
            if (P > best_P) {
                best_P = P;
                best_y = y;
            }
        }
        j["scan"] = {{"argmax", best_y},
                     {"max_P", best_P},
                     {"step", o.scan_step},
                     {"range", {0.0, o.scan_max}},
                     {"abs_difference", std::abs(best_y - r.Y_opt)},
                     {"agrees_1e-4", std::abs(best_y - r.Y_opt) <= 1e-4}};
    }
    return j;
}

/// Builds the tables for one sweep kind: (file stem, table) pairs.
inline std::vector<std::pair<std::string, Table>> cmd_sweep(const ModelSetup& s, const SweepOptions& o)
{
    const auto& p = s.haldane;
    std::vector<std::pair<std::string, Table>> out;
    auto s_list = [&](std::vector<double> def) {
        const auto& list = o.s_list.empty() ? def : o.s_list;
        for (double v : list)
            if (!(v > 0.0 && v <= 1.0))
                throw UsageError("--s-list entries must lie in (0, 1]");
        return list;
    };
    const std::string model = detail::describe(s);

    if (o.kind == "P_of_Y") {
        const auto r = detail::make_range(o.lo, o.hi, o.n, {0.0, 20.0, 2001});
        if (r.lo < 0.0)
            throw UsageError("optical depth range must be >= 0");
        Table t{"kind=P_of_Y " + model + " | y [-], mu [1/d] = mu(I_s e^-y), P [1/d]", {"y", "mu", "P"}, {}};
        for (int i = 0; i < r.n; ++i) {
            const double y = r.at(i);
            t.rows.push_back({y, haldane_mu(p, s.I_s * std::exp(-y)), optical_productivity(p, s.I_s, y)});
        }
        out.emplace_back("sweep_P_of_Y", std::move(t));
    } else if (o.kind == "Pi_of_h") {
        const auto r = detail::make_range(o.lo, o.hi, o.n, {0.005, 1.0, 1000});
        if (r.lo <= 0.0)
            throw UsageError("depth range must be > 0");
        Table t{"kind=Pi_of_h X=" + format_number(o.X) + " " + model
                    + " | h [m], Pi [g/m2/d], net bottom growth mu(I(X,-h)) - R [1/d]",
                {"h", "Pi", "net_bottom_growth"},
                {}};
        const double eps = extinction(s.extinction, o.X);
        for (int i = 0; i < r.n; ++i) {
            const double h = r.at(i);
            t.rows.push_back({h, surface_productivity(p, s.extinction, o.X, h, s.I_s),
                              bottom_net_growth(p, s.I_s, eps * h)});
        }
        out.emplace_back("sweep_Pi_of_h", std::move(t));
    } else if (o.kind == "Pi_of_X") {
        const auto r = detail::make_range(o.lo, o.hi, o.n, {1.0, 1000.0, 1000});
        if (r.lo < 0.0 || !(o.h > 0.0))
            throw UsageError("Pi_of_X needs X >= 0 and h > 0");
        Table t{"kind=Pi_of_X h=" + format_number(o.h) + " " + model
                    + " | X [g/m3], Pi [g/m2/d], net bottom growth [1/d]",
                {"X", "Pi", "net_bottom_growth"},
                {}};
        for (int i = 0; i < r.n; ++i) {
            const double X = r.at(i);
            t.rows.push_back({X, surface_productivity(p, s.extinction, X, o.h, s.I_s),
                              bottom_net_growth(p, s.I_s, extinction(s.extinction, X) * o.h)});
        }
        out.emplace_back("sweep_Pi_of_X", std::move(t));
    } else if (o.kind == "Pi_surface") {
        const auto rx = detail::make_range(o.lo, o.hi, o.n, {1.0, 1000.0, 100});
        const auto rh = detail::make_range(o.h_lo, o.h_hi, o.h_n, {0.01, 1.0, 100});
        if (rx.lo < 0.0 || rh.lo <= 0.0)
            throw UsageError("Pi_surface needs X >= 0 and h > 0");
        Table t{"kind=Pi_surface " + model + " | X [g/m3], h [m], Pi [g/m2/d]", {"X", "h", "Pi"}, {}};
        for (int i = 0; i < rx.n; ++i)
            for (int k = 0; k < rh.n; ++k)
                t.rows.push_back({rx.at(i), rh.at(k), surface_productivity(p, s.extinction, rx.at(i), rh.at(k), s.I_s)});
        out.emplace_back("sweep_Pi_surface", std::move(t));
    } else if (o.kind == "Pi_vs_alpha1") {
        const auto r = detail::make_range(o.lo, o.hi, o.n, {0.0, 25.0, 26});
        if (r.lo < 0.0)
            throw UsageError("alpha1 range must be >= 0");
        for (double sv : s_list({0.365, 1.0})) {
            ExtinctionModel m{fit_alpha0(detail::reference_alpha0(s), sv, 0.0, 1000.0, 1001), 0.0, sv};
            Table t{"kind=Pi_vs_alpha1 X=" + format_number(o.X) + " s=" + format_number(sv)
                        + " alpha0=" + format_number(m.alpha0) + " " + model
                        + " | alpha1 [1/m], h_opt = Y_opt/eps(X) [m], Pi [g/m2/d]",
                    {"alpha1", "h_opt", "Pi"},
                    {}};
            for (int i = 0; i < r.n; ++i) {
                m.alpha1 = r.at(i);
                const double h = optimal_depth_for_X(p, m, s.I_s, o.X);
                t.rows.push_back({m.alpha1, h, surface_productivity(p, m, o.X, h, s.I_s)});
            }
            out.emplace_back("sweep_Pi_vs_alpha1_s" + format_number(sv), std::move(t));
        }
    } else if (o.kind == "eps_of_X") {
        const auto r = detail::make_range(o.lo, o.hi, o.n, {0.0, 1000.0, 1001});
        if (r.lo < 0.0)
            throw UsageError("concentration range must be >= 0");
        for (double sv : s_list({0.2, 0.4, 0.6, 0.8, 1.0})) {
            const ExtinctionModel m{fit_alpha0(detail::reference_alpha0(s), sv, 0.0, 1000.0, 1001),
                                    s.extinction.alpha1, sv};
            Table t{"kind=eps_of_X s=" + format_number(sv) + " alpha0=" + format_number(m.alpha0)
                        + " alpha1=" + format_number(m.alpha1) + " | X [g/m3], eps [1/m]",
                    {"X", "eps"},
                    {}};
            for (int i = 0; i < r.n; ++i)
                t.rows.push_back({r.at(i), extinction(m, r.at(i))});
            out.emplace_back("sweep_eps_of_X_s" + format_number(sv), std::move(t));
        }
    } else {
        throw UsageError("unknown sweep kind '" + o.kind + "'");
    }
    return out;
}

inline nlohmann::json cmd_optimize(const ModelSetup& s, const OptimizeOptions& o)
{
    if (o.h.has_value() == o.X.has_value())
        throw UsageError("optimize: give exactly one of --h or --X");
    const auto& p = s.haldane;
    const double Y_opt = y_opt(p, s.I_s).Y_opt;
    if (o.X) {
        if (!(*o.X >= 0.0))
            throw UsageError("--X must be >= 0");
        const double h = optimal_depth_for_X(p, s.extinction, s.I_s, *o.X);
        return {{"X", *o.X},
                {"h_opt", h},
                {"Y_opt", Y_opt},
                {"Pi", surface_productivity(p, s.extinction, *o.X, h, s.I_s)},
                {"net_bottom_growth", bottom_net_growth(p, s.I_s, extinction(s.extinction, *o.X) * h)}};
    }
    if (!(*o.h > 0.0))
        throw UsageError("--h must be > 0");
    const XOptResult r = optimal_X_for_h(p, s.extinction, s.I_s, *o.h);
    const double Y = extinction(s.extinction, r.X) * *o.h;
    return {{"h", *o.h},
            {"X_opt", r.X},
            {"Pi_opt", r.Pi},
            {"X_compensation", r.X_compensation},
            {"Y_at_opt", Y},
            {"Y_opt", Y_opt},
            {"net_bottom_growth", bottom_net_growth(p, s.I_s, Y)},
            {"stationarity_residual", r.stationarity}};
}

inline std::pair<SequenceTrace, nlohmann::json> cmd_alternate(const ModelSetup& s, const AlternateOptions& o)
{
    std::optional<double> h_min = o.h_min;
    if (!o.floor.empty()) {
        if (o.floor == "raceway")
            h_min = depth_floor::raceway;
        else if (o.floor == "tubular")
            h_min = depth_floor::tubular;
        else if (o.floor == "biofilm")
            h_min = depth_floor::biofilm;
        else
            throw UsageError("--floor must be raceway, tubular or biofilm");
    }
    if (!(o.X0 > 0.0) || o.n_max < 1)
        throw UsageError("alternate needs --X0 > 0 and --n-max >= 1");
    SequenceTrace trace = alternate(s.haldane, s.extinction, s.I_s, o.X0, o.n_max, h_min);
    const SequenceSummary sum = summarize(trace, s.haldane, s.extinction, s.I_s);
    const bool bounded = s.extinction.s == 1.0;
    nlohmann::json j{{"iterates", sum.iterates},
                     {"converged", trace.converged},
                     {"stop_reason", std::string(to_string(trace.stop_reason))},
                     {"Y_opt", sum.Y_opt},
                     {"final_X", sum.final_X},
                     {"final_h", sum.final_h},
                     {"final_Pi", sum.final_Pi},
                     {"optical_depth_gap", sum.optical_depth_gap},
                     {"monotone", sum.monotone},
                     {"prediction", bounded ? "Pi_n -> P(Y_opt)/alpha0" : "Pi_n -> +inf like X_n^(1-s)"},
                     {"Pi_limit", sum.Pi_limit},
                     {"surface_biomass_limit", sum.surface_biomass_limit},
                     {"surface_biomass_gap", sum.surface_biomass_gap},
                     {"Pi_gap", sum.Pi_gap},
                     {"Pi_gap_abs", std::abs(sum.final_Pi - sum.Pi_limit)},
                     {"scaled_Pi", sum.scaled_Pi},
                     {"growth_exponent", sum.growth_exponent},
                     {"expected_growth_exponent", 1.0 - s.extinction.s},
                     {"divergent", !bounded}};
    if (h_min)
        j["h_min"] = *h_min;
    return {std::move(trace), std::move(j)};
}

/// Same sequence in (ln X, ln h); reaches n_max even when X_n overflows a double.
inline std::pair<LogSequenceTrace, nlohmann::json> cmd_alternate_log(const ModelSetup& s, const AlternateOptions& o)
{
    if (o.h_min || !o.floor.empty())
        throw UsageError("--log-coordinates does not take a depth floor");
    if (!(o.X0 > 0.0) || o.n_max < 1)
        throw UsageError("alternate needs --X0 > 0 and --n-max >= 1");
    LogSequenceTrace trace = alternate_log(s.haldane, s.extinction, s.I_s, o.X0, o.n_max);
    const auto& last = trace.iterates.back();
    const std::size_t n = trace.iterates.size();
    const std::size_t first = std::max<std::size_t>(1, n / 10);
    const auto& ref = trace.iterates[first - 1];
    const double sv = s.extinction.s;
    const double d_log_X = last.log_X - ref.log_X;
    nlohmann::json j{{"iterates", n},
                     {"converged", trace.converged},
                     {"stop_reason", std::string(to_string(trace.stop_reason))},
                     {"Y_opt", trace.Y_opt},
                     {"final_log_X", last.log_X},
                     {"final_log_h", last.log_h},
                     {"final_Y", last.Y},
                     {"final_log_Pi", last.log_Pi},
                     {"final_bottom_net_growth", last.bottom_net_growth},
                     {"log_scaled_Pi", last.log_Pi - (1.0 - sv) * last.log_X},
                     {"scaled_Pi_change_last_decade", scaled_productivity_change(trace, s.extinction, first, n)},
                     {"growth_exponent", d_log_X > 0.0 ? (last.log_Pi - ref.log_Pi) / d_log_X : 0.0},
                     {"expected_growth_exponent", 1.0 - sv},
                     {"divergent", sv != 1.0},
                     {"Pi_limit", optical_productivity(s.haldane, s.I_s, trace.Y_opt) / s.extinction.alpha0}};
    return {std::move(trace), std::move(j)};
}

inline std::pair<SimTrace, nlohmann::json> cmd_simulate(const ModelSetup& s, const SimulateOptions& o)
{
    const auto& p = s.haldane;
    if (!(o.h > 0.0) || !(o.X0 > 0.0) || !(o.t_end > 0.0))
        throw UsageError("simulate needs --h > 0, --X0 > 0, --t-end > 0");
    const double X_star = o.X_star ? *o.X_star : optimal_X_for_h(p, s.extinction, s.I_s, o.h).X;
    const double D_max = o.D_max ? *o.D_max : o.D_max_factor * p.mu_max;
    const double X_bar = o.X_bar ? *o.X_bar : default_saturation_threshold(p, s.extinction, s.I_s, o.h, X_star, D_max);
    const ControlConfig cfg{X_star, D_max, X_bar};
    cfg.validate(p);

    SimOptions opt;
    if (o.noise > 0.0) {
        auto rng = std::make_shared<std::mt19937_64>(o.seed);
        auto dist = std::make_shared<std::normal_distribution<double>>(0.0, o.noise);
        opt.measurement = [rng, dist](double, double phi_true) { return phi_true * (1.0 + (*dist)(*rng)); };
        opt.sample_period = o.sample_period;
    }
    SimTrace trace = simulate_closed_loop(cfg, p, s.extinction, s.I_s, o.X0, o.h, o.t_end, opt);
    const auto t_conv = convergence_time(trace, X_star, 1e-3);
    nlohmann::json j{{"X_star", X_star},
                     {"X_bar", X_bar},
                     {"D_max", D_max},
                     {"X0", o.X0},
                     {"h", o.h},
                     {"t_end", o.t_end},
                     {"final_X", trace.samples.back().X},
                     {"convergence_time_0.1pct", t_conv ? nlohmann::json(*t_conv) : nlohmann::json(nullptr)},
                     {"regime_warnings", trace.regime_warnings},
                     {"samples", trace.samples.size()}};
    return {std::move(trace), std::move(j)};
}

namespace detail {

inline void add_common(CLI::App& sub, CommonOptions& o)
{
    sub.add_option("--params", o.params_file, "Parameter file (key = value, unit-suffixed keys)");
    sub.add_option("--preset", o.preset_name,
                   "Bundled setup: table1-as-printed, table1-R-x10, chlorella-s1, chlorella-s0365")
        ->capture_default_str();
    sub.add_option("--I_s", o.I_s, "Surface light [umol/m2/s]");
    sub.add_option("--alpha0", o.alpha0, "Specific extinction alpha0");
    sub.add_option("--alpha1", o.alpha1, "Background turbidity [1/m]");
    sub.add_option("--s", o.s, "Extinction exponent in (0, 1]; alpha0 is refitted unless --alpha0 is given");
    sub.add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    sub.add_option("--format", o.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

} // namespace detail

/// Parses argv and executes one sub-command. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Optimal operating points and closed-loop control for light-limited photobioreactors",
                 "pbropt"};
    app.require_subcommand(1);
    // "--h" is the depth option, so help gets only the long form.
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_version_flag("--version", tool_version);

    CommonOptions common;
    YoptOptions yopt_opt;
    SweepOptions sweep_opt;
    OptimizeOptions opt_opt;
    AlternateOptions alt_opt;
    SimulateOptions sim_opt;

    auto* yopt = app.add_subcommand("yopt", "Optical depth maximizing the optical productivity");
    detail::add_common(*yopt, common);
    yopt->add_flag("--scan", yopt_opt.scan, "Also brute-force scan P(Y) on a grid");
    yopt->add_option("--scan-max", yopt_opt.scan_max, "Upper end of the scan")->capture_default_str();
    yopt->add_option("--scan-step", yopt_opt.scan_step, "Scan grid step")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Tabulate productivity curves");
    detail::add_common(*sweep, common);
    sweep->add_option("--kind", sweep_opt.kind, "P_of_Y, Pi_of_h, Pi_of_X, Pi_surface, Pi_vs_alpha1, eps_of_X")
        ->required();
    sweep->add_option("--lo", sweep_opt.lo, "Lower end of the swept variable");
    sweep->add_option("--hi", sweep_opt.hi, "Upper end of the swept variable");
    sweep->add_option("--n", sweep_opt.n, "Number of grid points (>= 2)");
    sweep->add_option("--X", sweep_opt.X, "Fixed concentration for Pi_of_h / Pi_vs_alpha1")->capture_default_str();
    sweep->add_option("--h", sweep_opt.h, "Fixed depth for Pi_of_X")->capture_default_str();
    sweep->add_option("--h-lo", sweep_opt.h_lo, "Depth range for Pi_surface")->capture_default_str();
    sweep->add_option("--h-hi", sweep_opt.h_hi)->capture_default_str();
    sweep->add_option("--h-n", sweep_opt.h_n)->capture_default_str();
    sweep->add_option("--s-list", sweep_opt.s_list, "Exponents for eps_of_X / Pi_vs_alpha1")->delimiter(',');

    auto* optimize = app.add_subcommand("optimize", "Directional optimum for a given depth or concentration");
    detail::add_common(*optimize, common);
    auto* opt_h = optimize->add_option("--h", opt_opt.h, "Depth [m]: returns the optimal concentration");
    auto* opt_X = optimize->add_option("--X", opt_opt.X, "Concentration [g/m3]: returns the optimal depth");
    opt_h->excludes(opt_X);

    auto* alt = app.add_subcommand("alternate", "Alternating depth/concentration optimization sequence");
    detail::add_common(*alt, common);
    alt->add_option("--X0", alt_opt.X0, "Initial concentration [g/m3]")->capture_default_str();
    alt->add_option("--n-max", alt_opt.n_max, "Maximum number of iterates")->capture_default_str();
    alt->add_option("--h-min", alt_opt.h_min, "Depth floor [m]");
    alt->add_option("--floor", alt_opt.floor, "Depth floor preset: raceway, tubular, biofilm");
    alt->add_flag("--log-coordinates", alt_opt.log_coordinates,
                  "Carry the sequence in (ln X, ln h); needed for long runs with s < 1");

    auto* sim = app.add_subcommand("simulate", "Closed-loop dilution control simulation");
    detail::add_common(*sim, common);
    sim->add_option("--X0", sim_opt.X0, "Initial concentration [g/m3]")->capture_default_str();
    sim->add_option("--h", sim_opt.h, "Depth [m]")->capture_default_str();
    sim->add_option("--t-end", sim_opt.t_end, "Horizon [d]")->capture_default_str();
    sim->add_option("--D-max", sim_opt.D_max, "Maximal dilution [1/d] (default: factor * mu_max)");
    sim->add_option("--D-max-factor", sim_opt.D_max_factor, "D_max as a multiple of mu_max")->capture_default_str();
    sim->add_option("--X-star", sim_opt.X_star, "Target concentration (default: argmax Pi(., h))");
    sim->add_option("--X-bar", sim_opt.X_bar, "Saturation threshold (default: derived)");
    sim->add_option("--noise", sim_opt.noise, "Relative Gaussian noise on the measured Phi")->capture_default_str();
    sim->add_option("--sample-period", sim_opt.sample_period, "Measurement period with --noise [d]")
        ->capture_default_str();
    sim->add_option("--seed", sim_opt.seed, "Noise seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (!common.params_file.empty() && !app.get_subcommands().front()->get_option("--preset")->empty())
            throw UsageError("give either --params or --preset, not both");
        const ModelSetup setup = detail::resolve_setup(common);

        if (yopt->parsed()) {
            const nlohmann::json j = cmd_yopt(setup, yopt_opt);
            detail::Run run("yopt", common, args);
            run.write_text("params_used.txt", format_params(setup));
            run.write_json_doc("yopt.json", j);
            run.finish();
            out << j.dump(2) << "\n";
        } else if (sweep->parsed()) {
            const auto tables = cmd_sweep(setup, sweep_opt);
            detail::Run run("sweep", common, args);
            run.write_text("params_used.txt", format_params(setup));
            for (const auto& [stem, table] : tables)
                run.write_table(stem, table);
            run.finish();
            for (const auto& [stem, table] : tables)
                out << run.path(stem + "." + common.format).string() << "\n";
        } else if (optimize->parsed()) {
            const nlohmann::json j = cmd_optimize(setup, opt_opt);
            detail::Run run("optimize", common, args);
            run.write_text("params_used.txt", format_params(setup));
            run.write_json_doc("optimize.json", j);
            run.finish();
            out << j.dump(2) << "\n";
        } else if (alt->parsed() && alt_opt.log_coordinates) {
            const auto [trace, j] = cmd_alternate_log(setup, alt_opt);
            detail::Run run("alternate", common, args);
            run.write_text("params_used.txt", format_params(setup));
            run.write_table("alternate", log_sequence_table(trace));
            run.write_json_doc("alternate_summary.json", j);
            run.finish();
            out << j.dump(2) << "\n";
        } else if (alt->parsed()) {
            const auto [trace, j] = cmd_alternate(setup, alt_opt);
            detail::Run run("alternate", common, args);
            run.write_text("params_used.txt", format_params(setup));
            run.write_table("alternate", sequence_table(trace));
            run.write_json_doc("alternate_summary.json", j);
            run.finish();
            out << j.dump(2) << "\n";
        } else if (sim->parsed()) {
            const auto [trace, j] = cmd_simulate(setup, sim_opt);
            detail::Run run("simulate", common, args);
            run.write_text("params_used.txt", format_params(setup));
            run.write_table("simulate", sim_table(trace));
            run.write_json_doc("simulate_summary.json", j);
            run.finish();
            if (trace.regime_warnings > 0)
                err << "warning: dilution clamped at 0 on " << trace.regime_warnings
                    << " samples (mean growth below respiration under the threshold)\n";
            out << j.dump(2) << "\n";
        }
        return ok;
    } catch (const InfeasibleRespiration& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const NonConvergence& e) {
        err << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const StepUnderflow& e) {
        err << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    }
}

} // namespace pbr::cli
