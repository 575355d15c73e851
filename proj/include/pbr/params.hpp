#pragma once

/**
 * @file
 * Parameter files and bundled presets.
 *
 * A parameter file is a flat list of `key = value` lines; `#` starts a
 * comment. Every key carries its unit in its name. Growth parameters come
 * either as a complete Han block (per-second rates) or as a complete Haldane
 * block (per-day rates), never both:
 *
 *     # Han block                      # Haldane block
 *     k_r_per_s = 6.8e-3               theta_per_d_per_umol_m2_s = 0.0353
 *     k_d = 2.99e-4                    mu_max_per_d = 1.635
 *     tau_s = 0.25                     I_star_umol_per_m2_s = 202.93
 *     sigma_m2_per_umol = 0.047        R_per_d = 0.12
 *     k = 8.7e-6
 *     R_per_s = 1.389e-6
 *
 * Optional keys (defaults in brackets): alpha0_m2_per_g [0.2],
 * alpha1_per_m [10], s [1], I_s_umol_per_m2_s [2000]. For s < 1,
 * alpha0_m2_per_g is in m^(3s-1).g^-s. Unknown or repeated keys are rejected.
 */

#include "pbr/error.hpp"
#include "pbr/growth.hpp"
#include "pbr/light.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace pbr {

struct ModelSetup
{
    std::optional<HanParams> han; ///< present when the growth law came from Han parameters
    HaldaneParams haldane{};
    ExtinctionModel extinction{0.2, 10.0, 1.0};
    double I_s = 2000.0;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text, const std::string& where)
{
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw ParamFileError(where + ": '" + std::string(text) + "' is not a number");
    return value;
}

inline constexpr std::array<std::string_view, 6> han_keys{
    "k_r_per_s", "k_d", "tau_s", "sigma_m2_per_umol", "k", "R_per_s"};
inline constexpr std::array<std::string_view, 4> haldane_keys{
    "theta_per_d_per_umol_m2_s", "mu_max_per_d", "I_star_umol_per_m2_s", "R_per_d"};
inline constexpr std::array<std::string_view, 4> optional_keys{
    "alpha0_m2_per_g", "alpha1_per_m", "s", "I_s_umol_per_m2_s"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& keys, std::string_view key)
{
    for (auto k : keys)
        if (k == key)
            return true;
    return false;
}

} // namespace detail

inline ModelSetup parse_params(std::istream& in, const std::string& source = "<params>")
{
    std::map<std::string, double, std::less<>> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = detail::trim(view);
        if (view.empty())
            continue;
        const std::string where = source + ":" + std::to_string(line_no);
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ParamFileError(where + ": expected 'key = value'");
        const std::string key(detail::trim(view.substr(0, eq)));
        const auto value_text = detail::trim(view.substr(eq + 1));
        if (!detail::contains(detail::han_keys, key) && !detail::contains(detail::haldane_keys, key)
            && !detail::contains(detail::optional_keys, key))
            throw ParamFileError(where + ": unknown key '" + key + "'");
        if (values.count(key))
            throw ParamFileError(where + ": duplicate key '" + key + "'");
        values.emplace(key, detail::parse_double(value_text, where));
    }

    auto count_of = [&](const auto& keys) {
        std::size_t n = 0;
        for (auto k : keys)
            n += values.count(k);
        return n;
    };
    const std::size_t han_n = count_of(detail::han_keys);
    const std::size_t haldane_n = count_of(detail::haldane_keys);

    ModelSetup setup;
    if (han_n == detail::han_keys.size() && haldane_n == 0) {
        HanParams p{values.find("k_r_per_s")->second, values.find("k_d")->second, values.find("tau_s")->second,
                    values.find("sigma_m2_per_umol")->second, values.find("k")->second,
                    values.find("R_per_s")->second};
        try {
            p.validate();
        } catch (const DomainError& e) {
            throw ParamFileError(source + ": " + e.what());
        }
        setup.han = p;
        setup.haldane = han_to_haldane(p);
    } else if (haldane_n == detail::haldane_keys.size() && han_n == 0) {
        setup.haldane = HaldaneParams{values.find("theta_per_d_per_umol_m2_s")->second,
                                      values.find("mu_max_per_d")->second,
                                      values.find("I_star_umol_per_m2_s")->second, values.find("R_per_d")->second};
        try {
            setup.haldane.validate();
        } catch (const DomainError& e) {
            throw ParamFileError(source + ": " + e.what());
        }
    } else {
        throw ParamFileError(source + ": need exactly one complete block of Han keys or Haldane keys");
    }

    if (auto it = values.find("alpha0_m2_per_g"); it != values.end())
        setup.extinction.alpha0 = it->second;
    if (auto it = values.find("alpha1_per_m"); it != values.end())
        setup.extinction.alpha1 = it->second;
    if (auto it = values.find("s"); it != values.end())
        setup.extinction.s = it->second;
    if (auto it = values.find("I_s_umol_per_m2_s"); it != values.end())
        setup.I_s = it->second;
    try {
        setup.extinction.validate();
    } catch (const DomainError& e) {
        throw ParamFileError(source + ": " + e.what());
    }
    if (!(setup.I_s > 0.0))
        throw ParamFileError(source + ": I_s_umol_per_m2_s must be > 0");
    return setup;
}

inline ModelSetup load_params(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParamFileError("cannot open parameter file '" + path + "'");
    return parse_params(in, path);
}

/// Writes a setup back in parameter-file syntax (round-trips through parse_params).
inline std::string format_params(const ModelSetup& s)
{
    std::ostringstream out;
    out.precision(17);
    if (s.han) {
        out << "k_r_per_s = " << s.han->k_r << "\n"
            << "k_d = " << s.han->k_d << "\n"
            << "tau_s = " << s.han->tau << "\n"
            << "sigma_m2_per_umol = " << s.han->sigma << "\n"
            << "k = " << s.han->k << "\n"
            << "R_per_s = " << s.han->R << "\n";
    } else {
        out << "theta_per_d_per_umol_m2_s = " << s.haldane.theta << "\n"
            << "mu_max_per_d = " << s.haldane.mu_max << "\n"
            << "I_star_umol_per_m2_s = " << s.haldane.I_star << "\n"
            << "R_per_d = " << s.haldane.R << "\n";
    }
    out << "alpha0_m2_per_g = " << s.extinction.alpha0 << "\n"
        << "alpha1_per_m = " << s.extinction.alpha1 << "\n"
        << "s = " << s.extinction.s << "\n"
        << "I_s_umol_per_m2_s = " << s.I_s << "\n";
    return out.str();
}

/// Han parameters as listed for the reference strain (R as printed, 1.389e-7 1/s).
inline constexpr HanParams table1_han{6.8e-3, 2.99e-4, 0.25, 0.047, 8.7e-6, 1.389e-7};

inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"table1-as-printed", "table1-R-x10", "chlorella-s1",
                                                "chlorella-s0365"};
    return names;
}

/**
 * Bundled setups. The two table1 presets differ only in R: the listed
 * 1.389e-7 1/s gives Y_opt ~ 8.68 at I_s = 2000, while ten times that value
 * gives the commonly quoted Y_opt = 6.337. The chlorella presets use the
 * latter, with alpha0 = 0.2 m^2/g, alpha1 = 10 1/m, and for s = 0.365 the
 * least-squares alpha0 over X in [0, 1000] (1001 points).
 */
inline ModelSetup preset(std::string_view name)
{
    HanParams han = table1_han;
    ModelSetup s;
    if (name == "table1-as-printed") {
    } else if (name == "table1-R-x10" || name == "chlorella-s1") {
        han.R *= 10.0;
    } else if (name == "chlorella-s0365") {
        han.R *= 10.0;
        s.extinction.s = 0.365;
        s.extinction.alpha0 = fit_alpha0(0.2, 0.365, 0.0, 1000.0, 1001);
    } else {
        throw ParamFileError("unknown preset '" + std::string(name) + "'");
    }
    s.han = han;
    s.haldane = han_to_haldane(han);
    return s;
}

} // namespace pbr
