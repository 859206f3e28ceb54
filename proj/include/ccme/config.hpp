// config.hpp: flat key = value configuration
//
// Lines are `key = value`; `#` starts a comment; blank lines are ignored.
// Lists are comma separated. Later assignments override earlier ones, so
// command-line overrides are simply applied after the file.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ccme/dynamics.hpp"
#include "ccme/errors.hpp"
#include "ccme/model.hpp"
#include "ccme/oracles.hpp"

namespace ccme {

/// Ordered raw key/value store; keys are validated when settings are resolved.
class Config {
public:
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    const std::string& get(const std::string& key) const { return values_.at(key); }

    const std::map<std::string, std::string>& values() const { return values_; }

    /// Parses `key=value` (whitespace around either side is trimmed).
    void set_assignment(std::string_view text, const std::string& where = "--set")
    {
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected key=value, got '" + std::string(text) + "'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = unquote(trim(text.substr(eq + 1)));
        if (key.empty()) throw ConfigError(where + ": empty key");
        set(key, value);
    }

    void merge_text(std::string_view text, const std::string& source = "config")
    {
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string_view::npos) line = line.substr(0, hash);
            if (!trim(line).empty()) set_assignment(line, source + ":" + std::to_string(line_no));
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
    }

    void merge_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        merge_text(ss.str(), path);
    }

    static std::string trim(std::string_view s)
    {
        std::size_t a = 0;
        std::size_t b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return std::string(s.substr(a, b - a));
    }

private:
    static std::string unquote(std::string s)
    {
        if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
            return s.substr(1, s.size() - 2);
        }
        return s;
    }

    std::map<std::string, std::string> values_;
};

inline double parse_double(const std::string& key, const std::string& text)
{
    const std::string t = Config::trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ConfigError("'" + key + "': not a finite number: '" + text + "'");
    }
    return v;
}

inline int parse_int(const std::string& key, const std::string& text)
{
    const std::string t = Config::trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("'" + key + "': not an integer: '" + text + "'");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& text)
{
    std::string t = Config::trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError("'" + key + "': not a boolean: '" + text + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::string body = Config::trim(text);
    if (body.size() >= 2 && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (Config::trim(item).empty()) continue;
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("'" + key + "': empty list");
    return out;
}

inline void require_increasing(const std::string& key, const std::vector<double>& grid)
{
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ConfigError("'" + key + "': grid must be strictly increasing");
    }
}

inline std::vector<double> log_grid(double lo, double hi, int points)
{
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, f);
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

inline std::string format_list(const std::vector<double>& v)
{
    std::ostringstream os;
    os.precision(10);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    return os.str();
}

enum class ModeSelection { Additive, NonAdditive, Both };

inline ModeSelection parse_mode(const std::string& text)
{
    if (text == "additive") return ModeSelection::Additive;
    if (text == "nonadditive" || text == "non-additive") return ModeSelection::NonAdditive;
    if (text == "both") return ModeSelection::Both;
    throw ConfigError("mode must be additive, nonadditive or both, got '" + text + "'");
}

inline std::vector<EmTreatment> treatments(ModeSelection m)
{
    switch (m) {
    case ModeSelection::Additive: return {EmTreatment::Additive};
    case ModeSelection::NonAdditive: return {EmTreatment::NonAdditive};
    case ModeSelection::Both: break;
    }
    return {EmTreatment::Additive, EmTreatment::NonAdditive};
}

/// Everything an experiment needs, resolved from a Config.
struct Settings {
    ModelParams params;
    double alpha_over_epsilon = 0.1;

    std::vector<double> alpha_grid{0.025, 0.05, 0.1, 0.15, 0.2, 0.25};
    std::vector<double> steady_alpha_grid{0.025, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    std::vector<double> steady_T_EM_K{6000.0, 12000.0, 60000.0};
    double sweep_alpha_over_epsilon = 0.3;
    std::vector<double> T_EM_grid_K = log_grid(300.0, 60000.0, 12);

    double t_max_ps = 400.0;
    int t_points = 2000;

    double ibm_t_max_ps = 1.0;
    int ibm_t_points = 1001;
    int ibm_fock_dim = 20;
    double ibm_tolerance = 0.05;

    std::vector<double> d_grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    GoldenRuleIndexing golden_rule_indexing = GoldenRuleIndexing::ExcitedThermal;

    double truncation_tolerance = kTruncationTolerance;
    int fock_max = kMaxFockDim;

    ModeSelection mode = ModeSelection::Both;

    /// key = value lines reproducing these settings.
    std::vector<std::pair<std::string, std::string>> describe() const;
};

namespace detail {

inline std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

inline std::string to_key(EmShape s) { return s == EmShape::Flat ? "flat" : "cubic"; }
inline std::string to_key(EmGapConvention g) { return g == EmGapConvention::Signed ? "signed" : "positive"; }
inline std::string to_key(EmNegativeFrequency n) { return n == EmNegativeFrequency::Odd ? "odd" : "clamp"; }
inline std::string to_key(GoldenRuleIndexing g) { return g == GoldenRuleIndexing::AsPrinted ? "printed" : "excited"; }
inline std::string to_key(ModeSelection m)
{
    return m == ModeSelection::Additive ? "additive" : m == ModeSelection::NonAdditive ? "nonadditive" : "both";
}

} // namespace detail

inline std::vector<std::pair<std::string, std::string>> Settings::describe() const
{
    using detail::fmt;
    const ModelParams& p = params;
    return {
        {"epsilon_cm", fmt(p.epsilon_cm)},
        {"alpha_over_epsilon", fmt(alpha_over_epsilon)},
        {"nu0_cm", fmt(p.nu0_cm)},
        {"gamma_cm", fmt(p.gamma_cm)},
        {"gamma0_per_ps", fmt(p.gamma0_per_ps)},
        {"T_R_K", fmt(p.T_R_K)},
        {"T_EM_K", fmt(p.T_EM_K)},
        {"fock_dim", std::to_string(p.fock_dim)},
        {"fock_max", std::to_string(fock_max)},
        {"truncation_tolerance", fmt(truncation_tolerance)},
        {"em_shape", detail::to_key(p.em_shape)},
        {"em_gap_convention", detail::to_key(p.em_gap)},
        {"em_negative_frequency", detail::to_key(p.em_negative)},
        {"include_residual_counterterm", p.include_residual_counterterm ? "true" : "false"},
        {"residual_cutoff_cm", fmt(p.residual_cutoff_cm)},
        {"alpha_grid", format_list(alpha_grid)},
        {"steady_alpha_grid", format_list(steady_alpha_grid)},
        {"steady_T_EM_K", format_list(steady_T_EM_K)},
        {"sweep_alpha_over_epsilon", fmt(sweep_alpha_over_epsilon)},
        {"T_EM_grid_K", format_list(T_EM_grid_K)},
        {"t_max_ps", fmt(t_max_ps)},
        {"t_points", std::to_string(t_points)},
        {"ibm_t_max_ps", fmt(ibm_t_max_ps)},
        {"ibm_t_points", std::to_string(ibm_t_points)},
        {"ibm_fock_dim", std::to_string(ibm_fock_dim)},
        {"ibm_tolerance", fmt(ibm_tolerance)},
        {"d_grid", format_list(d_grid)},
        {"golden_rule_indexing", detail::to_key(golden_rule_indexing)},
        {"mode", detail::to_key(mode)},
    };
}

/// Resolves a Config into Settings; unknown keys and bad values raise ConfigError.
inline Settings resolve_settings(const Config& cfg)
{
    Settings s;
    ModelParams& p = s.params;
    bool alpha_absolute = false;
    double alpha_cm = 0.0;
    bool have_ratio = false;

    for (const auto& [key, value] : cfg.values()) {
        if (key == "epsilon_cm") p.epsilon_cm = parse_double(key, value);
        else if (key == "alpha_over_epsilon") { s.alpha_over_epsilon = parse_double(key, value); have_ratio = true; }
        else if (key == "alpha_cm") { alpha_cm = parse_double(key, value); alpha_absolute = true; }
        else if (key == "nu0_cm") p.nu0_cm = parse_double(key, value);
        else if (key == "gamma_cm") p.gamma_cm = parse_double(key, value);
        else if (key == "lifetime_ps") {
            const double tau = parse_double(key, value);
            if (!(tau > 0.0)) throw ConfigError("'lifetime_ps' must be > 0");
            p.gamma0_per_ps = 1.0 / tau;
        }
        else if (key == "gamma0_per_ps") p.gamma0_per_ps = parse_double(key, value);
        else if (key == "T_R_K") p.T_R_K = parse_double(key, value);
        else if (key == "T_EM_K") p.T_EM_K = parse_double(key, value);
        else if (key == "fock_dim") p.fock_dim = parse_int(key, value);
        else if (key == "fock_max") s.fock_max = parse_int(key, value);
        else if (key == "truncation_tolerance") s.truncation_tolerance = parse_double(key, value);
        else if (key == "em_shape") {
            if (value == "cubic") p.em_shape = EmShape::Cubic;
            else if (value == "flat") p.em_shape = EmShape::Flat;
            else throw ConfigError("'em_shape' must be cubic or flat");
        }
        else if (key == "em_gap_convention") {
            if (value == "positive") p.em_gap = EmGapConvention::Positive;
            else if (value == "signed") p.em_gap = EmGapConvention::Signed;
            else throw ConfigError("'em_gap_convention' must be positive or signed");
        }
        else if (key == "em_negative_frequency") {
            if (value == "clamp") p.em_negative = EmNegativeFrequency::Clamp;
            else if (value == "odd") p.em_negative = EmNegativeFrequency::Odd;
            else throw ConfigError("'em_negative_frequency' must be clamp or odd");
        }
        else if (key == "include_residual_counterterm") p.include_residual_counterterm = parse_bool(key, value);
        else if (key == "residual_cutoff_cm") p.residual_cutoff_cm = parse_double(key, value);
        else if (key == "alpha_grid") s.alpha_grid = parse_list(key, value);
        else if (key == "steady_alpha_grid") s.steady_alpha_grid = parse_list(key, value);
        else if (key == "steady_T_EM_K") s.steady_T_EM_K = parse_list(key, value);
        else if (key == "sweep_alpha_over_epsilon") s.sweep_alpha_over_epsilon = parse_double(key, value);
        else if (key == "T_EM_grid_K") s.T_EM_grid_K = parse_list(key, value);
        else if (key == "t_max_ps") s.t_max_ps = parse_double(key, value);
        else if (key == "t_points") s.t_points = parse_int(key, value);
        else if (key == "ibm_t_max_ps") s.ibm_t_max_ps = parse_double(key, value);
        else if (key == "ibm_t_points") s.ibm_t_points = parse_int(key, value);
        else if (key == "ibm_fock_dim") s.ibm_fock_dim = parse_int(key, value);
        else if (key == "ibm_tolerance") s.ibm_tolerance = parse_double(key, value);
        else if (key == "d_grid") s.d_grid = parse_list(key, value);
        else if (key == "golden_rule_indexing") {
            if (value == "excited") s.golden_rule_indexing = GoldenRuleIndexing::ExcitedThermal;
            else if (value == "printed") s.golden_rule_indexing = GoldenRuleIndexing::AsPrinted;
            else throw ConfigError("'golden_rule_indexing' must be excited or printed");
        }
        else if (key == "mode") s.mode = parse_mode(value);
        else throw ConfigError("unknown configuration key '" + key + "'");
    }

    if (alpha_absolute && have_ratio) throw ConfigError("set either 'alpha_cm' or 'alpha_over_epsilon', not both");
    if (alpha_absolute) s.alpha_over_epsilon = alpha_cm / p.epsilon_cm;
    p.alpha_cm = s.alpha_over_epsilon * p.epsilon_cm;
    p.validate();

    require_increasing("alpha_grid", s.alpha_grid);
    require_increasing("steady_alpha_grid", s.steady_alpha_grid);
    require_increasing("steady_T_EM_K", s.steady_T_EM_K);
    require_increasing("T_EM_grid_K", s.T_EM_grid_K);
    require_increasing("d_grid", s.d_grid);
    for (double a : s.alpha_grid) if (a < 0.0) throw ConfigError("'alpha_grid' entries must be >= 0");
    for (double a : s.steady_alpha_grid) if (a < 0.0) throw ConfigError("'steady_alpha_grid' entries must be >= 0");
    for (double t : s.steady_T_EM_K) if (t <= 0.0) throw ConfigError("'steady_T_EM_K' entries must be > 0");
    for (double t : s.T_EM_grid_K) if (t <= 0.0) throw ConfigError("'T_EM_grid_K' entries must be > 0");
    if (s.sweep_alpha_over_epsilon < 0.0) throw ConfigError("'sweep_alpha_over_epsilon' must be >= 0");
    if (s.fock_max < p.fock_dim) throw ConfigError("'fock_max' must be >= 'fock_dim'");
    if (!(s.truncation_tolerance > 0.0)) throw ConfigError("'truncation_tolerance' must be > 0");
    if (!(s.t_max_ps > 0.0) || s.t_points < 2) throw ConfigError("time grid needs t_max_ps > 0 and t_points >= 2");
    if (!(s.ibm_t_max_ps > 0.0) || s.ibm_t_points < 2) throw ConfigError("IBM grid needs ibm_t_max_ps > 0 and ibm_t_points >= 2");
    if (s.ibm_fock_dim < 2) throw ConfigError("'ibm_fock_dim' must be >= 2");
    if (!(s.ibm_tolerance > 0.0)) throw ConfigError("'ibm_tolerance' must be > 0");
    return s;
}

} // namespace ccme
