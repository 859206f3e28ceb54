// experiments.hpp: named experiments, converged observables and the validation suite

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccme/cc_mapping.hpp"
#include "ccme/config.hpp"
#include "ccme/dissipators.hpp"
#include "ccme/dynamics.hpp"
#include "ccme/io.hpp"
#include "ccme/model.hpp"
#include "ccme/oracles.hpp"

namespace ccme {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitValidation = 4;

inline const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names{"decay-dynamics",   "rate-sweep",         "steady-sweep-alpha",
                                                "steady-sweep-temperature", "ibm-validate", "golden-rule-table",
                                                "run_all_validations"};
    return names;
}

// ---------------------------------------------------------------------------
// Converged observables

struct ConvergedRate {
    double relative = 0.0;  // Gamma_{e->g} / Gamma0
    int fock_dim = 0;
    std::vector<std::pair<int, double>> iterates;
    std::vector<std::string> warnings;
};

inline ConvergedRate converged_emission_rate(ModelParams p, EmTreatment mode, const Settings& s)
{
    std::vector<std::string> warnings;
    auto task = [&](int m) {
        p.fock_dim = m;
        const auto L = assemble_liouvillian(mode, p);
        auto r = emission_rate(L);
        warnings = std::move(r.warnings);
        return r.relative;
    };
    const Converged c = converge_truncation(task, p.fock_dim, s.truncation_tolerance, s.fock_max);
    return {c.value, c.fock_dim, c.iterates, warnings};
}

struct ConvergedSteadyState {
    double population = 0.0;  // <sigma^dag sigma>
    int fock_dim = 0;
    SteadyState state;
    std::vector<std::pair<int, double>> iterates;
};

/// Escalates M with the bordered solve, then repeats the final M with the SVD
/// solver for the residual and kernel diagnostics.
inline ConvergedSteadyState converged_steady_state(ModelParams p, EmTreatment mode, const Settings& s)
{
    auto task = [&](int m) {
        p.fock_dim = m;
        const auto L = assemble_liouvillian(mode, p);
        return excited_population(L.hs, steady_state(L, SteadySolver::Lu).rho);
    };
    const Converged c = converge_truncation(task, p.fock_dim, s.truncation_tolerance, s.fock_max);
    p.fock_dim = c.fock_dim;
    const auto L = assemble_liouvillian(mode, p);
    ConvergedSteadyState out;
    out.state = steady_state(L, SteadySolver::Svd);
    out.population = excited_population(L.hs, out.state.rho);
    out.fock_dim = c.fock_dim;
    out.iterates = c.iterates;
    return out;
}

/// n(eps) / (2 n(eps) + 1), the two-level Gibbs population at T_EM.
inline double two_level_thermal_population(const ModelParams& p)
{
    const double n = bose_occupation(p.epsilon_cm, p.T_EM_K);
    return n / (2.0 * n + 1.0);
}

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentSpec {
    std::string name;
    Settings settings;
    std::filesystem::path out_dir = ".";
    bool svg = false;
    int workers = 1;
};

struct ExperimentOutput {
    int exit_code = kExitOk;
    CsvTable table;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> messages;
};

namespace detail {

inline std::string label(EmTreatment m) { return std::string(to_string(m)); }

inline CsvTable table_with_metadata(const std::string& name, const Settings& s)
{
    CsvTable t;
    t.add_meta("experiment", name);
    t.add_meta("code_version", kCodeVersion);
    for (const auto& [k, v] : s.describe()) t.add_meta(k, v);
    return t;
}

inline void emit(const ExperimentSpec& spec, ExperimentOutput& out, const LinePlot* plot)
{
    const auto csv = spec.out_dir / (spec.name + ".csv");
    write_file_atomically(csv, out.table.str());
    out.files.push_back(csv);
    if (spec.svg && plot) {
        const auto svg = spec.out_dir / (spec.name + ".svg");
        write_file_atomically(svg, plot->svg());
        out.files.push_back(svg);
    }
}

inline std::string iterates_text(const std::vector<std::pair<int, double>>& it)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < it.size(); ++i) os << (i ? " " : "") << it[i].first << ":" << format_number(it[i].second);
    return os.str();
}

inline ExperimentOutput run_rate_sweep(const ExperimentSpec& spec)
{
    const Settings& s = spec.settings;
    const auto modes = treatments(s.mode);
    ExperimentOutput out;
    out.table = table_with_metadata(spec.name, s);
    out.table.columns.push_back({"alpha_over_epsilon", "1"});
    for (auto m : modes) {
        out.table.columns.push_back({"rate_" + label(m), "Gamma0"});
        out.table.columns.push_back({"M_used_" + label(m), "1"});
    }
    out.table.columns.push_back({"rate_golden_rule", "Gamma0"});

    struct Point {
        std::vector<ConvergedRate> rates;
        double golden = 0.0;
    };
    const auto points = parallel_map(
        s.alpha_grid,
        [&](double a) {
            ModelParams p = s.params;
            p.alpha_cm = a * p.epsilon_cm;
            Point pt;
            for (auto m : modes) pt.rates.push_back(converged_emission_rate(p, m, s));
            pt.golden = golden_rule_rate_at(p, map_cc(p).displacement(), {GoldenRuleDensity::True, s.golden_rule_indexing}).relative;
            return pt;
        },
        spec.workers);

    LinePlot plot{"Emission rate", "alpha / epsilon", "Gamma_e->g / Gamma0", false, false, {}, {}};
    for (std::size_t k = 0; k < modes.size(); ++k) plot.series.push_back({label(modes[k]), s.alpha_grid, {}, modes[k] == EmTreatment::Additive});
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::vector<double> row{s.alpha_grid[i]};
        for (std::size_t k = 0; k < modes.size(); ++k) {
            const auto& r = points[i].rates[k];
            row.push_back(r.relative);
            row.push_back(r.fock_dim);
            plot.series[k].y.push_back(r.relative);
            out.table.add_meta("M_used " + label(modes[k]) + " alpha_over_epsilon=" + format_number(s.alpha_grid[i]),
                               std::to_string(r.fock_dim) + " (iterates " + iterates_text(r.iterates) + ")");
            for (const auto& w : r.warnings) {
                out.messages.push_back(label(modes[k]) + " alpha_over_epsilon=" + format_number(s.alpha_grid[i]) + ": " + w);
            }
        }
        row.push_back(points[i].golden);
        out.table.add_row(std::move(row));
    }
    emit(spec, out, &plot);
    return out;
}

inline ExperimentOutput run_decay_dynamics(const ExperimentSpec& spec)
{
    const Settings& s = spec.settings;
    const auto modes = treatments(s.mode);
    const auto times = uniform_grid(0.0, s.t_max_ps, s.t_points);
    ExperimentOutput out;
    out.table = table_with_metadata(spec.name, s);
    out.table.columns.push_back({"t", "ps"});

    struct Run {
        EmTreatment mode;
        double alpha;
        int fock_dim;
        double rate;
        TimeSeries ts;
        RateFit fit;
    };
    std::vector<std::pair<EmTreatment, double>> jobs;
    for (auto m : modes) for (double a : s.alpha_grid) jobs.emplace_back(m, a);
    std::vector<double> job_ids(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) job_ids[i] = static_cast<double>(i);

    const auto runs = parallel_map(
        job_ids,
        [&](double id) {
            const auto [mode, a] = jobs[static_cast<std::size_t>(id)];
            ModelParams p = s.params;
            p.alpha_cm = a * p.epsilon_cm;
            const ConvergedRate r = converged_emission_rate(p, mode, s);
            p.fock_dim = r.fock_dim;
            const auto L = assemble_liouvillian(mode, p);
            const auto init = make_initial_state({InitialKind::ExcitedThermal, {}}, p, L.cc, L.hs);
            Run run{mode, a, r.fock_dim, r.relative, propagate(L, init.rho, times), {}};
            run.fit = fit_exponential_rate(run.ts);
            return run;
        },
        spec.workers);

    LinePlot plot{"Excited population", "t (ps)", "<sigma^dag sigma>", false, false, {}, {}};
    for (const auto& r : runs) {
        const std::string tag = label(r.mode) + "_alpha" + format_number(r.alpha);
        out.table.columns.push_back({"population_" + tag, "1"});
        const double fitted = r.fit.rate / s.params.gamma0_per_ps;
        out.table.add_meta("series " + tag,
                           "M_used=" + std::to_string(r.fock_dim) + " rate=" + format_number(r.rate) +
                               " fitted_rate=" + format_number(fitted) + " min_eigenvalue=" +
                               format_number(*std::min_element(r.ts.min_eigenvalue.begin(), r.ts.min_eigenvalue.end())));
        if (std::abs(fitted - r.rate) > 0.05 * std::abs(r.rate)) {
            out.messages.push_back("fitted decay rate for " + tag + " differs from the emission rate by more than 5%");
        }
        for (const auto& w : r.ts.warnings) out.messages.push_back(tag + ": " + w);
        plot.series.push_back({tag, times, r.ts.excited_population, r.mode == EmTreatment::Additive});
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> row{times[i]};
        for (const auto& r : runs) row.push_back(r.ts.excited_population[i]);
        out.table.add_row(std::move(row));
    }
    emit(spec, out, &plot);
    return out;
}

inline ExperimentOutput run_steady_sweep_alpha(const ExperimentSpec& spec)
{
    const Settings& s = spec.settings;
    const auto modes = treatments(s.mode);
    ExperimentOutput out;
    out.table = table_with_metadata(spec.name, s);
    out.table.columns = {{"alpha_over_epsilon", "1"}, {"T_EM", "K"}};
    for (auto m : modes) {
        out.table.columns.push_back({"population_" + label(m), "1"});
        out.table.columns.push_back({"M_used_" + label(m), "1"});
        out.table.columns.push_back({"residual_" + label(m), "ps^-1"});
    }

    std::vector<std::pair<double, double>> jobs;  // (T, alpha)
    for (double t : s.steady_T_EM_K) for (double a : s.steady_alpha_grid) jobs.emplace_back(t, a);
    std::vector<double> ids(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) ids[i] = static_cast<double>(i);

    const auto results = parallel_map(
        ids,
        [&](double id) {
            const auto [t, a] = jobs[static_cast<std::size_t>(id)];
            ModelParams p = s.params;
            p.alpha_cm = a * p.epsilon_cm;
            p.T_EM_K = t;
            std::vector<ConvergedSteadyState> r;
            for (auto m : modes) r.push_back(converged_steady_state(p, m, s));
            return r;
        },
        spec.workers);

    LinePlot plot{"Steady-state population", "alpha / epsilon", "<sigma^dag sigma>", false, false, {}, {0.5}};
    for (double t : s.steady_T_EM_K) {
        for (auto m : modes) plot.series.push_back({label(m) + " T_EM=" + format_number(t) + " K", {}, {}, m == EmTreatment::Additive});
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto [t, a] = jobs[i];
        const std::size_t ti = i / s.steady_alpha_grid.size();
        std::vector<double> row{a, t};
        for (std::size_t k = 0; k < modes.size(); ++k) {
            const auto& r = results[i][k];
            row.push_back(r.population);
            row.push_back(r.fock_dim);
            row.push_back(r.state.residual);
            auto& series = plot.series[ti * modes.size() + k];
            series.x.push_back(a);
            series.y.push_back(r.population);
        }
        out.table.add_row(std::move(row));
    }
    emit(spec, out, &plot);
    return out;
}

inline ExperimentOutput run_steady_sweep_temperature(const ExperimentSpec& spec)
{
    const Settings& s = spec.settings;
    const auto modes = treatments(s.mode);
    ExperimentOutput out;
    out.table = table_with_metadata(spec.name, s);
    out.table.columns = {{"T_EM", "K"}};
    for (auto m : modes) {
        out.table.columns.push_back({"population_" + label(m), "1"});
        out.table.columns.push_back({"M_used_" + label(m), "1"});
        out.table.columns.push_back({"residual_" + label(m), "ps^-1"});
    }
    out.table.columns.push_back({"two_level_thermal", "1"});

    const auto results = parallel_map(
        s.T_EM_grid_K,
        [&](double t) {
            ModelParams p = s.params;
            p.alpha_cm = s.sweep_alpha_over_epsilon * p.epsilon_cm;
            p.T_EM_K = t;
            std::vector<ConvergedSteadyState> r;
            for (auto m : modes) r.push_back(converged_steady_state(p, m, s));
            return r;
        },
        spec.workers);

    LinePlot plot{"Steady-state population, alpha/epsilon = " + format_number(s.sweep_alpha_over_epsilon), "T_EM (K)",
                  "<sigma^dag sigma>", true, false, {}, {0.5}};
    for (auto m : modes) plot.series.push_back({label(m), {}, {}, m == EmTreatment::Additive});
    for (std::size_t i = 0; i < s.T_EM_grid_K.size(); ++i) {
        ModelParams p = s.params;
        p.T_EM_K = s.T_EM_grid_K[i];
        std::vector<double> row{s.T_EM_grid_K[i]};
        for (std::size_t k = 0; k < modes.size(); ++k) {
            const auto& r = results[i][k];
            row.push_back(r.population);
            row.push_back(r.fock_dim);
            row.push_back(r.state.residual);
            plot.series[k].x.push_back(s.T_EM_grid_K[i]);
            plot.series[k].y.push_back(r.population);
        }
        row.push_back(two_level_thermal_population(p));
        out.table.add_row(std::move(row));
    }
    emit(spec, out, &plot);
    return out;
}

inline ExperimentOutput run_ibm_validate(const ExperimentSpec& spec)
{
    const Settings& s = spec.settings;
    ModelParams p = s.params;
    p.fock_dim = s.ibm_fock_dim;
    const auto times = uniform_grid(0.0, s.ibm_t_max_ps, s.ibm_t_points);
    const IbmComparison cmp = validate_ccme_vs_ibm(p, times);

    ExperimentOutput out;
    out.table = table_with_metadata(spec.name, s);
    out.table.add_meta("M_used", std::to_string(cmp.fock_dim));
    out.table.add_meta("max_deviation_sigma_x", format_number(cmp.max_deviation_x));
    out.table.add_meta("max_deviation_sigma_y", format_number(cmp.max_deviation_y));
    out.table.add_meta("max_population_drift", format_number(cmp.max_population_drift));
    out.table.columns = {{"t", "ps"},
                         {"sigma_x_ccme", "1"},
                         {"sigma_x_exact", "1"},
                         {"sigma_y_ccme", "1"},
                         {"sigma_y_exact", "1"}};
    for (std::size_t i = 0; i < times.size(); ++i) {
        out.table.add_row({times[i], cmp.ccme_sigma_x[i], cmp.exact_sigma_x[i], cmp.ccme_sigma_y[i], cmp.exact_sigma_y[i]});
    }
    LinePlot plot{"Coherence dynamics, Gamma0 = 0", "t (ps)", "<sigma>", false, false, {}, {}};
    plot.series = {{"sigma_x master equation", times, cmp.ccme_sigma_x, false},
                   {"sigma_x exact", times, cmp.exact_sigma_x, true},
                   {"sigma_y master equation", times, cmp.ccme_sigma_y, false},
                   {"sigma_y exact", times, cmp.exact_sigma_y, true}};
    emit(spec, out, &plot);

    std::ostringstream os;
    os << "max deviation " << cmp.max_deviation() << " (tolerance " << s.ibm_tolerance << "), population drift "
       << cmp.max_population_drift;
    out.messages.push_back(os.str());
    if (!(cmp.max_deviation() < s.ibm_tolerance) || !(cmp.max_population_drift < 1e-10)) out.exit_code = kExitValidation;
    return out;
}

inline ExperimentOutput run_golden_rule_table(const ExperimentSpec& spec)
{
    const Settings& s = spec.settings;
    ExperimentOutput out;
    out.table = table_with_metadata(spec.name, s);
    out.table.columns = {{"d", "1"},
                         {"alpha_over_epsilon", "1"},
                         {"rate_true_density", "Gamma0"},
                         {"rate_frozen_density", "Gamma0"},
                         {"rate_alternate_indexing", "Gamma0"},
                         {"fc_00", "1"},
                         {"fc_method_disagreement", "1"}};
    const auto alternate = s.golden_rule_indexing == GoldenRuleIndexing::ExcitedThermal ? GoldenRuleIndexing::AsPrinted
                                                                                       : GoldenRuleIndexing::ExcitedThermal;
    LinePlot plot{"Golden-rule emission rate", "d = eta / Omega", "Gamma_e->g / Gamma0", false, false, {}, {}};
    plot.series = {{"true density", {}, {}, false}, {"frozen density", {}, {}, true}};
    for (double d : s.d_grid) {
        const ModelParams& p = s.params;
        const FCTable fc = fc_factors(d, golden_rule_fock_dim(d));
        const CCParams cc = map_cc(p);
        const double r_true = golden_rule_rate(p, cc, fc, {GoldenRuleDensity::True, s.golden_rule_indexing}).relative;
        const double r_frozen = golden_rule_rate(p, cc, fc, {GoldenRuleDensity::Frozen, s.golden_rule_indexing}).relative;
        const double r_alt = golden_rule_rate(p, cc, fc, {GoldenRuleDensity::True, alternate}).relative;
        const double alpha = 2.0 * p.nu0_cm * d * d / std::numbers::pi / p.epsilon_cm;
        out.table.add_row({d, alpha, r_true, r_frozen, r_alt, fc(0, 0), fc.max_disagreement});
        plot.series[0].x.push_back(d);
        plot.series[0].y.push_back(r_true);
        plot.series[1].x.push_back(d);
        plot.series[1].y.push_back(r_frozen);
    }
    emit(spec, out, &plot);
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Validation suite

struct ValidationCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool all_passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
    }

    std::string str() const
    {
        std::ostringstream os;
        for (const auto& c : checks) {
            os << (c.passed ? "PASS" : "FAIL") << "  " << std::left << std::setw(44) << c.name << " value "
               << format_number(c.value) << "  threshold " << format_number(c.threshold);
            if (!c.detail.empty()) os << "  (" << c.detail << ")";
            os << "\n";
        }
        os << (all_passed() ? "all checks passed" : "some checks FAILED") << "\n";
        return os.str();
    }
};

inline Operator random_hermitian(int dim, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Operator a(dim, dim);
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) a(i, j) = Complex(u(rng), u(rng));
    }
    return 0.5 * (a + a.adjoint());
}

/// max |Tr L[rho]| and max |L[rho]^dag - L[rho]| over random Hermitian rho.
inline std::pair<double, double> trace_and_hermiticity_defects(const LiouvillianSpec& L, int samples, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    double tr = 0.0;
    double herm = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Operator rho = random_hermitian(L.dim(), rng);
        const Operator out = L.apply(rho);
        tr = std::max(tr, std::abs(out.trace()));
        herm = std::max(herm, hermiticity_defect(out));
    }
    return {tr, herm};
}

inline ValidationReport run_all_validations(const Settings& s)
{
    ValidationReport report;
    auto guarded = [&](const std::string& name, double threshold, const std::function<ValidationCheck()>& f) {
        try {
            ValidationCheck c = f();
            c.name = name;
            c.threshold = threshold;
            report.checks.push_back(std::move(c));
        } catch (const std::exception& e) {
            report.checks.push_back({name, false, std::numeric_limits<double>::quiet_NaN(), threshold, e.what()});
        }
    };

    for (auto mode : {EmTreatment::Additive, EmTreatment::NonAdditive}) {
        const auto L = assemble_liouvillian(mode, s.params);
        const auto [tr, herm] = trace_and_hermiticity_defects(L, 1000, 20240917);
        report.checks.push_back({"trace preservation (" + detail::label(mode) + ")", tr < 1e-10, tr, 1e-10, "1000 random Hermitian inputs"});
        report.checks.push_back({"Hermiticity preservation (" + detail::label(mode) + ")", herm < 1e-10, herm, 1e-10, ""});
    }

    guarded("detailed balance at alpha = 0", 1e-8, [&] {
        double worst = 0.0;
        for (double t : s.steady_T_EM_K) {
            ModelParams p = s.params;
            p.alpha_cm = 0.0;
            p.T_EM_K = t;
            const auto L = assemble_liouvillian(EmTreatment::NonAdditive, p);
            const double pop = excited_population(L.hs, steady_state(L).rho);
            worst = std::max(worst, std::abs(pop - two_level_thermal_population(p)));
        }
        return ValidationCheck{"", worst < 1e-8, worst, 0.0, "non-additive steady state vs two-level Gibbs state"};
    });

    guarded("additive alpha invariance", 1e-10, [&] {
        std::vector<double> rates, pops;
        for (double a : s.steady_alpha_grid) {
            ModelParams p = s.params;
            p.alpha_cm = a * p.epsilon_cm;
            p.T_EM_K = s.steady_T_EM_K.front();
            rates.push_back(converged_emission_rate(p, EmTreatment::Additive, s).relative);
            pops.push_back(converged_steady_state(p, EmTreatment::Additive, s).population);
        }
        double worst = 0.0;
        for (std::size_t i = 1; i < rates.size(); ++i) {
            worst = std::max(worst, std::abs(rates[i] - rates[0]) / std::abs(rates[0]));
            worst = std::max(worst, std::abs(pops[i] - pops[0]) / std::abs(pops[0]));
        }
        return ValidationCheck{"", worst < 1e-10, worst, 0.0, "emission rate and steady population"};
    });

    guarded("Franck-Condon cross-check", 1e-8, [&] {
        double worst = 0.0;
        for (double d = 0.0; d <= 3.0 + 1e-12; d += 0.5) worst = std::max(worst, fc_factors(d, 40).max_disagreement);
        return ValidationCheck{"", worst < 1e-8, worst, 0.0, "closed form vs matrix exponential, M = 40"};
    });

    guarded("golden-rule additive collapse", 1e-12, [&] {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double d : s.d_grid) {
            const double r = golden_rule_rate_at(s.params, d, {GoldenRuleDensity::Frozen, s.golden_rule_indexing}).relative;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        const double spread = (hi - lo) / hi;
        return ValidationCheck{"", spread < 1e-12, spread, 0.0, "frozen density, relative spread over d"};
    });

    guarded("IBM exact solution", s.ibm_tolerance, [&] {
        ModelParams p = s.params;
        p.fock_dim = s.ibm_fock_dim;
        const auto cmp = validate_ccme_vs_ibm(p, uniform_grid(0.0, s.ibm_t_max_ps, s.ibm_t_points));
        std::ostringstream os;
        os << "population drift " << cmp.max_population_drift;
        const bool ok = cmp.max_deviation() < s.ibm_tolerance && cmp.max_population_drift < 1e-10;
        return ValidationCheck{"", ok, cmp.max_deviation(), 0.0, os.str()};
    });

    ModelParams strong = s.params;
    strong.alpha_cm = s.sweep_alpha_over_epsilon * strong.epsilon_cm;
    strong.T_EM_K = s.steady_T_EM_K.back();
    guarded("steady-state residual and uniqueness", 1e-10, [&] {
        const auto r = converged_steady_state(strong, EmTreatment::NonAdditive, s);
        const double gap = std::min(r.state.second_singular, r.state.coherence_singular);
        std::ostringstream os;
        os << "M = " << r.fock_dim << ", next singular value " << gap;
        const bool ok = r.state.residual < 1e-10 && gap > 1e-6 * strong.gamma0_per_ps;
        return ValidationCheck{"", ok, r.state.residual, 0.0, os.str()};
    });

    guarded("Fock truncation convergence", s.truncation_tolerance, [&] {
        const auto r = converged_steady_state(strong, EmTreatment::NonAdditive, s);
        const auto& it = r.iterates;
        const double change = std::abs(it.back().second - it[it.size() - 2].second) / std::abs(it.back().second);
        ModelParams rp = s.params;
        rp.alpha_cm = s.alpha_grid.back() * rp.epsilon_cm;
        const auto rate = converged_emission_rate(rp, EmTreatment::NonAdditive, s);
        const double rate_change = std::abs(rate.iterates.back().second - rate.iterates[rate.iterates.size() - 2].second) /
                                   std::abs(rate.relative);
        std::ostringstream os;
        os << "steady state M = " << r.fock_dim << ", rate M = " << rate.fock_dim;
        const double worst = std::max(change, rate_change);
        return ValidationCheck{"", worst < s.truncation_tolerance, worst, 0.0, os.str()};
    });

    return report;
}

// ---------------------------------------------------------------------------

inline ExperimentOutput run_experiment(const ExperimentSpec& spec)
{
    ExperimentOutput out;
    try {
        if (spec.workers < 1) throw ConfigError("workers must be >= 1");
        if (spec.name == "rate-sweep") return detail::run_rate_sweep(spec);
        if (spec.name == "decay-dynamics") return detail::run_decay_dynamics(spec);
        if (spec.name == "steady-sweep-alpha") return detail::run_steady_sweep_alpha(spec);
        if (spec.name == "steady-sweep-temperature") return detail::run_steady_sweep_temperature(spec);
        if (spec.name == "ibm-validate") return detail::run_ibm_validate(spec);
        if (spec.name == "golden-rule-table") return detail::run_golden_rule_table(spec);
        if (spec.name == "run_all_validations") {
            const ValidationReport r = run_all_validations(spec.settings);
            out.messages.push_back(r.str());
            const auto path = spec.out_dir / "validations.txt";
            write_file_atomically(path, r.str());
            out.files.push_back(path);
            out.exit_code = r.all_passed() ? kExitOk : kExitValidation;
            return out;
        }
        throw ConfigError("unknown experiment '" + spec.name + "'");
    } catch (const ConfigError& e) {
        out.exit_code = kExitConfig;
        out.messages.emplace_back(e.what());
    } catch (const DimensionMismatch& e) {
        out.exit_code = kExitConfig;
        out.messages.emplace_back(e.what());
    } catch (const ConvergenceError& e) {
        out.exit_code = kExitConvergence;
        out.messages.emplace_back(e.what());
    }
    return out;
}

} // namespace ccme
