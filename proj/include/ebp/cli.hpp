/*
   Copyright 2026 The ebp Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ebp/analysis.hpp"
#include "ebp/error.hpp"
#include "ebp/offspring.hpp"
#include "ebp/oracle.hpp"
#include "ebp/pgf.hpp"
#include "ebp/report.hpp"
#include "ebp/scenario.hpp"
#include "ebp/simulate.hpp"

namespace ebp::cli {

enum ExitCode : int { Success = 0, ConfigFailure = 2, NumericalFailure = 3 };

struct Options {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> paths;
    unsigned workers = 0;
    std::string out;
    std::uint64_t generations = 5;
    std::uint64_t size_cap = default_size_cap;
};

namespace detail {

inline SimConfig effective_config(const Scenario& s, const Options& opt)
{
    SimConfig c = s.sim;
    if (opt.seed)
        c.seed = *opt.seed;
    if (opt.paths) {
        if (*opt.paths < 1 || *opt.paths > std::numeric_limits<std::uint32_t>::max())
            throw ConfigError("--paths", "must lie in [1, 2^32 - 1]");
        c.paths = *opt.paths;
    }
    return c;
}

inline std::string describe(const GammaSpec& g)
{
    return "gamma(shape=" + format_real(g.params.shape) + ", scale=" + format_real(g.params.scale)
           + ", mean=" + format_real(g.params.mean()) + "), "
           + std::to_string(g.max_count.value_or(default_cell_count(g.params))) + " unit cells, renormalized";
}

inline std::string describe_offspring(const Scenario& s)
{
    if (const auto* p = std::get_if<std::vector<double>>(&s.offspring))
        return "explicit, " + std::to_string(p->size()) + " atoms";
    return describe(std::get<GammaSpec>(s.offspring));
}

inline void print_law_summary(std::ostream& out, const char* label, const OffspringDistribution& d)
{
    const auto cls = classify(d);
    out << label << " R0 = " << format_short(cls.r0) << " (" << to_string(cls.kind) << ")";
    try {
        const auto ext = extinction_probability(d);
        out << ", pi = " << format_short(ext.pi);
    } catch (const Error& e) {
        out << ", pi unavailable (" << to_string(e.code()) << ")";
    }
    out << ", mean = " << format_short(mean(d)) << ", variance = " << format_short(variance(d)) << '\n';
}

inline void write_file(const std::string& path, const auto& rows)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("--out", "cannot open '" + path + "' for writing");
    write_csv(f, rows);
    if (!f)
        throw ConfigError("--out", "failed writing '" + path + "'");
}

inline void print_ensemble(std::ostream& out, const char* label, const EnsembleStats& s)
{
    const double se = std::sqrt(s.extinct_fraction * (1.0 - s.extinct_fraction) / static_cast<double>(s.paths));
    out << label << "extinct fraction      " << format_short(s.extinct_fraction) << " (se " << format_short(se)
        << ")\n";
    out << label << "mean extinction time  "
        << (s.extinct_count > 0 ? format_short(s.mean_extinction_time) : std::string("n/a"))
        << " generations (extinct paths only)\n";
    out << label << "restricted mean tau   " << format_short(s.restricted_mean_extinction_time)
        << " generations (censored paths count as " << s.max_generations << ")\n";
    out << label << "censored paths        " << s.censored_count << " (escaped " << s.escaped_count << ")\n";
}

} // namespace detail

/// R0, criticality, pi, pi^N and pi_n for n = 1..20.
inline int cmd_extinction(const Scenario& s, const Options& opt, std::ostream& out, std::ostream& err)
{
    const auto dist = pre_distribution(s);
    const auto config = detail::effective_config(s, opt);
    const auto cls = classify(dist);
    out << "offspring: " << detail::describe_offspring(s) << '\n';
    out << "R0 = " << format_short(cls.r0) << '\n';
    out << "criticality: " << to_string(cls.kind) << '\n';
    ExtinctionResult ext{};
    try {
        ext = extinction_probability(dist);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return NumericalFailure;
    }
    out << "pi = " << format_short(ext.pi) << " (iterations " << ext.iterations << ", residual "
        << format_real(ext.residual) << ")\n";
    out << "pi^N for N = " << config.initial_infected << ": "
        << format_short(std::pow(ext.pi, static_cast<double>(config.initial_infected))) << '\n';
    out << "generation,pi_n\n";
    for (std::uint64_t n = 1; n <= 20; ++n)
        out << n << ',' << format_real(extinction_after_n(dist, n)) << '\n';
    return Success;
}

inline int cmd_simulate(const Scenario& s, const Options& opt, std::ostream& out, std::ostream& err)
{
    const auto dist = pre_distribution(s);
    const auto config = detail::effective_config(s, opt);
    const auto stats = simulate_ensemble(dist, config, opt.workers);
    if (!opt.out.empty())
        detail::write_file(opt.out, simulation_rows(stats));

    out << "offspring: " << detail::describe_offspring(s) << '\n';
    out << "paths " << config.paths << ", horizon " << config.max_generations << ", seed " << config.seed
        << ", initial infected " << config.initial_infected << '\n';
    detail::print_ensemble(out, "", stats);
    try {
        const double pi_n = extinction_probability_multi(dist, config.initial_infected);
        out << "analytic extinction probability " << format_short(pi_n) << '\n';
    } catch (const Error& e) {
        err << "note: analytic extinction probability unavailable: " << e.what() << '\n';
    }
    return Success;
}

inline int cmd_compare(const Scenario& s, const Options& opt, std::ostream& out, std::ostream& err)
{
    if (!s.vaccination)
        throw ConfigError("vaccination", "compare requires a vaccination section");
    const auto pre = pre_distribution(s);
    const auto post = *post_distribution(s);
    const auto config = detail::effective_config(s, opt);

    ScenarioComparison c;
    try {
        c = compare_scenarios(pre, post, config, opt.workers);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return NumericalFailure;
    }
    if (!opt.out.empty())
        detail::write_file(opt.out, comparison_rows(c.pre, c.post));
    if (c.mean_not_reduced)
        err << "warning: post-vaccination mean " << format_short(mean(post))
            << " is not below the pre-vaccination mean " << format_short(mean(pre)) << '\n';

    out << "offspring: " << detail::describe_offspring(s) << '\n';
    if (const auto* t = std::get_if<ThinningSpec>(&*s.vaccination))
        out << "vaccination: thinning, phi = " << format_real(t->phi) << '\n';
    else
        out << "vaccination: " << detail::describe(std::get<GammaSpec>(*s.vaccination)) << '\n';
    out << "paths " << config.paths << ", horizon " << config.max_generations << ", seed " << config.seed << '\n';
    detail::print_law_summary(out, "pre: ", pre);
    detail::print_law_summary(out, "post:", post);
    detail::print_ensemble(out, "pre:  ", c.pre);
    detail::print_ensemble(out, "post: ", c.post);
    out << "tau_a (restricted) = " << format_short(c.restricted_tau_pre) << ", tau_b (restricted) = "
        << format_short(c.restricted_tau_post) << '\n';
    out << "tau_b < tau_a: " << (c.tau_ordering_holds ? "yes" : "no") << ", margin "
        << format_short(c.tau_margin_in_se) << " standard errors\n";
    out << "largest extinction-curve z statistic " << format_short(c.max_curve_z) << '\n';

    const auto pre_kind = classify(pre).kind;
    const auto post_kind = classify(post).kind;
    out << "regime: " << to_string(pre_kind) << " -> " << to_string(post_kind);
    if (pre_kind == Criticality::Supercritical && post_kind != Criticality::Supercritical)
        out << " (vaccination makes eventual extinction certain)";
    out << '\n';

    int code = Success;
    if (const auto* t = std::get_if<ThinningSpec>(&*s.vaccination)) {
        const auto violations = coupling_audit(pre, VaccinationPolicy{t->phi}, config, opt.workers);
        out << "coupling audit: " << config.paths << " paired paths, " << violations << " domination violations\n";
        if (violations != 0) {
            err << "error: coupled vaccinated path exceeded its unvaccinated twin\n";
            code = NumericalFailure;
        }
    }
    return code;
}

inline int cmd_check(const Scenario& s, const Options&, std::ostream& out, std::ostream& err)
{
    const auto* pre_spec = std::get_if<GammaSpec>(&s.offspring);
    if (!pre_spec)
        throw ConfigError("offspring.gamma", "check requires a gamma offspring law");
    if (!s.family)
        throw ConfigError("family", "check requires a family section");
    const GammaParams pre = pre_spec->params;
    const ParameterFamily& family = *s.family;

    const auto cs = cauchy_schwarz_bound(family);
    out << "Cauchy-Schwarz: (sum T_j alpha_j)^2 = " << format_real(cs.lhs) << " <= (sum T_j^2)(sum alpha_j^2) = "
        << format_real(cs.rhs) << " : " << (cs.holds ? "holds" : "VIOLATED")
        << (cs.equality ? " (equality)" : "") << '\n';
    out << "  with discretized means: lhs = " << format_real(cs.discretized_lhs) << ", largest tail mass "
        << format_real(cs.max_tail_mass) << '\n';

    const bool pre_has_peak = ParameterFamily::is_admissible(pre);
    PeakPoint pa{};
    if (pre_has_peak) {
        pa = peak_point(pre);
        out << "pre peak: w_a = " << format_real(pa.location) << ", height " << format_real(pa.height) << '\n';
    } else {
        out << "pre peak: none (shape <= 1, density is decreasing)\n";
    }

    out << "j,shape,scale,mean,mean_below_pre,w_j,height,distance_to_pre\n";
    for (std::size_t j = 0; j < family.size(); ++j) {
        const auto& g = family.members()[j];
        out << j + 1 << ',' << format_real(g.shape) << ',' << format_real(g.scale) << ',' << format_real(g.mean())
            << ',' << (g.mean() < pre.mean() ? "yes" : "no") << ',';
        if (ParameterFamily::is_admissible(g)) {
            const auto pj = peak_point(g);
            out << format_real(pj.location) << ',' << format_real(pj.height) << ','
                << (pre_has_peak ? format_real(peak_distance(pj, pa)) : std::string("n/a")) << '\n';
        } else {
            out << "n/a,n/a,n/a\n";
        }
    }

    std::vector<GammaParams> admissible;
    for (const auto& g : family.members())
        if (ParameterFamily::is_admissible(g))
            admissible.push_back(g);
    if (admissible.size() < family.size())
        out << "peak geometry uses the " << admissible.size() << " member(s) with an interior peak\n";

    if (pre_has_peak && !admissible.empty()) {
        const ParameterFamily peaks(admissible);
        out << "mean peak distance " << format_real(mean_peak_distance(pre, peaks)) << '\n';
        try {
            const auto pf = peak_height_from_distance(pre, peaks);
            out << "peak formula: predicted + " << format_real(pf.predicted_plus) << ", predicted - "
                << format_real(pf.predicted_minus) << '\n';
            out << "  centroid height " << format_real(pf.centroid_height) << " (residual "
                << format_real(pf.residual) << "), mixture density at mean peak "
                << format_real(pf.mixture_density_height) << " (residual " << format_real(pf.residual_mixture)
                << ")\n";
            out << "  distance to centroid " << format_real(pf.centroid_distance) << ", jensen gap "
                << format_real(pf.jensen_gap) << '\n';
        } catch (const Error& e) {
            out << "peak formula not applicable: " << e.what() << '\n';
        }
    }

    const auto pre_dist = realize(*pre_spec);
    double worst = 0.0;
    out << "j,variance_lhs,variance_rhs,residual,mean_shift\n";
    for (std::size_t j = 0; j < family.size(); ++j) {
        const auto post = realize(GammaSpec{family.members()[j], pre_spec->max_count});
        const auto v = variance_difference_identity(pre_dist, post);
        worst = std::max(worst, v.residual);
        out << j + 1 << ',' << format_real(v.lhs) << ',' << format_real(v.rhs) << ',' << format_real(v.residual)
            << ',' << format_real(v.mean_shift) << '\n';
    }
    out << "variance identity: largest residual " << format_real(worst) << '\n';

    out << "regimes:";
    out << " pre " << to_string(classify(pre_dist).kind) << ';';
    for (std::size_t j = 0; j < family.size(); ++j)
        out << " j=" << j + 1 << ' '
            << to_string(classify(realize(GammaSpec{family.members()[j], pre_spec->max_count})).kind)
            << (j + 1 < family.size() ? ";" : "");
    out << '\n';

    if (worst > 1e-12) {
        err << "error: variance identity residual " << format_real(worst) << " exceeds 1e-12\n";
        return NumericalFailure;
    }
    return Success;
}

inline int cmd_oracle(const Scenario& s, const Options& opt, std::ostream& out, std::ostream&)
{
    const auto dist = pre_distribution(s);
    out << "offspring: " << detail::describe_offspring(s) << '\n';
    out << "generation,exact_pr_extinct,pgf_pi_n,overflow_mass\n";
    for (std::uint64_t n = 0; n <= opt.generations; ++n) {
        const auto law = exact_generation_law(dist, n, opt.size_cap);
        out << n << ',' << format_real(law[0]) << ',' << format_real(extinction_after_n(dist, n)) << ','
            << format_real(law.overflow_mass) << '\n';
    }
    const auto law = exact_generation_law(dist, opt.generations, opt.size_cap);
    out << "law of Z_" << opt.generations << "\nsize,probability\n";
    for (const auto& [m, p] : law.support())
        out << m << ',' << format_real(p) << '\n';
    return Success;
}

} // namespace ebp::cli
