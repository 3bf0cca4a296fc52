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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Usage: acceptance <path-to-ebp-binary>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "ebp/analysis.hpp"
#include "ebp/oracle.hpp"
#include "ebp/pgf.hpp"
#include "ebp/simulate.hpp"
#include "test_support.hpp"

namespace {

using namespace ebp;

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

const OffspringDistribution kTwoOrNone = from_probabilities({0.25, 0.0, 0.75});

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double binomial_se(double p, std::uint64_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

Outcome analytic_fixed_point()
{
    const double pi = extinction_probability(kTwoOrNone).pi;
    const double err = std::abs(pi - 1.0 / 3.0);
    return {err <= 1e-10, fmt("pi = %.15f, |pi - 1/3| = %.3g (tol 1e-10)", pi, err)};
}

Outcome critical_branch()
{
    std::mt19937_64 rng(20260101);
    double worst = 0.0;
    int count = 0;
    while (count < 20) {
        const auto d = ebp::testing::random_with_mean_at_most(rng, 1 + count % 6, 1.0);
        if (classify(d).r0 > 1.0)
            continue;
        worst = std::max(worst, std::abs(extinction_probability(d).pi - 1.0));
        ++count;
    }
    // Exactly critical laws belong to the set as well.
    for (const auto& d : {from_probabilities({0.5, 0.0, 0.5}), from_probabilities({0.25, 0.5, 0.25}),
                          from_probabilities({1.0, 0.0, 0.0, 0.5})})
        worst = std::max(worst, std::abs(extinction_probability(d).pi - 1.0));
    return {worst <= 1e-9, fmt("23 laws with R0 <= 1, max |pi - 1| = %.3g (tol 1e-9)", worst)};
}

Outcome geometric_closed_form()
{
    std::vector<double> w;
    for (int i = 0; i < 60; ++i)
        w.push_back(0.4 * std::pow(0.6, i));
    const double pi = extinction_probability(from_probabilities(w)).pi;
    const double err = std::abs(pi - 2.0 / 3.0);
    return {err <= 1e-6, fmt("pi = %.12f, |pi - 2/3| = %.3g (tol 1e-6)", pi, err)};
}

Outcome oracle_equivalence()
{
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> support(1, 3);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = ebp::testing::random_distribution(rng, support(rng));
        for (std::uint64_t n = 0; n <= 6; ++n)
            worst = std::max(worst, std::abs(exact_extinction(d, n) - extinction_after_n(d, n)));
    }
    return {worst <= 1e-10, fmt("50 laws x n <= 6, max deviation %.3g (tol 1e-10)", worst)};
}

Outcome monte_carlo_consistency()
{
    SimConfig c;
    c.seed = 42;
    c.paths = 100000;
    c.max_generations = 100;
    const auto s = simulate_ensemble(kTwoOrNone, c);
    const double tol = 4.0 * binomial_se(1.0 / 3.0, c.paths);
    const double err = std::abs(s.extinct_fraction - 1.0 / 3.0);
    return {err <= tol, fmt("extinct fraction %.5f, |diff| = %.5f (tol %.5f)", s.extinct_fraction, err, tol)};
}

Outcome coupling_domination()
{
    SimConfig c;
    c.seed = 42;
    c.paths = 10000;
    c.max_generations = 100;
    const auto pairs = simulate_coupled(kTwoOrNone, {0.5}, c);
    std::uint64_t violations = 0, comparisons = 0;
    for (const auto& [pre, post] : pairs) {
        const std::size_t n = std::min(pre.sizes.size(), post.sizes.size());
        for (std::size_t g = 0; g < n; ++g, ++comparisons)
            violations += post.sizes[g] > pre.sizes[g];
    }
    return {violations == 0,
            fmt("%.0f generation comparisons over 10000 paths, %.0f violations", double(comparisons), double(violations))};
}

Outcome vaccination_speeds_extinction()
{
    SimConfig c;
    c.seed = 42;
    c.paths = 100000;
    c.max_generations = 100;
    const auto cmp = compare_scenarios(kTwoOrNone, thin(kTwoOrNone, {0.5}), c);
    const bool ok = cmp.tau_ordering_holds && cmp.tau_margin_in_se > 5.0;
    return {ok, fmt("mean tau pre %.3f vs post %.3f (censored at horizon), margin %.1f SE (need > 5)",
                    cmp.restricted_tau_pre, cmp.restricted_tau_post, cmp.tau_margin_in_se)
                    + fmt("; extinct-only means %.3f vs %.3f", cmp.conditional_tau_pre, cmp.conditional_tau_post)};
}

Outcome thinning_mean_law()
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = ebp::testing::random_distribution(rng, trial % 25);
        const double phi = u(rng);
        worst = std::max(worst, std::abs(mean(thin(d, {phi})) - (1.0 - phi) * mean(d)));
    }
    return {worst <= 1e-12, fmt("100 cases, max |mean(thin) - (1-phi) mean| = %.3g (tol 1e-12)", worst)};
}

Outcome cauchy_schwarz()
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    std::uniform_int_distribution<int> size(1, 10);
    int failures = 0, false_equalities = 0, missed_equalities = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<GammaParams> members(size(rng));
        for (auto& m : members)
            m = {u(rng), u(rng)};
        const auto r = cauchy_schwarz_bound(std::span<const GammaParams>(members), 1);
        failures += !r.holds;
        false_equalities += r.equality && !r.proportional;
        const double ratio = u(rng);
        for (auto& m : members)
            m.scale = ratio * m.shape;
        const auto eq = cauchy_schwarz_bound(std::span<const GammaParams>(members), 1);
        failures += !eq.holds;
        missed_equalities += !eq.equality;
    }
    const bool ok = failures == 0 && false_equalities == 0 && missed_equalities == 0;
    return {ok, fmt("1000 random + 1000 proportional families: %.0f violations, %.0f missed equalities, "
                    "%.0f spurious equalities",
                    failures, missed_equalities, false_equalities)};
}

Outcome variance_identity()
{
    std::mt19937_64 rng(10);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = ebp::testing::random_distribution(rng, trial % 20);
        const auto b = ebp::testing::random_distribution(rng, (trial * 7) % 20);
        worst = std::max(worst, variance_difference_identity(a, b).residual);
    }
    return {worst <= 1e-12, fmt("100 pairs, max residual %.3g (tol 1e-12)", worst)};
}

Outcome peak_geometry()
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> shape(1.05, 10.0), scale(0.1, 5.0);
    std::uniform_int_distribution<int> size(2, 6);
    double worst_single = 0.0, min_gap = INFINITY, max_gap = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const GammaParams pre{shape(rng), scale(rng)};
        worst_single = std::max(
            worst_single, peak_height_from_distance(pre, ParameterFamily({{shape(rng), scale(rng)}})).residual);
        std::vector<GammaParams> members(size(rng));
        for (auto& m : members)
            m = {shape(rng), scale(rng)};
        const auto r = peak_height_from_distance(pre, ParameterFamily(members));
        if (!std::isfinite(r.jensen_gap) || !std::isfinite(r.residual))
            return {false, "non-finite result for a multi-member family"};
        min_gap = std::min(min_gap, r.jensen_gap);
        max_gap = std::max(max_gap, r.jensen_gap);
    }
    return {worst_single <= 1e-10 && min_gap >= -1e-15,
            fmt("single-member max residual %.3g (tol 1e-10); multi-member jensen gap in [%.3g, %.3g]",
                worst_single, min_gap, max_gap)};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli_determinism(const std::string& binary)
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("ebp_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::ofstream(dir / "scenario.json") << R"({
  "offspring": {"probabilities": [0.25, 0, 0.75]},
  "simulation": {"seed": 42, "paths": 20000, "max_generations": 100}
})";
    auto run = [&](const std::string& csv, int workers) {
        const std::string cmd = "\"" + binary + "\" simulate \"" + (dir / "scenario.json").string() + "\" --out \""
                                + (dir / csv).string() + "\" --workers " + std::to_string(workers) + " > /dev/null";
        return std::system(cmd.c_str());
    };
    const int rc1 = run("a.csv", 1);
    const int rc2 = run("b.csv", 1);
    const int rc3 = run("c.csv", 4);
    const auto a = slurp(dir / "a.csv"), b = slurp(dir / "b.csv"), c = slurp(dir / "c.csv");
    fs::remove_all(dir);
    const bool ok = rc1 == 0 && rc2 == 0 && rc3 == 0 && !a.empty() && a == b && a == c;
    return {ok, std::string("exit codes ") + std::to_string(rc1) + "/" + std::to_string(rc2) + "/"
                    + std::to_string(rc3) + ", rerun " + (a == b ? "identical" : "DIFFERENT") + ", 4 workers "
                    + (a == c ? "identical" : "DIFFERENT") + ", " + std::to_string(a.size()) + " bytes"};
}

Outcome multi_initial()
{
    const double analytic = extinction_probability_multi(kTwoOrNone, 2);
    SimConfig c;
    c.seed = 42;
    c.paths = 100000;
    c.max_generations = 100;
    c.initial_infected = 2;
    const auto s = simulate_ensemble(kTwoOrNone, c);
    const double tol = 4.0 * binomial_se(analytic, c.paths);
    const bool ok = std::abs(analytic - 1.0 / 9.0) <= 1e-9 && std::abs(s.extinct_fraction - analytic) <= tol;
    return {ok, fmt("pi^2 = %.12f, Monte Carlo %.5f (tol %.5f)", analytic, s.extinct_fraction, tol)};
}

Outcome abel_limit()
{
    std::mt19937_64 rng(14);
    const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
    int bad = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto dev = abel_limit_check(ebp::testing::random_distribution(rng, 1 + trial), eps);
        for (std::size_t i = 1; i < dev.size(); ++i)
            bad += dev[i] > dev[i - 1];
    }
    return {bad == 0, fmt("20 laws x 4 epsilons, %.0f increases", bad)};
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-ebp>\n", argv[0]);
        return 2;
    }
    const std::string binary = argv[1];

    const std::vector<Criterion> criteria{
        {1, "analytic fixed point", 1e-3, analytic_fixed_point},
        {2, "critical/subcritical branch", 1.0, critical_branch},
        {3, "geometric closed form", 1e-3, geometric_closed_form},
        {4, "oracle equivalence", 10.0, oracle_equivalence},
        {5, "Monte Carlo consistency", 5.0, monte_carlo_consistency},
        {6, "coupling domination", 5.0, coupling_domination},
        {7, "vaccination speeds extinction", 10.0, vaccination_speeds_extinction},
        {8, "thinning mean law", 1.0, thinning_mean_law},
        {9, "Cauchy-Schwarz", 1.0, cauchy_schwarz},
        {10, "variance identity", 1.0, variance_identity},
        {11, "peak geometry", 1.0, peak_geometry},
        {12, "CLI determinism", 10.0, [&] { return cli_determinism(binary); }},
        {13, "multiple initial cases", 5.0, multi_initial},
        {14, "Abel limit", 1.0, abel_limit},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("[%s] %2d %-32s %s | %.4fs (budget %gs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", EXCEEDED");
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
