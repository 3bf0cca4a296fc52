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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ebp/error.hpp"
#include "ebp/offspring.hpp"
#include "ebp/rng.hpp"

namespace ebp {

/// Generation sizes above this mark a path as escaped (censored, never extinct).
inline constexpr std::uint64_t population_cap = 1'000'000'000;

struct SimConfig {
    std::uint64_t seed = 42;
    std::uint64_t paths = 1000;
    std::uint32_t max_generations = 100;
    std::uint64_t initial_infected = 1;

    void validate() const
    {
        if (paths < 1)
            throw Error(ErrorCode::InvalidParams, "paths must be at least 1");
        if (paths > std::numeric_limits<std::uint32_t>::max())
            throw Error(ErrorCode::InvalidParams, "paths must fit in 32 bits");
        if (max_generations < 1)
            throw Error(ErrorCode::InvalidParams, "max_generations must be at least 1");
        if (initial_infected < 1)
            throw Error(ErrorCode::InvalidParams, "initial_infected must be at least 1");
        if (initial_infected > population_cap)
            throw Error(ErrorCode::InvalidParams, "initial_infected exceeds the population cap");
    }
};

/// Realized generation sizes Z_0, Z_1, ... of one outbreak.
struct Trajectory {
    std::vector<std::uint64_t> sizes;
    bool extinct = false;
    std::optional<std::uint32_t> extinction_generation;
    bool escaped = false; ///< last size exceeded population_cap

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/**
 * Aggregate of an ensemble of paths. Index n of every per-generation vector
 * refers to generation n, for n in 0..max_generations.
 */
struct EnsembleStats {
    std::uint64_t paths = 0;
    std::uint32_t max_generations = 0;

    double extinct_fraction = 0.0;
    std::vector<double> extinction_prob_by_generation;
    /// Conditional on extinction within the horizon; NaN when nothing went extinct.
    double mean_extinction_time = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t censored_count = 0;

    std::uint64_t extinct_count = 0;
    std::uint64_t escaped_count = 0;
    double extinction_time_variance = std::numeric_limits<double>::quiet_NaN();

    /// Mean of min(tau, horizon) over all paths; censored paths count as the horizon.
    double restricted_mean_extinction_time = 0.0;
    double restricted_extinction_time_variance = 0.0;

    std::vector<std::uint64_t> paths_alive;
    /// Mean Z_n over paths alive at n with a tracked size; 0 when there are none.
    std::vector<double> mean_size_surviving;
};

namespace detail {

/// Inverse-CDF sampler over the explicit support plus a multinomial path for large populations.
class OffspringSampler {
public:
    explicit OffspringSampler(const OffspringDistribution& dist)
        : probs_(dist.probs().begin(), dist.probs().end())
    {
        cdf_.resize(probs_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            acc += probs_[i];
            cdf_[i] = acc;
            if (probs_[i] > 0.0)
                last_positive_ = i;
        }
        // u < 1 always lands inside the support.
        for (std::size_t i = last_positive_; i < cdf_.size(); ++i)
            cdf_[i] = 1.0;
    }

    std::uint64_t sample_one(CounterStream& stream) const noexcept
    {
        const double u = stream.uniform();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::uint64_t>(std::min<std::size_t>(it - cdf_.begin(), last_positive_));
    }

    /// Total offspring of `count` individuals, drawn as a multinomial over counts.
    std::uint64_t sample_total(std::uint64_t count, CounterStream& stream) const
    {
        if (count <= direct_threshold) {
            std::uint64_t total = 0;
            for (std::uint64_t r = 0; r < count; ++r)
                total += sample_one(stream);
            return total;
        }
        std::uint64_t remaining = count;
        double mass_left = 1.0;
        std::uint64_t total = 0;
        for (std::size_t i = 0; i <= last_positive_ && remaining > 0; ++i) {
            if (probs_[i] <= 0.0)
                continue;
            std::uint64_t c = remaining;
            if (i != last_positive_) {
                const double p = std::clamp(probs_[i] / mass_left, 0.0, 1.0);
                c = std::binomial_distribution<std::uint64_t>(remaining, p)(stream);
            }
            total += static_cast<std::uint64_t>(i) * c;
            remaining -= c;
            mass_left -= probs_[i];
        }
        return total;
    }

    static constexpr std::uint64_t direct_threshold = 64;

private:
    std::vector<double> probs_;
    std::vector<double> cdf_;
    std::size_t last_positive_ = 0;
};

/// Number of `infections` that survive independent blocking with probability phi.
inline std::uint64_t thin_count(std::uint64_t infections, double phi, CounterStream& stream)
{
    if (phi <= 0.0 || infections == 0)
        return infections;
    if (phi >= 1.0)
        return 0;
    if (infections <= OffspringSampler::direct_threshold) {
        std::uint64_t kept = 0;
        for (std::uint64_t k = 0; k < infections; ++k)
            kept += stream.uniform() >= phi ? 1 : 0;
        return kept;
    }
    return std::binomial_distribution<std::uint64_t>(infections, 1.0 - phi)(stream);
}

inline void finish(Trajectory& t, std::uint32_t generation)
{
    if (t.sizes.back() == 0) {
        t.extinct = true;
        t.extinction_generation = generation;
    }
}

inline Trajectory run_path(const OffspringSampler& sampler, const SimConfig& config,
                           std::uint32_t path, StreamTag tag)
{
    Trajectory t;
    t.sizes.reserve(16);
    t.sizes.push_back(config.initial_infected);
    for (std::uint32_t g = 1; g <= config.max_generations; ++g) {
        CounterStream stream(config.seed, path, g, tag);
        const std::uint64_t next = sampler.sample_total(t.sizes.back(), stream);
        t.sizes.push_back(next);
        if (next == 0) {
            finish(t, g);
            break;
        }
        if (next > population_cap) {
            t.escaped = true;
            break;
        }
    }
    return t;
}

inline void check_path_inputs(const OffspringDistribution& dist, const SimConfig& config)
{
    if (dist.has_tail())
        throw Error(ErrorCode::TailMassPresent, "simulation requires a distribution without tail mass");
    config.validate();
}

inline unsigned resolve_workers(unsigned workers, std::uint64_t paths)
{
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(workers, paths));
}

/// Runs body(begin, end, slot) over contiguous path ranges, one per worker.
template <class Body>
void for_each_chunk(std::uint64_t paths, unsigned workers, Body&& body)
{
    if (workers <= 1) {
        body(std::uint64_t{0}, paths, 0u);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = paths * w / workers;
        const std::uint64_t end = paths * (w + 1) / workers;
        threads.emplace_back([&body, begin, end, w] { body(begin, end, w); });
    }
    for (auto& th : threads)
        th.join();
}

/// Integer-only accumulator; merging is exact, so results do not depend on scheduling.
struct PathTally {
    std::vector<std::uint64_t> extinct_at;
    std::vector<std::uint64_t> known_alive;
    std::vector<std::uint64_t> size_sum;
    std::uint64_t escaped = 0;
    std::uint64_t tau_sum = 0;
    std::uint64_t tau_sq_sum = 0;

    explicit PathTally(std::uint32_t horizon)
        : extinct_at(horizon + 1, 0), known_alive(horizon + 1, 0), size_sum(horizon + 1, 0)
    {
    }

    void add(const Trajectory& t)
    {
        for (std::size_t n = 0; n < t.sizes.size(); ++n) {
            const std::uint64_t z = t.sizes[n];
            if (z > 0 && z <= population_cap) {
                ++known_alive[n];
                size_sum[n] += z;
            }
        }
        if (t.extinction_generation) {
            const std::uint64_t tau = *t.extinction_generation;
            ++extinct_at[tau];
            tau_sum += tau;
            tau_sq_sum += tau * tau;
        }
        if (t.escaped)
            ++escaped;
    }

    void merge(const PathTally& other)
    {
        for (std::size_t n = 0; n < extinct_at.size(); ++n) {
            extinct_at[n] += other.extinct_at[n];
            known_alive[n] += other.known_alive[n];
            size_sum[n] += other.size_sum[n];
        }
        escaped += other.escaped;
        tau_sum += other.tau_sum;
        tau_sq_sum += other.tau_sq_sum;
    }
};

inline EnsembleStats summarize(const PathTally& tally, const SimConfig& config)
{
    EnsembleStats s;
    s.paths = config.paths;
    s.max_generations = config.max_generations;
    const std::uint32_t horizon = config.max_generations;
    const double paths = static_cast<double>(config.paths);

    s.extinction_prob_by_generation.resize(horizon + 1);
    s.paths_alive.resize(horizon + 1);
    s.mean_size_surviving.resize(horizon + 1);
    std::uint64_t extinct = 0;
    for (std::uint32_t n = 0; n <= horizon; ++n) {
        extinct += tally.extinct_at[n];
        s.extinction_prob_by_generation[n] = static_cast<double>(extinct) / paths;
        s.paths_alive[n] = config.paths - extinct;
        s.mean_size_surviving[n] = tally.known_alive[n] == 0
                                       ? 0.0
                                       : static_cast<double>(tally.size_sum[n])
                                             / static_cast<double>(tally.known_alive[n]);
    }
    s.extinct_count = extinct;
    s.extinct_fraction = s.extinction_prob_by_generation.back();
    s.censored_count = config.paths - extinct;
    s.escaped_count = tally.escaped;

    const double h = horizon;
    const double censored = static_cast<double>(s.censored_count);
    const double tau_sum = static_cast<double>(tally.tau_sum);
    const double tau_sq = static_cast<double>(tally.tau_sq_sum);
    if (extinct > 0) {
        const double k = static_cast<double>(extinct);
        s.mean_extinction_time = tau_sum / k;
        s.extinction_time_variance =
            k > 1 ? std::max(0.0, (tau_sq - tau_sum * tau_sum / k) / (k - 1)) : 0.0;
    }
    const double r_sum = tau_sum + censored * h;
    const double r_sq = tau_sq + censored * h * h;
    s.restricted_mean_extinction_time = r_sum / paths;
    s.restricted_extinction_time_variance =
        paths > 1 ? std::max(0.0, (r_sq - r_sum * r_sum / paths) / (paths - 1)) : 0.0;
    return s;
}

} // namespace detail

/**
 * One outbreak: each generation every infected individual independently
 * draws its number of secondary infections. The random stream depends only on
 * (config.seed, path_index, generation), never on execution order.
 */
inline Trajectory simulate_path(const OffspringDistribution& dist, const SimConfig& config,
                                std::uint64_t path_index)
{
    detail::check_path_inputs(dist, config);
    if (path_index >= config.paths)
        throw Error(ErrorCode::InvalidParams, "path index out of range");
    const detail::OffspringSampler sampler(dist);
    return detail::run_path(sampler, config, static_cast<std::uint32_t>(path_index),
                            StreamTag::Offspring);
}

/// Aggregates config.paths outbreaks. `workers` = 0 uses the hardware concurrency.
inline EnsembleStats simulate_ensemble(const OffspringDistribution& dist, const SimConfig& config,
                                       unsigned workers = 0)
{
    detail::check_path_inputs(dist, config);
    const detail::OffspringSampler sampler(dist);
    workers = detail::resolve_workers(workers, config.paths);

    std::vector<detail::PathTally> tallies(workers, detail::PathTally(config.max_generations));
    detail::for_each_chunk(config.paths, workers,
                           [&](std::uint64_t begin, std::uint64_t end, unsigned slot) {
                               for (std::uint64_t p = begin; p < end; ++p)
                                   tallies[slot].add(detail::run_path(
                                       sampler, config, static_cast<std::uint32_t>(p),
                                       StreamTag::Offspring));
                           });
    for (unsigned w = 1; w < workers; ++w)
        tallies[0].merge(tallies[w]);
    return detail::summarize(tallies[0], config);
}

using CoupledPair = std::pair<Trajectory, Trajectory>;

namespace detail {

/**
 * Unvaccinated and vaccinated outbreaks on shared randomness. The first
 * Z_{n,phi} unvaccinated individuals are the vaccinated population; each of
 * their infections is blocked independently with probability phi, so
 * Z_{n+1,phi} <= Z_{n+1} on every path.
 */
inline CoupledPair run_coupled(const OffspringSampler& sampler, const OffspringSampler& thinned,
                               double phi, const SimConfig& config, std::uint32_t path)
{
    Trajectory pre;
    Trajectory post;
    pre.sizes.push_back(config.initial_infected);
    post.sizes.push_back(config.initial_infected);
    bool pre_active = true;
    bool post_active = true;

    for (std::uint32_t g = 1; g <= config.max_generations && (pre_active || post_active); ++g) {
        if (pre_active) {
            const std::uint64_t z = pre.sizes.back();
            const std::uint64_t shared = post_active ? post.sizes.back() : 0;
            CounterStream offspring(config.seed, path, g, StreamTag::Offspring);
            CounterStream blocking(config.seed, path, g, StreamTag::Blocking);

            std::uint64_t shared_total = 0;
            std::uint64_t rest_total = 0;
            if (z <= OffspringSampler::direct_threshold) {
                // Individual draws: the first `shared` belong to both worlds.
                for (std::uint64_t r = 0; r < z; ++r) {
                    const std::uint64_t n = sampler.sample_one(offspring);
                    (r < shared ? shared_total : rest_total) += n;
                }
            } else {
                if (shared > 0)
                    shared_total = sampler.sample_total(shared, offspring);
                if (z > shared)
                    rest_total = sampler.sample_total(z - shared, offspring);
            }

            pre.sizes.push_back(shared_total + rest_total);
            if (post_active)
                post.sizes.push_back(thin_count(shared_total, phi, blocking));

            if (pre.sizes.back() == 0) {
                finish(pre, g);
                pre_active = false;
            } else if (pre.sizes.back() > population_cap) {
                pre.escaped = true;
                pre_active = false;
            }
        } else {
            // Unvaccinated path escaped; the vaccinated one continues on its own law.
            CounterStream stream(config.seed, path, g, StreamTag::Vaccinated);
            post.sizes.push_back(thinned.sample_total(post.sizes.back(), stream));
        }

        if (post_active && post.sizes.size() == static_cast<std::size_t>(g) + 1) {
            if (post.sizes.back() == 0) {
                finish(post, g);
                post_active = false;
            } else if (post.sizes.back() > population_cap) {
                post.escaped = true;
                post_active = false;
            }
        }
    }
    return {std::move(pre), std::move(post)};
}

} // namespace detail

/// Paired (unvaccinated, vaccinated) outbreaks, one per path.
inline std::vector<CoupledPair> simulate_coupled(const OffspringDistribution& dist,
                                                 const VaccinationPolicy& policy,
                                                 const SimConfig& config, unsigned workers = 0)
{
    detail::check_path_inputs(dist, config);
    policy.validate();
    const detail::OffspringSampler sampler(dist);
    const detail::OffspringSampler thinned(thin(dist, policy));
    workers = detail::resolve_workers(workers, config.paths);

    std::vector<CoupledPair> out(config.paths);
    detail::for_each_chunk(config.paths, workers,
                           [&](std::uint64_t begin, std::uint64_t end, unsigned) {
                               for (std::uint64_t p = begin; p < end; ++p)
                                   out[p] = detail::run_coupled(sampler, thinned, policy.block_prob,
                                                                config, static_cast<std::uint32_t>(p));
                           });
    return out;
}

/// Generations where the vaccinated size exceeds the unvaccinated one; escaped tails are skipped.
inline std::uint64_t count_domination_violations(const CoupledPair& pair)
{
    const auto& [pre, post] = pair;
    const std::size_t n = std::min(pre.sizes.size(), post.sizes.size());
    std::uint64_t violations = 0;
    for (std::size_t g = 0; g < n; ++g)
        violations += post.sizes[g] > pre.sizes[g] ? 1 : 0;
    // Once the unvaccinated path is extinct the vaccinated one must be too.
    if (pre.extinct && post.sizes.size() > pre.sizes.size())
        ++violations;
    return violations;
}

/// Streams coupled paths without storing them; returns the total violation count.
inline std::uint64_t coupling_audit(const OffspringDistribution& dist, const VaccinationPolicy& policy,
                                    const SimConfig& config, unsigned workers = 0)
{
    detail::check_path_inputs(dist, config);
    policy.validate();
    const detail::OffspringSampler sampler(dist);
    const detail::OffspringSampler thinned(thin(dist, policy));
    workers = detail::resolve_workers(workers, config.paths);

    std::vector<std::uint64_t> counts(workers, 0);
    detail::for_each_chunk(config.paths, workers,
                           [&](std::uint64_t begin, std::uint64_t end, unsigned slot) {
                               for (std::uint64_t p = begin; p < end; ++p)
                                   counts[slot] += count_domination_violations(detail::run_coupled(
                                       sampler, thinned, policy.block_prob, config,
                                       static_cast<std::uint32_t>(p)));
                           });
    std::uint64_t total = 0;
    for (auto c : counts)
        total += c;
    return total;
}

/**
 * Paired pre/post-vaccination ensemble statistics.
 *
 * The tau ordering uses the restricted mean min(tau, horizon): a path that
 * never dies out has tau = infinity, and counting it at the horizon keeps
 * that information. The extinct-only means are reported alongside; for a
 * supercritical pre scenario they can run opposite to the restricted ones
 * because only the quickly dying paths are averaged.
 */
struct ScenarioComparison {
    EnsembleStats pre;
    EnsembleStats post;
    bool mean_not_reduced = false; ///< warning: mean(post) >= mean(pre)

    double restricted_tau_pre = 0.0;
    double restricted_tau_post = 0.0;
    double tau_standard_error = 0.0;
    double tau_margin_in_se = 0.0; ///< (pre - post) / standard error
    bool tau_ordering_holds = false;

    double conditional_tau_pre = 0.0;
    double conditional_tau_post = 0.0;

    /// Largest two-proportion z statistic between the extinction curves.
    double max_curve_z = 0.0;
};

inline constexpr std::uint64_t pre_stream_salt = 0x7072652D76616363ull;
inline constexpr std::uint64_t post_stream_salt = 0x706F73742D766163ull;

inline ScenarioComparison compare_scenarios(const OffspringDistribution& pre,
                                            const OffspringDistribution& post,
                                            const SimConfig& config, unsigned workers = 0)
{
    if (pre.has_tail() || post.has_tail())
        throw Error(ErrorCode::TailMassPresent, "scenario comparison requires exact distributions");
    config.validate();

    SimConfig pre_config = config;
    SimConfig post_config = config;
    pre_config.seed = mix_seed(config.seed ^ pre_stream_salt);
    post_config.seed = mix_seed(config.seed ^ post_stream_salt);

    ScenarioComparison c;
    c.mean_not_reduced = !(mean(post) < mean(pre));
    c.pre = simulate_ensemble(pre, pre_config, workers);
    c.post = simulate_ensemble(post, post_config, workers);
    if (c.pre.extinct_count == 0 || c.post.extinct_count == 0)
        throw Error(ErrorCode::ZeroExtinctSamples,
                    "no path went extinct within the horizon in one of the scenarios");

    c.restricted_tau_pre = c.pre.restricted_mean_extinction_time;
    c.restricted_tau_post = c.post.restricted_mean_extinction_time;
    c.tau_standard_error =
        std::sqrt(c.pre.restricted_extinction_time_variance / static_cast<double>(c.pre.paths)
                  + c.post.restricted_extinction_time_variance / static_cast<double>(c.post.paths));
    const double diff = c.restricted_tau_pre - c.restricted_tau_post;
    c.tau_margin_in_se = c.tau_standard_error > 0.0
                             ? diff / c.tau_standard_error
                             : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    c.tau_ordering_holds = diff > 0.0;
    c.conditional_tau_pre = c.pre.mean_extinction_time;
    c.conditional_tau_post = c.post.mean_extinction_time;

    const double n1 = static_cast<double>(c.pre.paths);
    const double n2 = static_cast<double>(c.post.paths);
    for (std::size_t g = 1; g < c.pre.extinction_prob_by_generation.size(); ++g) {
        const double p1 = c.pre.extinction_prob_by_generation[g];
        const double p2 = c.post.extinction_prob_by_generation[g];
        const double pooled = (p1 * n1 + p2 * n2) / (n1 + n2);
        if (pooled <= 0.0 || pooled >= 1.0)
            continue;
        const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
        c.max_curve_z = std::max(c.max_curve_z, std::abs(p1 - p2) / se);
    }
    return c;
}

} // namespace ebp
