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
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ebp/error.hpp"
#include "ebp/offspring.hpp"

namespace ebp {

/// Half-width of the band around R0 = 1 treated as critical.
inline constexpr double criticality_tolerance = 1e-9;

enum class Criticality { Subcritical, Critical, Supercritical };

constexpr const char* to_string(Criticality c) noexcept
{
    switch (c) {
    case Criticality::Subcritical: return "Subcritical";
    case Criticality::Critical: return "Critical";
    case Criticality::Supercritical: return "Supercritical";
    }
    return "Unknown";
}

struct CriticalityClass {
    Criticality kind;
    double r0; ///< I'(1), the mean number of secondary infections
};

struct ExtinctionResult {
    double pi;
    CriticalityClass criticality;
    std::uint64_t iterations;
    double residual; ///< |I(pi) - pi|
};

namespace detail {

inline void check_domain(double x)
{
    if (!(std::abs(x) <= 1.0))
        throw Error(ErrorCode::DomainError,
                    "generating function argument must satisfy |x| <= 1, got " + std::to_string(x));
}

inline void require_no_tail(const OffspringDistribution& dist, const char* op)
{
    if (dist.has_tail())
        throw Error(ErrorCode::TailMassPresent,
                    std::string(op) + " requires a distribution without tail mass (tail = "
                        + std::to_string(dist.tail_mass()) + ")");
}

/// Horner evaluation without the domain check; used on hot paths.
inline double horner(std::span<const double> coeffs, double x) noexcept
{
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;)
        acc = acc * x + coeffs[i];
    return acc;
}

} // namespace detail

/**
 * I(x) = sum_i theta_i x^i over the explicit support. For x in [0, 1] the
 * exact value including tail mass lies in [I(x), I(x) + tail_mass].
 */
inline double pgf_eval(const OffspringDistribution& dist, double x)
{
    detail::check_domain(x);
    return detail::horner(dist.probs(), x);
}

/// Interval containing the generating function once the tail mass is accounted for.
inline std::pair<double, double> pgf_bounds(const OffspringDistribution& dist, double x)
{
    detail::check_domain(x);
    if (x < 0.0)
        throw Error(ErrorCode::DomainError, "tail bounds are only defined for x in [0, 1]");
    const double v = detail::horner(dist.probs(), x);
    return {v, v + dist.tail_mass()};
}

/// order-th derivative of the generating function at x.
inline double pgf_derivative(const OffspringDistribution& dist, double x, unsigned order)
{
    detail::check_domain(x);
    if (order == 0)
        return detail::horner(dist.probs(), x);
    const auto probs = dist.probs();
    if (probs.size() <= order)
        return 0.0;
    // Coefficients of the derivative: i (i-1) ... (i-order+1) theta_i.
    std::vector<double> coeffs(probs.size() - order);
    for (std::size_t i = order; i < probs.size(); ++i) {
        double falling = 1.0;
        for (unsigned k = 0; k < order; ++k)
            falling *= static_cast<double>(i - k);
        coeffs[i - order] = falling * probs[i];
    }
    return detail::horner(coeffs, x);
}

inline CriticalityClass classify(const OffspringDistribution& dist)
{
    const double r0 = pgf_derivative(dist, 1.0, 1);
    Criticality kind = Criticality::Critical;
    if (r0 < 1.0 - criticality_tolerance)
        kind = Criticality::Subcritical;
    else if (r0 > 1.0 + criticality_tolerance)
        kind = Criticality::Supercritical;
    return {kind, r0};
}

/// Largest number of functional iterations before ConvergenceFailure.
inline constexpr std::uint64_t max_fixed_point_iterations = 1'000'000;

/**
 * Eventual extinction probability: the smallest root of I(x) = x on [0, 1].
 *
 * Sub- and critical processes return exactly 1. Supercritical ones iterate
 * pi <- I(pi) from 0, which increases monotonically to the smallest root,
 * and then polish the root by bisection on I(x) - x.
 */
inline ExtinctionResult extinction_probability(const OffspringDistribution& dist)
{
    detail::require_no_tail(dist, "extinction_probability");
    const double theta0 = dist.theta0();
    if (!(theta0 > 0.0 && theta0 < 1.0))
        throw Error(ErrorCode::AssumptionViolated,
                    "extinction analysis requires 0 < theta_0 < 1, got " + std::to_string(theta0));

    const auto probs = dist.probs();
    const CriticalityClass cls = classify(dist);
    if (cls.kind != Criticality::Supercritical)
        return {1.0, cls, 0, std::abs(detail::horner(probs, 1.0) - 1.0)};

    auto gap = [&](double x) { return detail::horner(probs, x) - x; };

    double current = 0.0;
    double step = 0.0;
    std::uint64_t iterations = 0;
    for (;;) {
        if (iterations >= max_fixed_point_iterations)
            throw Error(ErrorCode::ConvergenceFailure,
                        "fixed-point iteration did not converge; residual "
                            + std::to_string(std::abs(gap(current))));
        const double next = detail::horner(probs, current);
        ++iterations;
        step = next - current;
        current = next;
        if (std::abs(step) < 1e-14)
            break;
    }

    // gap > 0 below the root and < 0 between the root and 1.
    double lo = current;
    double hi = current;
    double width = std::max(std::abs(step), 1e-15);
    while (gap(lo) < 0.0 && lo > 0.0)
        lo = std::max(0.0, lo - width);
    const double cap = lo + 0.5 * (1.0 - lo);
    for (double w = width; gap(hi) >= 0.0 && hi < cap; w *= 2.0)
        hi = std::min(hi + w, cap);
    if (gap(lo) >= 0.0 && gap(hi) < 0.0) {
        for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
            const double mid = lo + 0.5 * (hi - lo);
            if (mid <= lo || mid >= hi)
                break;
            const double g = gap(mid);
            if (g == 0.0) {
                lo = hi = mid;
                break;
            }
            (g > 0.0 ? lo : hi) = mid;
            ++iterations;
        }
        current = std::abs(gap(lo)) <= std::abs(gap(hi)) ? lo : hi;
    }

    const double residual = std::abs(gap(current));
    if (residual > 1e-12)
        throw Error(ErrorCode::ConvergenceFailure,
                    "fixed point residual " + std::to_string(residual) + " exceeds 1e-12");
    return {current, cls, iterations, residual};
}

/// Pr[Z_n = 0] starting from one infected: the n-fold composition of I at 0.
inline double extinction_after_n(const OffspringDistribution& dist, std::uint64_t n)
{
    detail::require_no_tail(dist, "extinction_after_n");
    const auto probs = dist.probs();
    double x = 0.0;
    for (std::uint64_t k = 0; k < n; ++k)
        x = detail::horner(probs, x);
    return x;
}

/// Extinction probability when the outbreak starts from `initial` independent cases.
inline double extinction_probability_multi(const OffspringDistribution& dist, std::uint64_t initial)
{
    if (initial < 1)
        throw Error(ErrorCode::InvalidParams, "initial infected count must be positive");
    const double pi = extinction_probability(dist).pi;
    return std::pow(pi, static_cast<double>(initial));
}

/**
 * Deviation |I(1 - eps) - sum(probs)| for each eps. For a distribution with
 * non-negative coefficients these are non-increasing as eps decreases to 0.
 */
inline std::vector<double> abel_limit_check(const OffspringDistribution& dist,
                                            std::span<const double> epsilons)
{
    if (epsilons.empty())
        throw Error(ErrorCode::DomainError, "no epsilons given");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        const double e = epsilons[i];
        if (!(e > 0.0 && e < 1.0))
            throw Error(ErrorCode::DomainError, "epsilon must lie in (0, 1), got " + std::to_string(e));
        if (i > 0 && !(e < epsilons[i - 1]))
            throw Error(ErrorCode::DomainError, "epsilons must be strictly decreasing");
    }
    double total = 0.0;
    for (double p : dist.probs())
        total += p;
    std::vector<double> deviations;
    deviations.reserve(epsilons.size());
    for (double e : epsilons)
        deviations.push_back(std::abs(detail::horner(dist.probs(), 1.0 - e) - total));
    return deviations;
}

} // namespace ebp
