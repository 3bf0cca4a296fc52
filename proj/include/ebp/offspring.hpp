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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "ebp/error.hpp"

namespace ebp {

/// Absolute tolerance for sum(probs) + tail_mass == 1.
inline constexpr double normalization_tolerance = 1e-12;

/**
 * Law of the number of secondary infections caused by one infected individual.
 *
 * probs()[i] is Pr[N = i] over a finite explicit support. Any mass beyond the
 * support is kept in tail_mass() rather than silently dropped, so operations
 * that need an exact law can refuse a truncated one.
 */
class OffspringDistribution {
public:
    /// Validates the invariants; throws NegativeWeight, NonFinite or InvalidParams.
    OffspringDistribution(std::vector<double> probs, double tail_mass = 0.0)
        : probs_(std::move(probs)), tail_mass_(tail_mass)
    {
        if (probs_.empty())
            throw Error(ErrorCode::EmptySupport, "offspring distribution has no support");
        double total = tail_mass_;
        for (double p : probs_) {
            if (!std::isfinite(p))
                throw Error(ErrorCode::NonFinite, "non-finite probability");
            if (p < 0.0)
                throw Error(ErrorCode::NegativeWeight, "negative probability");
            total += p;
        }
        if (!std::isfinite(tail_mass_))
            throw Error(ErrorCode::NonFinite, "non-finite tail mass");
        if (tail_mass_ < 0.0)
            throw Error(ErrorCode::NegativeWeight, "negative tail mass");
        if (std::abs(total - 1.0) > normalization_tolerance)
            throw Error(ErrorCode::InvalidParams,
                        "probabilities sum to " + std::to_string(total) + ", expected 1");
    }

    std::span<const double> probs() const noexcept { return probs_; }
    double tail_mass() const noexcept { return tail_mass_; }
    bool has_tail() const noexcept { return tail_mass_ > 0.0; }

    /// Pr[N = 0], the probability an infected individual infects nobody.
    double theta0() const noexcept { return probs_.front(); }

    /// Largest count with explicit (possibly zero) probability.
    std::size_t max_count() const noexcept { return probs_.size() - 1; }

    double operator[](std::size_t i) const noexcept
    {
        return i < probs_.size() ? probs_[i] : 0.0;
    }

    friend bool operator==(const OffspringDistribution&, const OffspringDistribution&) = default;

private:
    std::vector<double> probs_;
    double tail_mass_;
};

/// Gamma density with shape alpha and scale T; mean is T * alpha.
struct GammaParams {
    double shape;
    double scale;

    double mean() const noexcept { return shape * scale; }

    bool valid() const noexcept
    {
        return std::isfinite(shape) && std::isfinite(scale) && shape > 0.0 && scale > 0.0;
    }

    void validate() const
    {
        if (!valid())
            throw Error(ErrorCode::InvalidParams,
                        "gamma parameters require shape > 0 and scale > 0 (got shape="
                            + std::to_string(shape) + ", scale=" + std::to_string(scale) + ")");
    }

    /// Density at w >= 0.
    double density(double w) const
    {
        if (w < 0.0)
            return 0.0;
        if (w == 0.0)
            return shape < 1.0 ? INFINITY : (shape == 1.0 ? 1.0 / scale : 0.0);
        const double log_pdf = (shape - 1.0) * std::log(w) - w / scale - std::lgamma(shape)
                               - shape * std::log(scale);
        return std::exp(log_pdf);
    }

    friend bool operator==(const GammaParams&, const GammaParams&) = default;
};

/// Each potential secondary infection is independently prevented with block_prob.
struct VaccinationPolicy {
    double block_prob = 0.0;

    void validate() const
    {
        if (!std::isfinite(block_prob) || block_prob < 0.0 || block_prob > 1.0)
            throw Error(ErrorCode::InvalidParams,
                        "block probability must lie in [0, 1], got " + std::to_string(block_prob));
    }
};

inline OffspringDistribution from_probabilities(std::span<const double> weights)
{
    if (weights.empty())
        throw Error(ErrorCode::EmptySupport, "no weights given");
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w))
            throw Error(ErrorCode::NonFinite, "non-finite weight");
        if (w < 0.0)
            throw Error(ErrorCode::NegativeWeight, "negative weight");
        total += w;
    }
    if (total <= 0.0)
        throw Error(ErrorCode::EmptySupport, "all weights are zero");
    if (!std::isfinite(total))
        throw Error(ErrorCode::NonFinite, "weights overflow");

    std::vector<double> probs(weights.begin(), weights.end());
    for (double& p : probs)
        p /= total;
    // Push the last ulp of rounding into the largest atom.
    double sum = 0.0;
    for (double p : probs)
        sum += p;
    auto largest = std::max_element(probs.begin(), probs.end());
    *largest = std::max(0.0, *largest + (1.0 - sum));
    return OffspringDistribution(std::move(probs), 0.0);
}

inline OffspringDistribution from_probabilities(std::initializer_list<double> weights)
{
    return from_probabilities(std::span<const double>(weights.begin(), weights.size()));
}

/// Point mass at k.
inline OffspringDistribution point_mass(std::size_t k)
{
    std::vector<double> probs(k + 1, 0.0);
    probs[k] = 1.0;
    return OffspringDistribution(std::move(probs), 0.0);
}

/// Folds the tail mass back into the explicit support by renormalizing.
inline OffspringDistribution renormalized(const OffspringDistribution& dist)
{
    if (!dist.has_tail())
        return dist;
    return from_probabilities(dist.probs());
}

/**
 * Discretizes a gamma density onto the counts 0..max_count-1 by integrating
 * it over the unit cells [i, i+1). Mass beyond max_count is returned as
 * tail_mass, so the result is an exact probability law.
 */
inline OffspringDistribution discretize_gamma(const GammaParams& params, std::size_t max_count)
{
    params.validate();
    if (max_count < 1)
        throw Error(ErrorCode::InvalidParams, "max_count must be at least 1");

    namespace bm = boost::math;
    // Differences of P near 0 and of Q near 1 keep each cell accurate.
    auto cell = [&](std::size_t i) {
        const double lo = static_cast<double>(i) / params.scale;
        const double hi = static_cast<double>(i + 1) / params.scale;
        if (bm::gamma_p(params.shape, lo) < 0.5)
            return bm::gamma_p(params.shape, hi) - bm::gamma_p(params.shape, lo);
        return bm::gamma_q(params.shape, lo) - bm::gamma_q(params.shape, hi);
    };

    std::vector<double> probs(max_count);
    double sum = 0.0;
    for (std::size_t i = 0; i < max_count; ++i) {
        probs[i] = std::max(0.0, cell(i));
        sum += probs[i];
    }
    const double tail = std::max(0.0, 1.0 - sum);
    return OffspringDistribution(std::move(probs), tail);
}

/**
 * Binomial thinning: every secondary infection is independently blocked with
 * probability phi. The generating function of the result is I(phi + (1-phi) x).
 */
inline OffspringDistribution thin(const OffspringDistribution& dist, const VaccinationPolicy& policy)
{
    policy.validate();
    if (dist.has_tail())
        throw Error(ErrorCode::TailMassPresent, "cannot thin a distribution with tail mass");

    const double phi = policy.block_prob;
    const double keep = 1.0 - phi;
    const auto probs = dist.probs();
    const std::size_t n = probs.size();

    // Horner in polynomial space: R(x) <- R(x) * (phi + keep x) + theta_i.
    std::vector<double> result(n, 0.0);
    result[0] = probs[n - 1];
    std::size_t degree = 0;
    for (std::size_t i = n - 1; i-- > 0;) {
        ++degree;
        for (std::size_t k = degree; k > 0; --k)
            result[k] = result[k] * phi + result[k - 1] * keep;
        result[0] = result[0] * phi + probs[i];
    }
    return OffspringDistribution(std::move(result), 0.0);
}

/// Mean number of secondary infections; a lower bound when tail_mass > 0.
inline double mean(const OffspringDistribution& dist)
{
    const auto probs = dist.probs();
    double m = 0.0;
    for (std::size_t i = 1; i < probs.size(); ++i)
        m += static_cast<double>(i) * probs[i];
    return m;
}

inline double second_moment(const OffspringDistribution& dist)
{
    const auto probs = dist.probs();
    double m2 = 0.0;
    for (std::size_t i = 1; i < probs.size(); ++i)
        m2 += static_cast<double>(i) * static_cast<double>(i) * probs[i];
    return m2;
}

/// Variance over the explicit support; clamped at zero against rounding.
inline double variance(const OffspringDistribution& dist)
{
    const double m = mean(dist);
    double v = 0.0;
    const auto probs = dist.probs();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double d = static_cast<double>(i) - m;
        v += d * d * probs[i];
    }
    return std::max(0.0, v);
}

} // namespace ebp
