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

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "ebp/error.hpp"
#include "ebp/offspring.hpp"

namespace ebp {

/// Exact law of Z_n for small instances, used to validate the solver and the simulator.
struct ExactGenerationLaw {
    std::uint64_t generation = 0;
    std::vector<double> pmf;    ///< pmf[m] = Pr[Z_n = m] for m <= size_cap
    double overflow_mass = 0.0; ///< Pr[Z_n > size_cap] (that mass is never tracked again)

    double operator[](std::size_t m) const noexcept { return m < pmf.size() ? pmf[m] : 0.0; }

    /// Non-zero atoms only.
    std::map<std::uint64_t, double> support() const
    {
        std::map<std::uint64_t, double> out;
        for (std::size_t m = 0; m < pmf.size(); ++m)
            if (pmf[m] != 0.0)
                out.emplace(m, pmf[m]);
        return out;
    }
};

inline constexpr std::uint64_t default_size_cap = 4096;

namespace detail {

/// Convolution powers dist^{*k}, truncated at size_cap with the excess mass kept.
class ConvolutionPowers {
public:
    ConvolutionPowers(const OffspringDistribution& dist, std::uint64_t size_cap)
        : base_(dist.probs().begin(), dist.probs().end()), cap_(size_cap)
    {
        powers_.push_back({{1.0}, 0.0});
    }

    struct Power {
        std::vector<double> pmf;
        double overflow;
    };

    const Power& get(std::uint64_t k)
    {
        while (powers_.size() <= k) {
            const Power& prev = powers_.back();
            Power next;
            const std::size_t full = prev.pmf.size() + base_.size() - 1;
            next.pmf.assign(std::min<std::size_t>(full, cap_ + 1), 0.0);
            next.overflow = prev.overflow;
            for (std::size_t i = 0; i < prev.pmf.size(); ++i) {
                if (prev.pmf[i] == 0.0)
                    continue;
                for (std::size_t j = 0; j < base_.size(); ++j) {
                    const double w = prev.pmf[i] * base_[j];
                    if (i + j <= cap_)
                        next.pmf[i + j] += w;
                    else
                        next.overflow += w;
                }
            }
            powers_.push_back(std::move(next));
        }
        return powers_[k];
    }

private:
    std::vector<double> base_;
    std::uint64_t cap_;
    std::vector<Power> powers_;
};

} // namespace detail

/**
 * law(n+1)[m] = sum_k law(n)[k] * (k-fold convolution of dist)[m], starting
 * from the point mass at `initial`. Sizes above size_cap go to the overflow
 * bucket and are not propagated further.
 */
inline ExactGenerationLaw exact_generation_law(const OffspringDistribution& dist, std::uint64_t n,
                                               std::uint64_t size_cap = default_size_cap,
                                               std::uint64_t initial = 1)
{
    if (dist.has_tail())
        throw Error(ErrorCode::TailMassPresent, "exact law requires a distribution without tail mass");
    if (size_cap < 1)
        throw Error(ErrorCode::InvalidParams, "size_cap must be positive");
    if (initial > size_cap)
        throw Error(ErrorCode::InvalidParams, "initial size exceeds size_cap");

    ExactGenerationLaw law;
    law.pmf.assign(initial + 1, 0.0);
    law.pmf[initial] = 1.0;

    detail::ConvolutionPowers powers(dist, size_cap);
    for (std::uint64_t g = 0; g < n; ++g) {
        std::vector<double> next(1, 0.0);
        double overflow = law.overflow_mass;
        for (std::size_t k = 0; k < law.pmf.size(); ++k) {
            const double w = law.pmf[k];
            if (w == 0.0)
                continue;
            const auto& power = powers.get(k);
            if (next.size() < power.pmf.size())
                next.resize(power.pmf.size(), 0.0);
            for (std::size_t m = 0; m < power.pmf.size(); ++m)
                next[m] += w * power.pmf[m];
            overflow += w * power.overflow;
        }
        law.pmf = std::move(next);
        law.overflow_mass = overflow;
    }
    law.generation = n;
    return law;
}

/// Pr[Z_n = 0] from the exact law.
inline double exact_extinction(const OffspringDistribution& dist, std::uint64_t n,
                               std::uint64_t size_cap = default_size_cap)
{
    return exact_generation_law(dist, n, size_cap)[0];
}

} // namespace ebp
