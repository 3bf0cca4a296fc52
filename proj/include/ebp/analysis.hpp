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
#include <span>
#include <string>
#include <vector>

#include "ebp/error.hpp"
#include "ebp/offspring.hpp"

namespace ebp {

/// Post-vaccination gamma parameter sets {(T_j, alpha_j)}.
class ParameterFamily {
public:
    explicit ParameterFamily(std::vector<GammaParams> members) : members_(std::move(members))
    {
        if (members_.empty())
            throw Error(ErrorCode::InvalidParams, "parameter family is empty");
        for (const auto& m : members_)
            m.validate();
    }

    std::span<const GammaParams> members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }

    /// Every member has shape > 1, i.e. a density with an interior peak.
    bool admissible() const noexcept
    {
        return std::all_of(members_.begin(), members_.end(), [](const GammaParams& g) { return is_admissible(g); });
    }

    static bool is_admissible(const GammaParams& g) noexcept { return g.shape > 1.0; }

    /// Members with an interior peak; the rest are dropped.
    ParameterFamily admissible_subset() const
    {
        std::vector<GammaParams> kept;
        std::copy_if(members_.begin(), members_.end(), std::back_inserter(kept), is_admissible);
        return ParameterFamily(std::move(kept));
    }

private:
    std::vector<GammaParams> members_;
};

/**
 * Candidate post-vaccination family built from observed parameter ranges:
 * (min T, alpha_j) and (T_j, min alpha) combinations, keeping those with an
 * interior peak and a mean strictly below the pre-vaccination mean.
 */
inline ParameterFamily vaccination_family(const GammaParams& pre, std::span<const double> scales,
                                          std::span<const double> shapes)
{
    pre.validate();
    if (scales.empty() || shapes.empty() || scales.size() != shapes.size())
        throw Error(ErrorCode::InvalidParams, "scales and shapes must be non-empty and of equal length");
    const double min_scale = *std::min_element(scales.begin(), scales.end());
    const double min_shape = *std::min_element(shapes.begin(), shapes.end());

    std::vector<GammaParams> members;
    auto consider = [&](GammaParams g) {
        g.validate();
        if (!ParameterFamily::is_admissible(g) || !(g.mean() < pre.mean()))
            return;
        if (std::find(members.begin(), members.end(), g) == members.end())
            members.push_back(g);
    };
    for (double a : shapes)
        consider({a, min_scale});
    for (double t : scales)
        consider({min_shape, t});
    if (members.empty())
        throw Error(ErrorCode::InvalidParams, "no admissible mean-reducing combination in the family");
    return ParameterFamily(std::move(members));
}

struct CauchySchwarzResult {
    double lhs;            ///< (sum_j T_j alpha_j)^2
    double rhs;            ///< (sum_j T_j^2)(sum_j alpha_j^2)
    bool holds;            ///< lhs <= rhs + 1e-12
    bool equality;         ///< lhs == rhs within 1e-9 relative
    bool proportional;     ///< (T_j) and (alpha_j) proportional within 1e-9
    double discretized_lhs;    ///< same with the unit-cell discretized means
    double max_tail_mass;      ///< largest discretization tail across members
};

/**
 * Squared sum of member means against the product of the parameter norms.
 * The check uses the analytic means T_j alpha_j; the discretized means are
 * reported next to it (they sit roughly half a count lower per member).
 */
inline CauchySchwarzResult cauchy_schwarz_bound(std::span<const GammaParams> members,
                                                std::size_t max_count = 0)
{
    if (members.empty())
        throw Error(ErrorCode::InvalidParams, "parameter family is empty");
    double dot = 0.0, tt = 0.0, aa = 0.0, disc = 0.0, tail = 0.0;
    for (const auto& g : members) {
        g.validate();
        dot += g.scale * g.shape;
        tt += g.scale * g.scale;
        aa += g.shape * g.shape;
        const double sd = std::sqrt(g.shape) * g.scale;
        const std::size_t cells =
            max_count > 0 ? max_count : static_cast<std::size_t>(std::ceil(g.mean() + 40.0 * sd)) + 2;
        const auto d = discretize_gamma(g, cells);
        disc += mean(d);
        tail = std::max(tail, d.tail_mass());
    }

    CauchySchwarzResult r{};
    r.lhs = dot * dot;
    r.rhs = tt * aa;
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-12);
    r.equality = std::abs(r.rhs - r.lhs) <= 1e-9 * r.rhs;
    r.discretized_lhs = disc * disc;
    r.max_tail_mass = tail;

    const double ratio0 = members.front().scale / members.front().shape;
    r.proportional = std::all_of(members.begin(), members.end(), [&](const GammaParams& g) {
        return std::abs(g.scale / g.shape - ratio0) <= 1e-9 * ratio0;
    });
    return r;
}

inline CauchySchwarzResult cauchy_schwarz_bound(const ParameterFamily& family, std::size_t max_count = 0)
{
    return cauchy_schwarz_bound(family.members(), max_count);
}

/// Mode of a gamma density and the density value there.
struct PeakPoint {
    double location;
    double height;
};

inline PeakPoint peak_point(const GammaParams& params)
{
    params.validate();
    if (!(params.shape > 1.0))
        throw Error(ErrorCode::NoInteriorMode,
                    "gamma density with shape " + std::to_string(params.shape) + " has no interior peak");
    const double w = (params.shape - 1.0) * params.scale;
    return {w, params.density(w)};
}

inline double peak_distance(const PeakPoint& a, const PeakPoint& b) noexcept
{
    return std::hypot(a.location - b.location, a.height - b.height);
}

/// Average Euclidean distance from each member peak to the pre-vaccination peak.
inline double mean_peak_distance(const GammaParams& pre, const ParameterFamily& family)
{
    const PeakPoint pa = peak_point(pre);
    double total = 0.0;
    for (const auto& g : family.members())
        total += peak_distance(peak_point(g), pa);
    return total / static_cast<double>(family.size());
}

/**
 * Peak height recovered from the mean peak distance,
 *     Gamma(w_mean) = Gamma(w_a) +/- sqrt(dbar^2 - (w_a - w_mean)^2).
 *
 * That relation is Pythagoras applied to the centroid of the member peaks,
 * but with dbar, the mean of the member distances, in place of the distance
 * to the centroid. The two agree for one member and differ in general; the
 * difference is reported as jensen_gap and the residuals show what it costs.
 */
struct PeakFormulaResult {
    double predicted_plus;
    double predicted_minus;
    double mean_location;          ///< mean of member peak locations
    double centroid_height;        ///< mean of member peak heights
    double mixture_density_height; ///< (1/n) sum_j Gamma_j(mean_location)
    double actual_height;          ///< centroid_height
    double residual;               ///< min over branches of |predicted - centroid_height|
    double residual_mixture;       ///< same against mixture_density_height
    double mean_distance;          ///< dbar(P_j, P_a)
    double centroid_distance;      ///< d(P_a, centroid)
    double jensen_gap;             ///< mean_distance - centroid_distance, >= 0
    double radicand;
};

inline PeakFormulaResult peak_height_from_distance(const GammaParams& pre, const ParameterFamily& family)
{
    const PeakPoint pa = peak_point(pre);
    const double n = static_cast<double>(family.size());

    double dist_sum = 0.0, loc_sum = 0.0, height_sum = 0.0;
    for (const auto& g : family.members()) {
        const PeakPoint pj = peak_point(g);
        dist_sum += peak_distance(pj, pa);
        loc_sum += pj.location;
        height_sum += pj.height;
    }

    PeakFormulaResult r{};
    r.mean_distance = dist_sum / n;
    r.mean_location = loc_sum / n;
    r.centroid_height = height_sum / n;
    double mix = 0.0;
    for (const auto& g : family.members())
        mix += g.density(r.mean_location);
    r.mixture_density_height = mix / n;
    r.actual_height = r.centroid_height;
    r.centroid_distance = peak_distance({r.mean_location, r.centroid_height}, pa);
    r.jensen_gap = r.mean_distance - r.centroid_distance;

    const double dw = pa.location - r.mean_location;
    r.radicand = r.mean_distance * r.mean_distance - dw * dw;
    if (r.radicand < -1e-12)
        throw Error(ErrorCode::NegativeRadicand,
                    "peak-distance relation inapplicable: radicand " + std::to_string(r.radicand));
    const double root = std::sqrt(std::max(0.0, r.radicand));
    r.predicted_plus = pa.height + root;
    r.predicted_minus = pa.height - root;
    r.residual = std::min(std::abs(r.predicted_plus - r.centroid_height),
                          std::abs(r.predicted_minus - r.centroid_height));
    r.residual_mixture = std::min(std::abs(r.predicted_plus - r.mixture_density_height),
                                  std::abs(r.predicted_minus - r.mixture_density_height));
    return r;
}

struct VarianceIdentityResult {
    double lhs;         ///< variance(pre) - variance(post)
    double rhs;         ///< E[N_a^2] - E[N_j^2] - (mu_a + mu_j) * dbar_A
    double residual;
    double mean_shift;  ///< dbar_A = mu_a - mu_j
};

/// Variance difference expressed through raw second moments and the mean shift.
inline VarianceIdentityResult variance_difference_identity(const OffspringDistribution& pre,
                                                           const OffspringDistribution& post)
{
    if (pre.has_tail() || post.has_tail())
        throw Error(ErrorCode::TailMassPresent, "variance identity requires exact distributions");
    const double mu_a = mean(pre);
    const double mu_j = mean(post);
    VarianceIdentityResult r{};
    r.mean_shift = mu_a - mu_j;
    r.lhs = variance(pre) - variance(post);
    r.rhs = second_moment(pre) - second_moment(post) - (mu_a + mu_j) * r.mean_shift;
    r.residual = std::abs(r.lhs - r.rhs);
    return r;
}

} // namespace ebp
