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
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ebp/analysis.hpp"
#include "ebp/error.hpp"
#include "ebp/offspring.hpp"
#include "ebp/simulate.hpp"

namespace ebp {

/// Scenario validation failure; field() is a dotted path such as "offspring.probabilities[2]".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct GammaSpec {
    GammaParams params;
    std::optional<std::size_t> max_count;
};

struct ThinningSpec {
    double phi;
};

struct Scenario {
    std::variant<std::vector<double>, GammaSpec> offspring;
    std::optional<std::variant<ThinningSpec, GammaSpec>> vaccination;
    SimConfig sim;
    std::optional<ParameterFamily> family;
};

/// Cells used when a gamma spec leaves max_count out: mean + 40 sd, which leaves negligible tail.
inline std::size_t default_cell_count(const GammaParams& g)
{
    const double sd = std::sqrt(g.shape) * g.scale;
    return static_cast<std::size_t>(std::ceil(g.mean() + 40.0 * sd)) + 2;
}

/// Discretized gamma with the tail folded back in, ready for exact analysis.
inline OffspringDistribution realize(const GammaSpec& spec)
{
    const std::size_t cells = spec.max_count.value_or(default_cell_count(spec.params));
    return renormalized(discretize_gamma(spec.params, cells));
}

inline OffspringDistribution pre_distribution(const Scenario& s)
{
    if (const auto* probs = std::get_if<std::vector<double>>(&s.offspring))
        return from_probabilities(*probs);
    return realize(std::get<GammaSpec>(s.offspring));
}

inline std::optional<OffspringDistribution> post_distribution(const Scenario& s)
{
    if (!s.vaccination)
        return std::nullopt;
    if (const auto* t = std::get_if<ThinningSpec>(&*s.vaccination))
        return thin(pre_distribution(s), VaccinationPolicy{t->phi});
    return realize(std::get<GammaSpec>(*s.vaccination));
}

namespace detail {

using json = nlohmann::json;

inline const json& require(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.is_object())
        throw ConfigError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigError(path + "." + key, "missing required field");
    return *it;
}

inline double get_real(const json& v, const std::string& path)
{
    if (!v.is_number())
        throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ConfigError(path, "must be finite");
    return x;
}

inline std::uint64_t get_count(const json& v, const std::string& path, std::uint64_t minimum)
{
    if (!v.is_number_integer())
        throw ConfigError(path, "expected a non-negative integer");
    std::uint64_t x = 0;
    if (v.is_number_unsigned()) {
        x = v.get<std::uint64_t>();
    } else {
        const auto signed_value = v.get<std::int64_t>();
        if (signed_value < 0)
            throw ConfigError(path, "expected a non-negative integer");
        x = static_cast<std::uint64_t>(signed_value);
    }
    if (x < minimum)
        throw ConfigError(path, "must be at least " + std::to_string(minimum));
    return x;
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& path)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || it.key() == a;
        if (!ok)
            throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
    }
}

inline GammaSpec parse_gamma(const json& v, const std::string& path)
{
    if (!v.is_object())
        throw ConfigError(path, "expected an object");
    reject_unknown(v, {"shape", "scale", "max_count"}, path);
    GammaSpec spec;
    spec.params.shape = get_real(require(v, "shape", path), path + ".shape");
    spec.params.scale = get_real(require(v, "scale", path), path + ".scale");
    if (!(spec.params.shape > 0.0))
        throw ConfigError(path + ".shape", "must be positive");
    if (!(spec.params.scale > 0.0))
        throw ConfigError(path + ".scale", "must be positive");
    if (v.contains("max_count"))
        spec.max_count = get_count(v["max_count"], path + ".max_count", 1);
    return spec;
}

inline std::vector<double> parse_reals(const json& v, const std::string& path)
{
    if (!v.is_array() || v.empty())
        throw ConfigError(path, "expected a non-empty array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(get_real(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

/// Exactly one of the named keys must be present.
inline std::string one_of(const json& obj, std::initializer_list<const char*> keys, const std::string& path)
{
    if (!obj.is_object())
        throw ConfigError(path, "expected an object");
    std::string found;
    for (const char* k : keys) {
        if (obj.contains(k)) {
            if (!found.empty())
                throw ConfigError(path, "specify exactly one of the variants, found both '" + found
                                            + "' and '" + k + "'");
            found = k;
        }
    }
    if (found.empty()) {
        std::string names;
        for (const char* k : keys)
            names += (names.empty() ? "" : ", ") + std::string(k);
        throw ConfigError(path, "expected one of: " + names);
    }
    if (obj.size() != 1)
        reject_unknown(obj, keys, path);
    return found;
}

} // namespace detail

/**
 * Parses and validates a scenario document. All errors carry the path of the
 * offending field; nothing is computed before validation finishes.
 */
inline Scenario parse_scenario(const nlohmann::json& doc)
{
    if (!doc.is_object())
        throw ConfigError("$", "scenario must be a JSON object");
    detail::reject_unknown(doc, {"offspring", "vaccination", "simulation", "family"}, "");

    Scenario s;
    const auto& off = detail::require(doc, "offspring", "$");
    if (detail::one_of(off, {"probabilities", "gamma"}, "offspring") == "probabilities") {
        auto probs = detail::parse_reals(off["probabilities"], "offspring.probabilities");
        double total = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] < 0.0)
                throw ConfigError("offspring.probabilities[" + std::to_string(i) + "]",
                                  "negative probability " + std::to_string(probs[i]));
            total += probs[i];
        }
        if (total <= 0.0)
            throw ConfigError("offspring.probabilities", "all weights are zero");
        s.offspring = std::move(probs);
    } else {
        s.offspring = detail::parse_gamma(off["gamma"], "offspring.gamma");
    }

    if (doc.contains("vaccination")) {
        const auto& vac = doc["vaccination"];
        if (detail::one_of(vac, {"thinning", "gamma_shift"}, "vaccination") == "thinning") {
            const auto& t = vac["thinning"];
            if (!t.is_object())
                throw ConfigError("vaccination.thinning", "expected an object");
            detail::reject_unknown(t, {"phi"}, "vaccination.thinning");
            const double phi = detail::get_real(detail::require(t, "phi", "vaccination.thinning"),
                                                "vaccination.thinning.phi");
            if (phi < 0.0 || phi > 1.0)
                throw ConfigError("vaccination.thinning.phi", "must lie in [0, 1]");
            s.vaccination = ThinningSpec{phi};
        } else {
            s.vaccination = detail::parse_gamma(vac["gamma_shift"], "vaccination.gamma_shift");
        }
    }

    if (doc.contains("simulation")) {
        const auto& sim = doc["simulation"];
        if (!sim.is_object())
            throw ConfigError("simulation", "expected an object");
        detail::reject_unknown(sim, {"seed", "paths", "max_generations", "initial_infected"}, "simulation");
        if (sim.contains("seed"))
            s.sim.seed = detail::get_count(sim["seed"], "simulation.seed", 0);
        if (sim.contains("paths")) {
            s.sim.paths = detail::get_count(sim["paths"], "simulation.paths", 1);
            if (s.sim.paths > std::numeric_limits<std::uint32_t>::max())
                throw ConfigError("simulation.paths", "must fit in 32 bits");
        }
        if (sim.contains("max_generations")) {
            const auto g = detail::get_count(sim["max_generations"], "simulation.max_generations", 1);
            if (g > 1'000'000)
                throw ConfigError("simulation.max_generations", "must not exceed 1000000");
            s.sim.max_generations = static_cast<std::uint32_t>(g);
        }
        if (sim.contains("initial_infected")) {
            s.sim.initial_infected = detail::get_count(sim["initial_infected"], "simulation.initial_infected", 1);
            if (s.sim.initial_infected > population_cap)
                throw ConfigError("simulation.initial_infected", "exceeds the population cap");
        }
    }

    if (doc.contains("family")) {
        const auto& fam = doc["family"];
        if (detail::one_of(fam, {"members", "candidates"}, "family") == "members") {
            const auto& members = fam["members"];
            if (!members.is_array() || members.empty())
                throw ConfigError("family.members", "expected a non-empty array");
            std::vector<GammaParams> params;
            for (std::size_t i = 0; i < members.size(); ++i) {
                const auto spec = detail::parse_gamma(members[i], "family.members[" + std::to_string(i) + "]");
                params.push_back(spec.params);
            }
            s.family.emplace(std::move(params));
        } else {
            const auto& cand = fam["candidates"];
            if (!cand.is_object())
                throw ConfigError("family.candidates", "expected an object");
            detail::reject_unknown(cand, {"scales", "shapes"}, "family.candidates");
            const auto scales = detail::parse_reals(detail::require(cand, "scales", "family.candidates"),
                                                    "family.candidates.scales");
            const auto shapes = detail::parse_reals(detail::require(cand, "shapes", "family.candidates"),
                                                    "family.candidates.shapes");
            if (scales.size() != shapes.size())
                throw ConfigError("family.candidates", "scales and shapes must have equal length");
            for (std::size_t i = 0; i < scales.size(); ++i) {
                if (!(scales[i] > 0.0))
                    throw ConfigError("family.candidates.scales[" + std::to_string(i) + "]", "must be positive");
                if (!(shapes[i] > 0.0))
                    throw ConfigError("family.candidates.shapes[" + std::to_string(i) + "]", "must be positive");
            }
            const auto* pre = std::get_if<GammaSpec>(&s.offspring);
            if (!pre)
                throw ConfigError("family.candidates", "candidate families need a gamma offspring law");
            try {
                s.family = vaccination_family(pre->params, scales, shapes);
            } catch (const Error& e) {
                throw ConfigError("family.candidates", e.what());
            }
        }
    }
    return s;
}

inline Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("$", "cannot open scenario file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("$", std::string("malformed scenario: ") + e.what());
    }
    return parse_scenario(doc);
}

} // namespace ebp
