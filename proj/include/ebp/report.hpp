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
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ebp/simulate.hpp"

namespace ebp {

/// 17 significant digits: every double round-trips exactly.
inline std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Fixed six decimals for the human-readable report.
inline std::string format_short(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

struct SimulationRow {
    std::uint64_t generation;
    double empirical_extinct_prob;
    double mean_size_surviving;
    std::uint64_t paths_alive;

    friend bool operator==(const SimulationRow&, const SimulationRow&) = default;
};

struct ComparisonRow {
    std::uint64_t generation;
    double extinct_prob_pre;
    double extinct_prob_post;

    friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

inline constexpr const char* simulation_csv_header = "generation,empirical_extinct_prob,mean_size_surviving,paths_alive";
inline constexpr const char* comparison_csv_header = "generation,extinct_prob_pre,extinct_prob_post";

inline std::vector<SimulationRow> simulation_rows(const EnsembleStats& s)
{
    std::vector<SimulationRow> rows;
    for (std::size_t n = 0; n < s.extinction_prob_by_generation.size(); ++n)
        rows.push_back({n, s.extinction_prob_by_generation[n], s.mean_size_surviving[n], s.paths_alive[n]});
    return rows;
}

inline std::vector<ComparisonRow> comparison_rows(const EnsembleStats& pre, const EnsembleStats& post)
{
    std::vector<ComparisonRow> rows;
    const std::size_t n = std::min(pre.extinction_prob_by_generation.size(),
                                   post.extinction_prob_by_generation.size());
    for (std::size_t g = 0; g < n; ++g)
        rows.push_back({g, pre.extinction_prob_by_generation[g], post.extinction_prob_by_generation[g]});
    return rows;
}

inline void write_csv(std::ostream& out, const std::vector<SimulationRow>& rows)
{
    out << simulation_csv_header << '\n';
    for (const auto& r : rows)
        out << r.generation << ',' << format_real(r.empirical_extinct_prob) << ','
            << format_real(r.mean_size_surviving) << ',' << r.paths_alive << '\n';
}

inline void write_csv(std::ostream& out, const std::vector<ComparisonRow>& rows)
{
    out << comparison_csv_header << '\n';
    for (const auto& r : rows)
        out << r.generation << ',' << format_real(r.extinct_prob_pre) << ','
            << format_real(r.extinct_prob_post) << '\n';
}

namespace detail {

inline std::vector<std::vector<std::string>> read_csv_fields(std::istream& in, const char* header,
                                                             std::size_t columns)
{
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw std::runtime_error("unexpected CSV header: '" + line + "'");
    std::vector<std::vector<std::string>> records;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            fields.push_back(field);
        if (fields.size() != columns)
            throw std::runtime_error("malformed CSV record: '" + line + "'");
        records.push_back(std::move(fields));
    }
    return records;
}

inline double parse_real(const std::string& s)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error("not a number: '" + s + "'");
    return v;
}

inline std::uint64_t parse_count(const std::string& s)
{
    char* end = nullptr;
    const auto v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error("not an integer: '" + s + "'");
    return v;
}

} // namespace detail

inline std::vector<SimulationRow> read_simulation_csv(std::istream& in)
{
    std::vector<SimulationRow> rows;
    for (const auto& f : detail::read_csv_fields(in, simulation_csv_header, 4))
        rows.push_back({detail::parse_count(f[0]), detail::parse_real(f[1]), detail::parse_real(f[2]),
                        detail::parse_count(f[3])});
    return rows;
}

inline std::vector<ComparisonRow> read_comparison_csv(std::istream& in)
{
    std::vector<ComparisonRow> rows;
    for (const auto& f : detail::read_csv_fields(in, comparison_csv_header, 3))
        rows.push_back({detail::parse_count(f[0]), detail::parse_real(f[1]), detail::parse_real(f[2])});
    return rows;
}

} // namespace ebp
