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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ebp/oracle.hpp"
#include "ebp/pgf.hpp"
#include "test_support.hpp"

namespace ebp {
namespace {

const OffspringDistribution kTwoOrNone = from_probabilities({0.25, 0.0, 0.75});

double total(const ExactGenerationLaw& law)
{
    double s = law.overflow_mass;
    for (double p : law.pmf)
        s += p;
    return s;
}

TEST(ExactGenerationLaw, FirstGenerationIsTheOffspringLaw)
{
    const auto law = exact_generation_law(kTwoOrNone, 1);
    const auto atoms = law.support();
    ASSERT_EQ(atoms.size(), 2u);
    EXPECT_DOUBLE_EQ(atoms.at(0), 0.25);
    EXPECT_DOUBLE_EQ(atoms.at(2), 0.75);
}

TEST(ExactGenerationLaw, SecondGeneration)
{
    const auto law = exact_generation_law(kTwoOrNone, 2);
    const auto atoms = law.support();
    ASSERT_EQ(atoms.size(), 3u);
    EXPECT_NEAR(atoms.at(0), 0.296875, 1e-15);
    EXPECT_NEAR(atoms.at(2), 0.28125, 1e-15);
    EXPECT_NEAR(atoms.at(4), 0.421875, 1e-15);
    EXPECT_EQ(law.generation, 2u);
}

TEST(ExactGenerationLaw, GenerationZeroIsPointMass)
{
    const auto law = exact_generation_law(kTwoOrNone, 0, 64, 3);
    EXPECT_EQ(law.support().size(), 1u);
    EXPECT_EQ(law[3], 1.0);
}

TEST(ExactGenerationLaw, DeterministicChain)
{
    const auto law = exact_generation_law(point_mass(1), 7);
    EXPECT_EQ(law.support().size(), 1u);
    EXPECT_EQ(law[1], 1.0);
}

TEST(ExactGenerationLaw, RequiresExactDistribution)
{
    EXPECT_THROW(exact_generation_law(discretize_gamma({2.0, 1.0}, 4), 2), Error);
}

TEST(ExactExtinction, Examples)
{
    EXPECT_NEAR(exact_extinction(kTwoOrNone, 2), 0.296875, 1e-15);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        const auto d = testing::random_distribution(rng, 3);
        EXPECT_NEAR(exact_extinction(d, 1), d.theta0(), 1e-15);
    }
}

TEST(ExactExtinction, CriticalApproachesOneFromBelow)
{
    const auto d = from_probabilities({0.5, 0.0, 0.5});
    double prev = 0.0;
    for (std::uint64_t n = 1; n <= 50; n += 7) {
        const double p = exact_extinction(d, n, 1024);
        EXPECT_GT(p, prev);
        EXPECT_LT(p, 1.0);
        prev = p;
    }
    EXPECT_NEAR(exact_extinction(d, 50, 1024), extinction_after_n(d, 50), 1e-10);
    // Critical with variance 1: Pr[Z_n = 0] ~ 1 - 2 / n.
    EXPECT_GT(prev, 0.95);
}

TEST(OracleProperty, AgreesWithComposition)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> support(1, 3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = testing::random_distribution(rng, support(rng));
        for (std::uint64_t n = 0; n <= 6; ++n)
            EXPECT_NEAR(exact_extinction(d, n), extinction_after_n(d, n), 1e-10);
    }
}

TEST(OracleProperty, ConservationAndMeanPropagation)
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = testing::random_distribution(rng, 3);
        const double r0 = mean(d);
        for (std::uint64_t n = 0; n <= 6; ++n) {
            const auto law = exact_generation_law(d, n, 256, 2);
            EXPECT_NEAR(total(law), 1.0, 1e-12);
            double m = 0.0;
            for (std::size_t k = 0; k < law.pmf.size(); ++k)
                m += static_cast<double>(k) * law.pmf[k];
            const double expected = 2.0 * std::pow(r0, static_cast<double>(n));
            // Mass above the cap is dropped, so the tracked mean can only fall short.
            if (law.overflow_mass == 0.0)
                EXPECT_NEAR(m, expected, 1e-10 * std::max(1.0, expected));
            else
                EXPECT_LE(m, expected + 1e-10);
        }
    }
}

TEST(OracleProperty, OverflowBucketIsExplicit)
{
    const auto law = exact_generation_law(point_mass(3), 4, 50);
    EXPECT_NEAR(law.overflow_mass, 1.0, 1e-15);
    EXPECT_EQ(law[0], 0.0);
}

} // namespace
} // namespace ebp
