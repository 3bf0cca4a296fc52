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

#include <cstdint>
#include <set>

#include <gtest/gtest.h>

#include "ebp/rng.hpp"

namespace ebp {
namespace {

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswers)
{
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    EXPECT_EQ(Philox4x32::encrypt(C{0, 0, 0, 0}, K{0, 0}),
              (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::encrypt(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::encrypt(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterStream, SameCoordinatesSameValues)
{
    CounterStream a(42, 7, 3), b(42, 7, 3);
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(a(), b());
}

TEST(CounterStream, CoordinatesSeparateStreams)
{
    std::set<std::uint64_t> firsts;
    for (std::uint32_t path = 0; path < 4; ++path)
        for (std::uint32_t gen = 0; gen < 4; ++gen)
            for (auto tag : {StreamTag::Offspring, StreamTag::Blocking, StreamTag::Vaccinated}) {
                CounterStream s(42, path, gen, tag);
                firsts.insert(s());
            }
    CounterStream other_seed(43, 0, 0);
    firsts.insert(other_seed());
    EXPECT_EQ(firsts.size(), 4u * 4u * 3u + 1u);
}

TEST(CounterStream, UniformRangeAndMean)
{
    CounterStream s(1, 0, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // Standard error of the mean is sqrt(1/12/n) ~ 6.5e-4.
    EXPECT_NEAR(sum / n, 0.5, 4e-3);
}

TEST(MixSeed, Distinct)
{
    EXPECT_NE(mix_seed(0), mix_seed(1));
    EXPECT_EQ(mix_seed(12345), mix_seed(12345));
}

} // namespace
} // namespace ebp
