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

#include <array>
#include <cstdint>
#include <limits>

namespace ebp {

/// Philox4x32-10 block cipher used as a counter-based generator.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter encrypt(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
};

/// SplitMix64 finalizer, used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Independent purposes drawn from the same (seed, path, generation) cell.
enum class StreamTag : std::uint32_t { Offspring = 0, Blocking = 1, Vaccinated = 2 };

/**
 * Random stream addressed by (seed, path, generation, tag). The n-th value of
 * a stream is a pure function of those coordinates and n, so a path can be
 * simulated on any thread in any order and produce the same numbers.
 *
 * Satisfies UniformRandomBitGenerator.
 */
class CounterStream {
public:
    using result_type = std::uint64_t;

    CounterStream(std::uint64_t seed, std::uint32_t path, std::uint32_t generation,
                  StreamTag tag = StreamTag::Offspring) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_(path), generation_(generation), tag_(static_cast<std::uint32_t>(tag))
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        if (lane_ == 0) {
            const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                          (tag_ << 16) | static_cast<std::uint32_t>(block_ >> 32),
                                          generation_, path_};
            buffer_ = Philox4x32::encrypt(ctr, key_);
            ++block_;
        }
        const result_type out = (std::uint64_t{buffer_[2 * lane_]} << 32) | buffer_[2 * lane_ + 1];
        lane_ ^= 1;
        return out;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    Philox4x32::Key key_;
    std::uint32_t path_;
    std::uint32_t generation_;
    std::uint32_t tag_;
    std::uint64_t block_ = 0;
    unsigned lane_ = 0;
    Philox4x32::Counter buffer_{};
};

} // namespace ebp
