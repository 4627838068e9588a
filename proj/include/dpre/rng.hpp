/*
   Copyright 2026 The dpre Authors

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

// Counter-based random streams. Every random quantity in the library is a
// pure function of (master seed, domain, stream index, draw position), so
// results never depend on how work is split across threads.

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace dpre {

/// Philox4x32-10 block function (Salmon et al., Random123).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter block(Counter ctr, Key key)
    {
        std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
        std::uint32_t k0 = key[0], k1 = key[1];
#pragma GCC unroll 10
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kMul0} * c0;
            const std::uint64_t p1 = std::uint64_t{kMul1} * c2;
            c0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
            c1 = static_cast<std::uint32_t>(p1);
            c2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
            c3 = static_cast<std::uint32_t>(p0);
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return {c0, c1, c2, c3};
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Independent purposes that draw from the same master seed.
enum class StreamDomain : std::uint64_t {
    path_noise = 1,
    environment = 2,
    chains = 3,
    bridge = 4,
};

/// SplitMix64 finaliser; used only to spread seeds into Philox keys.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// A UniformRandomBitGenerator over one Philox stream. The key comes from
/// (seed, domain), the high half of the counter is the stream index and the
/// low half counts blocks, so stream i is addressable without touching
/// streams 0..i-1.
class StreamEngine {
public:
    using result_type = std::uint64_t;

    StreamEngine(std::uint64_t master_seed, StreamDomain domain, std::uint64_t stream)
    {
        const std::uint64_t k = mix64(master_seed ^ mix64(static_cast<std::uint64_t>(domain)));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
        stream_lo_ = static_cast<std::uint32_t>(stream);
        stream_hi_ = static_cast<std::uint32_t>(stream >> 32);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        if (pos_ == 2) {
            refill();
        }
        return buffer_[pos_++];
    }

    std::uint64_t blocks_used() const { return block_; }

private:
    void refill()
    {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                      static_cast<std::uint32_t>(block_ >> 32), stream_lo_, stream_hi_};
        const auto out = Philox4x32::block(ctr, key_);
        buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
        buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
        ++block_;
        pos_ = 0;
    }

    Philox4x32::Key key_{};
    std::uint32_t stream_lo_ = 0;
    std::uint32_t stream_hi_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int pos_ = 2;
};

/// Standard normal and unit-rate exponential variates on top of a stream.
/// Boost's ziggurat samplers are used for their fixed, portable algorithms.
class Variates {
public:
    Variates(std::uint64_t master_seed, StreamDomain domain, std::uint64_t stream)
        : engine_(master_seed, domain, stream)
    {
    }

    double normal() { return normal_(engine_); }
    double exponential() { return exponential_(engine_); }
    StreamEngine& engine() { return engine_; }

private:
    StreamEngine engine_;
    boost::random::normal_distribution<double> normal_;
    boost::random::exponential_distribution<double> exponential_;
};

} // namespace dpre
