// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include <cstdint>
#include <limits>

namespace nrpos
{

// Counter-based generator: output i is a SplitMix64 finalizer applied to (key, i).
// Streams are split by hashing the parent key with a stream index, so realization r
// of a Monte Carlo run can be regenerated without touching any other stream.
class CounterRng
{
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key = 0, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Independent child stream; does not advance this generator.
    CounterRng split(std::uint64_t stream) const;

    double uniform();                        // [0, 1)
    double uniform(double lo, double hi);    // [lo, hi)
    double normal();                         // N(0, 1), Box-Muller on two counter draws
    std::uint64_t below(std::uint64_t n);    // uniform integer in [0, n)

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

std::uint64_t mix64(std::uint64_t x);

// split(master, i) as a free function
inline CounterRng split(std::uint64_t master, std::uint64_t i) { return CounterRng(master).split(i); }

} // namespace nrpos
