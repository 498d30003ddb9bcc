// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/rng.hpp"

#include <cmath>

namespace nrpos
{

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::result_type CounterRng::operator()()
{
    const std::uint64_t c = counter_++;
    return mix64(mix64(key_) ^ (c * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

CounterRng CounterRng::split(std::uint64_t stream) const
{
    return CounterRng(mix64(key_ ^ mix64(stream + 0x632BE59BD9B4E019ULL)), 0);
}

double CounterRng::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

double CounterRng::normal()
{
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 < 1e-300)
        u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::uint64_t CounterRng::below(std::uint64_t n)
{
    if (n <= 1)
        return 0;
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = max() - (max() % n);
    std::uint64_t x;
    do
        x = (*this)();
    while (x >= limit);
    return x % n;
}

} // namespace nrpos
