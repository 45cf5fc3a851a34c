#include "cpid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "cpid/errors.hpp"

namespace cpid {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c)
    : key_(splitmix64(seed ^ splitmix64(a ^ splitmix64(b ^ splitmix64(c))))) {}

std::uint64_t CounterRng::next() {
    return splitmix64(key_ + 0xd1b54a32d192ed03ULL * ++counter_);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t CounterRng::below(std::size_t n) {
    if (n == 0) return 0;
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
}

std::size_t CounterRng::categorical(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0) continue;
        acc += weights[i];
        last = i;
        if (u < acc) return i;
    }
    return last;
}

std::uint64_t CounterRng::poisson(double lambda) {
    if (!(lambda > 0)) return 0;
    // beyond any rate the models produce; the mean is close enough
    if (lambda > 1e5) return static_cast<std::uint64_t>(std::llround(std::min(lambda, 1e18)));
    // split large rates so exp(-lambda) stays representable
    if (lambda > 500) return poisson(500) + poisson(lambda - 500);
    double u = uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf && k < 100000) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cdf += p;
        if (p == 0) break;
    }
    return k;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* s = std::getenv("CPID_SEED");
    if (!s || !*s) return fallback;
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(s, &used);
        if (used != std::string(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidParams(std::string("CPID_SEED is not an unsigned integer: ") + s);
    }
}

}  // namespace cpid
