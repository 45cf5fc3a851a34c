#ifndef CPID_RNG_HPP_
#define CPID_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cpid {

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based stream keyed by (seed, a, b, c). Two streams with the same key
// produce the same sequence regardless of which thread draws them.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

    std::uint64_t next();
    double uniform();                      // [0, 1), 53 bits
    std::size_t below(std::size_t n);      // uniform on 0..n-1
    bool bernoulli(double p) { return uniform() < p; }
    // Index drawn from unnormalized weights by inversion.
    std::size_t categorical(const std::vector<double>& weights);
    // Poisson(lambda) by inversion of the CDF.
    std::uint64_t poisson(double lambda);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Seed from the environment (CPID_SEED) when set, otherwise `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback);

}  // namespace cpid

#endif  // CPID_RNG_HPP_
