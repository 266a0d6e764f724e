#ifndef SLRD_RNG_HPP
#define SLRD_RNG_HPP

//
// seedable, splittable random number generation
//
// Every consumer draws from its own child stream derived from a base seed
// and a stream index, so replications are reproducible independently of
// execution order or worker count.  Gaussian variates use an explicit
// Box-Muller transform over std::mt19937_64 rather than
// std::normal_distribution, whose algorithm is implementation-defined;
// this keeps streams bit-identical across standard libraries.
//

#include <cstdint>
#include <random>

namespace slrd {

// SplitMix64 finalizer; bijective 64-bit mix used for seed derivation
std::uint64_t mix64(std::uint64_t z) noexcept;

// child seed for stream `stream` under `base_seed`
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // generator for child stream `stream` of `base_seed`
    static Rng child(std::uint64_t base_seed, std::uint64_t stream);

    // uniform on [0, 1)
    double uniform();

    // uniform integer on [0, n); n > 0
    std::uint64_t uniform_below(std::uint64_t n);

    // standard normal variate
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace slrd

#endif
