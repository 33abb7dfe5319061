#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace attrpref {

// Counter-based splittable generator. A stream is (key, counter); draws are
// mix(key + GAMMA * ++counter), so a stream can be re-created from its name at
// any time and always yields the same sequence. Every stochastic choice in the
// project (init, shuffling, masks, subsampling) goes through a named stream so
// runs are reproducible from the manifest seed alone.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kRootSalt)) {}

    // Derives an independent child stream; does not advance this stream.
    SplitRng stream(std::string_view name) const {
        return SplitRng(FromKey{}, mix(key_ ^ mix(fnv1a(name))));
    }

    SplitRng stream(std::uint64_t index) const {
        return SplitRng(FromKey{}, mix(key_ ^ mix(index + 0x1F123BB5ull)));
    }

    std::uint64_t next_u64() { return mix(key_ + kGamma * ++counter_); }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Box-Muller without a cached spare so every draw consumes exactly two
    // words and the stream stays counter-addressable.
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Unbiased uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = n * (~std::uint64_t{0} / n);
        std::uint64_t r = next_u64();
        while (r >= limit) r = next_u64();
        return r % n;
    }

    bool bernoulli(double p) { return next_double() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xCBF29CE484222325ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ull;
        }
        return h;
    }

private:
    struct FromKey {};
    SplitRng(FromKey, std::uint64_t key) : key_(key) {}

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kRootSalt = 0x5851F42D4C957F2Dull;

    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z += kGamma;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace attrpref
