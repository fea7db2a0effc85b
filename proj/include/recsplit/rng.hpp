#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace recsplit {

// Counter-based splittable random stream.
//
// A stream is a 64-bit key; draw i of the stream is the SplitMix64 finalizer
// applied to key + i*golden. Child streams are derived from the parent *key*
// and a label, never from the parent's draw position, so a node's children
// see the same randomness no matter how many draws the parent made or in
// which order the tree is traversed.
class RandomStream {
public:
    RandomStream() : RandomStream(0) {}
    explicit RandomStream(std::uint64_t seed) : key_(mix64(seed ^ kSeedSalt)), ctr_(0) {}

    // Independent stream identified by (this stream's key, label).
    RandomStream child(std::uint64_t label) const {
        RandomStream c;
        c.key_ = mix64(key_ ^ mix64(label + kChildSalt));
        c.ctr_ = 0;
        return c;
    }

    std::uint64_t next_u64() {
        ctr_ += kGolden;
        return mix64(key_ + ctr_);
    }

    // Uniform on the open interval (0, 1); 53-bit resolution, never 0 or 1.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);

    double normal();                      // standard normal, Box-Muller
    double gamma(double shape);           // Gamma(shape, 1), Marsaglia-Tsang
    double beta(double a, double b);
    void dirichlet(std::span<const double> alpha, std::vector<double>& out);

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kSeedSalt = 0x8BADF00DDEADBEEFull;
    static constexpr std::uint64_t kChildSalt = 0xC2B2AE3D27D4EB4Full;

    static std::uint64_t mix64(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ull;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBull;
        x ^= x >> 31;
        return x;
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
};

// Stable 64-bit hash of a string, for deriving per-task streams from names.
std::uint64_t hash_name(const char* s);

}  // namespace recsplit
