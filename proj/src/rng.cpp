#include "recsplit/rng.hpp"

#include <cmath>

namespace recsplit {

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
    // Rejection to remove modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

double RandomStream::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double RandomStream::gamma(double shape) {
    if (shape < 1.0) {
        // Boost the shape and correct with a power of a uniform.
        const double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RandomStream::beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
}

void RandomStream::dirichlet(std::span<const double> alpha, std::vector<double>& out) {
    out.resize(alpha.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i] = gamma(alpha[i]);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
}

std::uint64_t hash_name(const char* s) {
    // FNV-1a
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (; *s; ++s) {
        h ^= static_cast<unsigned char>(*s);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace recsplit
