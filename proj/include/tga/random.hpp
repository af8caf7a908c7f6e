#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace tga {

/// Seeded generator with toolchain-independent draws (no std distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below(0)");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    bool coin() { return (engine_() >> 63) != 0; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v.at(below(v.size()));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace tga
