#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace imbench {

// Deterministic random source. mt19937_64 has a fully specified sequence, and
// the draw helpers below avoid std::uniform_*_distribution (whose output is
// implementation-defined), so identical seeds give identical results on every
// platform and compiler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, bound), unbiased via rejection. bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    std::size_t index(std::size_t size) { return static_cast<std::size_t>(below(size)); }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

    // Derives a child seed from a parent seed and a label (FNV-1a over both),
    // so per-task seeds do not depend on scheduling or iteration order.
    static std::uint64_t derive(std::uint64_t seed, std::string_view label) {
        std::uint64_t h = 14695981039346656037ULL;
        auto mix_byte = [&h](unsigned char b) {
            h ^= b;
            h *= 1099511628211ULL;
        };
        for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(seed >> (8 * i)));
        for (char c : label) mix_byte(static_cast<unsigned char>(c));
        return h;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace imbench
