#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace corset {

using Rng = std::mt19937_64;

/// Deterministic per-draw RNG stream. Salts identify (iteration, slot, ...)
/// so that concurrent draws are reproducible regardless of scheduling.
inline Rng make_rng(std::uint64_t seed, std::uint64_t salt1 = 0,
                    std::uint64_t salt2 = 0, std::uint64_t salt3 = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt1),
                      static_cast<std::uint32_t>(salt1 >> 32),
                      static_cast<std::uint32_t>(salt2),
                      static_cast<std::uint32_t>(salt2 >> 32),
                      static_cast<std::uint32_t>(salt3),
                      static_cast<std::uint32_t>(salt3 >> 32)};
    return Rng(seq);
}

/// Uniform draw in [0, n). Library-independent so results are stable
/// across standard library implementations.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    // multiply-shift with rejection on the biased tail
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = rng();
        const auto m = static_cast<unsigned __int128>(x) *
                       static_cast<unsigned __int128>(n);
        if (static_cast<std::uint64_t>(m) >= threshold)
            return static_cast<std::size_t>(m >> 64);
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool coin(Rng& rng) { return (rng() & 1u) != 0; }

/// Categorical distribution over non-negative weights. Zero-weight entries
/// are never drawn; long double keeps the exponential record weights finite.
class Categorical {
public:
    Categorical() = default;

    explicit Categorical(const std::vector<long double>& weights) {
        cumulative_.reserve(weights.size());
        long double running = 0.0L;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] < 0.0L || !std::isfinite(weights[i]))
                throw std::invalid_argument("Categorical: bad weight");
            if (weights[i] > 0.0L) {
                running += weights[i];
                cumulative_.push_back(running);
                index_.push_back(i);
            }
        }
        total_ = running;
    }

    [[nodiscard]] long double total() const { return total_; }
    [[nodiscard]] bool empty() const { return index_.empty() || total_ <= 0.0L; }
    [[nodiscard]] std::size_t support_size() const { return index_.size(); }

    /// Index into the original weight vector.
    std::size_t draw(Rng& rng) const {
        if (empty()) throw std::logic_error("Categorical: all weights are zero");
        const long double u =
            static_cast<long double>(uniform_real01(rng)) * total_;
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) --it;
        return index_[static_cast<std::size_t>(it - cumulative_.begin())];
    }

private:
    std::vector<long double> cumulative_;
    std::vector<std::size_t> index_;
    long double total_ = 0.0L;
};

}  // namespace corset
