#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace scengen {

// Deterministic random stream. Wraps mt19937_64 with explicit uniform/normal
// draws so every sample consumes a fixed, documented number of engine words:
// uniform = 1 word, normal = 2 words (Box-Muller, no cached spare). That makes
// the full stream state equal to the engine state, which serializes exactly.
class RngStream {
  public:
    RngStream() : engine_(0) {}
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    // Child stream derived from (seed, kind, index). seed_seq expansion is
    // fully specified by the standard, so derivation is portable.
    static RngStream child(std::uint64_t seed, std::uint32_t kind, std::uint32_t index = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                          static_cast<std::uint32_t>(seed >> 32), kind, index};
        RngStream s;
        s.engine_.seed(seq);
        return s;
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; consumes exactly two engine words.
    double normal() {
        double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Uniform integer on [0, n); rejection-sampled, unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    std::string serialize() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    static RngStream deserialize(const std::string& text) {
        RngStream s;
        std::istringstream is(text);
        is >> s.engine_;
        if (is.fail()) throw std::invalid_argument("RngStream: malformed serialized state");
        return s;
    }

    bool operator==(const RngStream& other) const { return engine_ == other.engine_; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace scengen
