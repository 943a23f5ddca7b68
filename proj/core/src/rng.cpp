#include "gclt/rng.hpp"

#include <cmath>
#include <numbers>

namespace gclt {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> round_once(
    const std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
    std::uint64_t p0 = std::uint64_t(kMul0) * c[0];
    std::uint64_t p1 = std::uint64_t(kMul1) * c[2];
    return {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
            std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter) {
    counter = round_once(counter, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        counter = round_once(counter, key);
    }
    return counter;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

CounterStream::CounterStream(std::uint64_t seed, std::uint32_t pair,
                             std::uint32_t path, std::uint32_t component)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
      counter_{0u, component, path, pair} {}

std::uint64_t CounterStream::next_u64() {
    if (pos_ >= 4) {
        buffer_ = philox4x32(key_, counter_);
        ++counter_[0];
        pos_ = 0;
    }
    std::uint64_t lo = buffer_[pos_];
    std::uint64_t hi = buffer_[pos_ + 1];
    pos_ += 2;
    return lo | (hi << 32);
}

double CounterStream::uniform() {
    // (0,1]: the +1 keeps log() finite on the left edge.
    return double((next_u64() >> 11) + 1) * 0x1p-53;
}

double CounterStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

} // namespace gclt
