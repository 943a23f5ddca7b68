#pragma once

#include <array>
#include <cstdint>

namespace gclt {

// Philox4x32-10 block function (counter-based, stateless).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter);

// Splitmix-style finalizer mix of (seed, tag); used to derive independent
// sub-stream seeds (e.g. the mixture reference paths) from one master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// Uniform/normal stream addressed by (seed, pair, path, component).  Values
// depend only on the address and the draw index, never on evaluation order,
// so any subset of an ensemble is reproducible independently.  A stream
// instance should serve either uniform() or normal() draws, not a mix.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint32_t pair, std::uint32_t path,
                  std::uint32_t component);

    double uniform(); // (0,1]
    double normal();

private:
    std::uint64_t next_u64();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_; // {block, component, path, pair}
    std::array<std::uint32_t, 4> buffer_{};
    int pos_ = 4;          // consumed u32 lanes in buffer_
    double spare_ = 0.0;   // second Box-Muller variate
    bool have_spare_ = false;
};

} // namespace gclt
