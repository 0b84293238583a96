#include "loclen/random.hpp"

namespace loclen {

Seed Seed::child(std::uint64_t i) const noexcept {
    return Seed{stream_id, splitmix64(substream_index ^ splitmix64(i + 0x632be59bd9b4e019ULL))};
}

Rng::Rng(Seed seed) {
    const std::uint64_t a = splitmix64(seed.stream_id);
    const std::uint64_t b = splitmix64(a ^ seed.substream_index);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
}

}  // namespace loclen
