#include "zpsync/rng.hpp"

namespace zpsync {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t state = mix64(seed);
    for (std::uint64_t k : keys) state = mix64(state ^ mix64(k + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(state >> 32),
                      static_cast<std::uint32_t>(mix64(state)),
                      static_cast<std::uint32_t>(mix64(state) >> 32)};
    return Rng(seq);
}

Rng fork(Rng& parent, Stream purpose) {
    const std::uint64_t base = parent();
    return make_stream(base, {static_cast<std::uint64_t>(purpose)});
}

} // namespace zpsync
