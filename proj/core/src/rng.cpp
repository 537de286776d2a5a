#include "peer/rng.hpp"

namespace peer {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngEngine substream(std::uint64_t root_seed, std::uint64_t replicate_id,
                    Stream purpose) {
  std::uint64_t state = root_seed;
  (void)splitmix64(state);
  state ^= splitmix64(state) + replicate_id;
  std::uint64_t mixed = splitmix64(state);
  state ^= mixed + static_cast<std::uint64_t>(purpose);
  return RngEngine(splitmix64(state));
}

}  // namespace peer
