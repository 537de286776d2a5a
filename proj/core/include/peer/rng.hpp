#pragma once

#include <cstdint>
#include <random>

namespace peer {

using RngEngine = std::mt19937_64;

/// splitmix64 step; used to derive independent substream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Named generator purposes so replicate substreams never overlap.
enum class Stream : std::uint64_t {
  kTruth = 1,
  kDesign = 2,
  kNoise = 3,
  kMask = 4,
};

/// Engine for substream (root, replicate, purpose). Substreams are
/// independent functions of their ids, so replicates can be generated in
/// any order or in parallel with identical output.
RngEngine substream(std::uint64_t root_seed, std::uint64_t replicate_id,
                    Stream purpose);

}  // namespace peer
