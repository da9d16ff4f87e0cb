#include "spgm/random.hpp"

#include <array>

namespace spgm {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, StreamId stream,
                            std::uint64_t substream) {
  const auto id = static_cast<std::uint64_t>(stream);
  const std::array<std::uint32_t, 6> key{
      static_cast<std::uint32_t>(seed),      static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(id),        static_cast<std::uint32_t>(id >> 32),
      static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
  std::seed_seq seq(key.begin(), key.end());
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, StreamId stream,
                           std::uint64_t substream)
    : engine_(make_engine(seed, stream, substream)) {}

}  // namespace spgm
