#pragma once

#include <cstdint>
#include <random>

namespace spgm {

// Independent sub-streams of one run. Values are part of the reproducibility
// contract: changing them changes every trajectory.
enum class StreamId : std::uint64_t {
  kGradientNoise = 1,
  kOutputSampler = 2,
  kInnerProx = 3,
  kDiagnostic = 4,
  kReplication = 5,
};

// A seeded random source owned by a single run. Two streams built from the
// same (seed, stream, substream) triple produce identical sequences.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamId stream, std::uint64_t substream = 0);

  double normal() { return normal_(engine_); }
  // Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace spgm
