#pragma once

#include <cstdint>
#include <random>

namespace zeno {

// Deterministic random stream. A (seed, stream) pair fully determines the
// draw sequence, so distinct consumers (server batch, each worker, fault
// selection) get independent streams from one experiment seed.
//
// next_u64/uniform/uniform_int are reproducible bit-for-bit on any platform
// (mt19937_64 output plus bit manipulation only). gaussian() goes through
// libm log/cos, which may differ in the last ulp between C libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer in [0, n); n >= 1. Rejection sampling, unbiased.
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal via Box-Muller. Two raw draws per call, no cached spare.
  double gaussian();

  std::uint64_t draws() const { return draws_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

// Well-known stream ids. Worker i uses kWorkerStreamBase + i.
namespace streams {
inline constexpr std::uint64_t kTaskParams = 0;
inline constexpr std::uint64_t kTaskData = 1;
inline constexpr std::uint64_t kTaskEstimates = 2;
inline constexpr std::uint64_t kTaskEvalData = 3;
inline constexpr std::uint64_t kInit = 4;
inline constexpr std::uint64_t kServerBatch = 5;
inline constexpr std::uint64_t kFaultSelection = 6;
inline constexpr std::uint64_t kWorkerBase = 16;
}  // namespace streams

}  // namespace zeno
