#pragma once

#include <cstdint>
#include <random>

namespace experts {

/// Tags for deriving per-round sub-streams, so draws for one purpose never
/// shift the draws of another.
enum class Purpose : std::uint64_t {
  Forecast = 1,
  Choice = 2,
  Adversary = 3,
  Noise = 4,
  MonteCarlo = 5,
  Corpus = 6,
};

/// Reproducible random stream identified by (seed, stream_id).
///
/// The engine is a std::mt19937_64 seeded through std::seed_seq from the
/// four 32-bit halves of the pair, so the sequence is fixed by the standard
/// and identical across platforms. Child streams are derived by hashing, not
/// by consuming draws from the parent.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent child stream keyed by (a, b); does not advance this stream.
  RngStream substream(std::uint64_t a, std::uint64_t b = 0) const;
  RngStream substream(std::uint64_t round, Purpose purpose) const {
    return substream(round, static_cast<std::uint64_t>(purpose));
  }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on the open interval (0, 1); safe to pass to log().
  double uniform_open01();

  engine_type& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  engine_type engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace experts
