#pragma once

#include <cstdint>
#include <random>

namespace privlq {

/// Deterministic random stream keyed by (seed, stream_id).
///
/// Equal keys reproduce the exact same draw sequence; distinct stream ids give
/// independent sequences. The engine is std::mt19937_64, whose output is fully
/// specified by the standard, and all distribution transforms are implemented
/// here rather than via std::*_distribution (those are implementation-defined).
///
/// A stream is single-owner: share work across threads by deriving substreams,
/// never by sharing one stream object.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  /// Standard normal via Box-Muller (pair cached).
  double gaussian();

  /// Zero-mean, unit-variance Laplace (inverse CDF).
  double laplace_unit();

  /// Zero-mean, unit-variance uniform on [-sqrt(3), sqrt(3)].
  double uniform_unit();

  /// Unbiased index in [0, count) by rejection.
  std::size_t uniform_index(std::size_t count);

  /// Independent stream derived from this one's key and an index.
  RngStream substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace privlq
