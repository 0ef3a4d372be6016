#include "privlq/rng.hpp"

#include <cmath>
#include <numbers>

namespace privlq {

namespace {

// splitmix64; used only to turn (seed, stream_id) into engine seeds.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t a, std::uint64_t b) { return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(combine(seed, stream_id)) {}

double RngStream::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double RngStream::laplace_unit() {
  const double u = uniform01() - 0.5;
  const double scale = 1.0 / std::numbers::sqrt2;  // variance 2*scale^2 = 1
  const double mag = std::abs(u);
  return (u < 0.0 ? scale : -scale) * std::log1p(-2.0 * mag);
}

double RngStream::uniform_unit() {
  const double sqrt3 = 1.7320508075688772;
  return (2.0 * uniform01() - 1.0) * sqrt3;
}

std::size_t RngStream::uniform_index(std::size_t count) {
  const std::uint64_t n = static_cast<std::uint64_t>(count);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return static_cast<std::size_t>(x % n);
}

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(seed_, combine(stream_id_, index) | 1ULL);
}

}  // namespace privlq
