#include "fracwick/rng.hpp"

#include <cmath>
#include <numbers>

namespace fracwick {
namespace philox {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Counter block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

}  // namespace philox

namespace {

philox::Key make_key(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed),
          static_cast<std::uint32_t>(seed >> 32)};
}

philox::Counter make_counter(std::uint64_t block,
                             std::uint64_t stream) noexcept {
  return {static_cast<std::uint32_t>(block),
          static_cast<std::uint32_t>(block >> 32),
          static_cast<std::uint32_t>(stream),
          static_cast<std::uint32_t>(stream >> 32)};
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

inline std::uint64_t top53(std::uint32_t hi, std::uint32_t lo) noexcept {
  return ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
}

}  // namespace

GaussianStream::GaussianStream(SeedSpec seed) noexcept
    : key_(make_key(seed.master_seed)), stream_(seed.stream_index) {}

std::array<double, 2> GaussianStream::pair(std::uint64_t blk) const noexcept {
  const auto w = philox::block(make_counter(blk, stream_), key_);
  const double u1 = static_cast<double>(top53(w[0], w[1]) + 1) * kTwoPow53Inv;
  const double u2 = static_cast<double>(top53(w[2], w[3])) * kTwoPow53Inv;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

double GaussianStream::at(std::uint64_t draw_index) const noexcept {
  return pair(draw_index / 2)[draw_index % 2];
}

double GaussianStream::next() noexcept {
  const std::uint64_t blk = position_ / 2;
  if (blk != cached_block_) {
    cached_ = pair(blk);
    cached_block_ = blk;
  }
  return cached_[position_++ % 2];
}

void GaussianStream::fill(std::vector<double>& out) {
  for (double& v : out) v = next();
}

UniformStream::UniformStream(SeedSpec seed) noexcept
    : key_(make_key(seed.master_seed)), stream_(seed.stream_index) {}

double UniformStream::next() noexcept {
  if (slot_ == 2) {
    const auto w = philox::block(make_counter(block_++, stream_), key_);
    buf_ = {static_cast<double>(top53(w[0], w[1])) * kTwoPow53Inv,
            static_cast<double>(top53(w[2], w[3])) * kTwoPow53Inv};
    slot_ = 0;
  }
  return buf_[slot_++];
}

std::uint64_t UniformStream::below(std::uint64_t bound) noexcept {
  auto k = static_cast<std::uint64_t>(next() * static_cast<double>(bound));
  return k < bound ? k : bound - 1;
}

}  // namespace fracwick
