#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace fracwick {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

// Philox4x32-10 (Salmon et al., SC'11). Stateless: a block is a pure
// function of (counter, key).
namespace philox {
using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter block(Counter ctr, Key key) noexcept;
}  // namespace philox

// Standard normal variates addressed by (master_seed, stream_index, draw).
//
// Draw d uses Philox block floor(d/2) with counter (block_lo, block_hi,
// stream_lo, stream_hi) and key (seed_lo, seed_hi). The block's four words
// form two 53-bit uniforms u1 in (0,1] and u2 in [0,1); Box-Muller turns
// them into the pair (r cos 2*pi*u2, r sin 2*pi*u2) for draws 2k and 2k+1.
class GaussianStream {
 public:
  explicit GaussianStream(SeedSpec seed) noexcept;

  double at(std::uint64_t draw_index) const noexcept;

  double next() noexcept;
  void fill(std::vector<double>& out);

  std::uint64_t position() const noexcept { return position_; }

 private:
  std::array<double, 2> pair(std::uint64_t block) const noexcept;

  philox::Key key_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<double, 2> cached_{};
};

// Uniform [0,1) doubles from the same counter scheme, for permutation tests
// and other test-side randomness.
class UniformStream {
 public:
  explicit UniformStream(SeedSpec seed) noexcept;
  double next() noexcept;
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  philox::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  int slot_ = 2;
  std::array<double, 2> buf_{};
};

}  // namespace fracwick
