#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace storseismic {

//! Seedable pseudo-random generator: xoshiro256** (Blackman & Vigna) with its
//! state expanded from a 64-bit seed by splitmix64.
//!
//! Every distribution below is implemented here rather than taken from
//! <random>, whose distributions are allowed to differ between standard
//! library vendors. Output is therefore bit-identical on every platform for a
//! given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  //! Independent stream keyed by (seed, stream_id). Used to give every gather,
  //! epoch, or worker its own generator so that evaluation order never changes
  //! the numbers drawn.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  //! Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  //! Uniform integer on [0, n). Lemire's nearly-divisionless rejection method.
  std::size_t uniform_index(std::size_t n);

  //! Uniform integer on [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  //! Standard normal via the Marsaglia polar method.
  double normal();
  double normal(double mean, double stddev);

  //! Normal truncated to [-2 sigma, 2 sigma] by redraw.
  double truncated_normal(double stddev);

  bool bernoulli(double p);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

  std::array<std::uint64_t, 4> state() const { return state_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace storseismic
