#ifndef ALSSM_RNG_HPP
#define ALSSM_RNG_HPP

#include <cstdint>
#include <vector>

namespace alssm {

// Counter-based Philox4x32-10 generator.
//
// Every consumer of randomness takes an explicit Rng; independent streams are
// obtained with split(), so parallel replications never share state and a run
// is reproducible bit-for-bit regardless of worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  // Independent stream with the same seed. Streams derived with distinct ids
  // never overlap (the id is part of the 128-bit counter).
  Rng split(std::uint64_t stream_id) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos();

  double normal();  // standard normal (Box-Muller, pair-cached)
  double exponential(double rate);
  double gamma(double shape, double rate);
  double chi_square(double dof);
  double student_t(double dof);
  // Inverse-Gamma(shape, scale): density ~ x^{-shape-1} exp(-scale/x).
  double inverse_gamma(double shape, double scale);
  // Inverse-Gaussian(mean, shape), Michael-Schucany-Haas.
  double inverse_gaussian(double mean, double shape);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint32_t key_[2];
  std::uint32_t counter_[4];
  std::uint32_t buffer_[4];
  int buffer_pos_ = 4;  // empty
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace alssm

#endif  // ALSSM_RNG_HPP
