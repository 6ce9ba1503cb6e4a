#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rtpinn {

// Gray-code Sobol generator with Joe-Kuo direction numbers (dimensions 1..16).
class SobolSequence {
 public:
  static constexpr std::size_t kMaxDimension = 16;
  static constexpr int kBits = 32;

  explicit SobolSequence(std::size_t dim);

  // Next point in [0,1)^dim. The first call returns the origin.
  std::vector<double> next();
  void next(double* out);
  void skip(std::uint64_t count);
  void reset();

  std::size_t dimension() const { return dim_; }
  std::uint64_t index() const { return index_; }

 private:
  std::size_t dim_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> state_;
  // directions_[d * kBits + bit]
  std::vector<std::uint32_t> directions_;
};

// Row-major n x dim block of Sobol points after discarding the first `skip`.
std::vector<double> sobol_sequence(std::size_t dim, std::size_t n, std::size_t skip = 1);

}  // namespace rtpinn
