#include "rtpinn/sobol.hpp"

#include <array>
#include <bit>
#include <string>

#include "rtpinn/errors.hpp"

namespace rtpinn {
namespace {

struct Primitive {
  int degree;
  std::uint32_t coefficients;  // interior coefficients a, as in the Joe-Kuo tables
  std::array<std::uint32_t, 6> m;
};

// new-joe-kuo-6.21201, dimensions 2..16. Dimension 1 is the van der Corput sequence.
constexpr std::array<Primitive, 15> kPrimitives = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
}};

}  // namespace

SobolSequence::SobolSequence(std::size_t dim) : dim_(dim) {
  if (dim == 0 || dim > kMaxDimension) {
    throw UnsupportedError("Sobol dimension " + std::to_string(dim) + " outside 1.." +
                           std::to_string(kMaxDimension));
  }
  directions_.assign(dim_ * kBits, 0);
  for (int bit = 0; bit < kBits; ++bit) {
    directions_[bit] = std::uint32_t{1} << (kBits - 1 - bit);
  }
  for (std::size_t d = 1; d < dim_; ++d) {
    const Primitive& p = kPrimitives[d - 1];
    std::array<std::uint32_t, kBits> m{};
    for (int i = 0; i < p.degree; ++i) m[i] = p.m[i];
    for (int i = p.degree; i < kBits; ++i) {
      std::uint32_t value = m[i - p.degree] ^ (m[i - p.degree] << p.degree);
      for (int k = 1; k < p.degree; ++k) {
        if ((p.coefficients >> (p.degree - 1 - k)) & 1u) value ^= m[i - k] << k;
      }
      m[i] = value;
    }
    for (int bit = 0; bit < kBits; ++bit) {
      directions_[d * kBits + bit] = m[bit] << (kBits - 1 - bit);
    }
  }
  reset();
}

void SobolSequence::reset() {
  index_ = 0;
  state_.assign(dim_, 0);
}

void SobolSequence::next(double* out) {
  constexpr double scale = 1.0 / 4294967296.0;
  for (std::size_t d = 0; d < dim_; ++d) out[d] = static_cast<double>(state_[d]) * scale;
  // Gray-code update: flip the direction of the lowest zero bit of the index.
  const int bit = std::countr_one(index_);
  if (bit >= kBits) throw UnsupportedError("Sobol sequence exhausted (2^32 points)");
  for (std::size_t d = 0; d < dim_; ++d) state_[d] ^= directions_[d * kBits + bit];
  ++index_;
}

std::vector<double> SobolSequence::next() {
  std::vector<double> point(dim_);
  next(point.data());
  return point;
}

void SobolSequence::skip(std::uint64_t count) {
  std::vector<double> scratch(dim_);
  for (std::uint64_t i = 0; i < count; ++i) next(scratch.data());
}

std::vector<double> sobol_sequence(std::size_t dim, std::size_t n, std::size_t skip) {
  SobolSequence seq(dim);
  seq.skip(skip);
  std::vector<double> out(n * dim);
  for (std::size_t i = 0; i < n; ++i) seq.next(out.data() + i * dim);
  return out;
}

}  // namespace rtpinn
