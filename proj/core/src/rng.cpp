#include "skewbessel/rng.hpp"

#include <cmath>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

#include "skewbessel/error.hpp"

namespace skewbessel {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

#if defined(__SSE2__)
namespace {

// Four 32x32->64 products of v with m, split into high and low halves.
inline void mulhilo4(__m128i v, __m128i m, __m128i& hi, __m128i& lo) {
  const __m128i even = _mm_mul_epu32(v, m);
  const __m128i odd = _mm_mul_epu32(_mm_srli_epi64(v, 32), m);
  lo = _mm_unpacklo_epi32(_mm_shuffle_epi32(even, _MM_SHUFFLE(0, 0, 2, 0)),
                          _mm_shuffle_epi32(odd, _MM_SHUFFLE(0, 0, 2, 0)));
  hi = _mm_unpacklo_epi32(_mm_shuffle_epi32(even, _MM_SHUFFLE(0, 0, 3, 1)),
                          _mm_shuffle_epi32(odd, _MM_SHUFFLE(0, 0, 3, 1)));
}

}  // namespace
#endif

// Same words as philox4x32_10 on kLanes consecutive counters, one lane per
// block.
void RngStream::refill() {
  static_assert(kLanes == 4);
  alignas(16) std::uint32_t c[4][kLanes];
  for (int l = 0; l < kLanes; ++l) {
    const std::uint64_t b = block_ + static_cast<std::uint64_t>(l);
    c[0][l] = static_cast<std::uint32_t>(b);
    c[1][l] = static_cast<std::uint32_t>(b >> 32);
    c[2][l] = static_cast<std::uint32_t>(stream_id_);
    c[3][l] = static_cast<std::uint32_t>(stream_id_ >> 32);
  }
  std::uint32_t k0 = key_[0], k1 = key_[1];
#if defined(__SSE2__)
  __m128i x0 = _mm_load_si128(reinterpret_cast<const __m128i*>(c[0]));
  __m128i x1 = _mm_load_si128(reinterpret_cast<const __m128i*>(c[1]));
  __m128i x2 = _mm_load_si128(reinterpret_cast<const __m128i*>(c[2]));
  __m128i x3 = _mm_load_si128(reinterpret_cast<const __m128i*>(c[3]));
  const __m128i m0 = _mm_set1_epi32(static_cast<int>(kM0));
  const __m128i m1 = _mm_set1_epi32(static_cast<int>(kM1));
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kW0;
      k1 += kW1;
    }
    __m128i hi0, lo0, hi1, lo1;
    mulhilo4(x0, m0, hi0, lo0);
    mulhilo4(x2, m1, hi1, lo1);
    x0 = _mm_xor_si128(_mm_xor_si128(hi1, x1), _mm_set1_epi32(static_cast<int>(k0)));
    x2 = _mm_xor_si128(_mm_xor_si128(hi0, x3), _mm_set1_epi32(static_cast<int>(k1)));
    x1 = lo1;
    x3 = lo0;
  }
  _mm_store_si128(reinterpret_cast<__m128i*>(c[0]), x0);
  _mm_store_si128(reinterpret_cast<__m128i*>(c[1]), x1);
  _mm_store_si128(reinterpret_cast<__m128i*>(c[2]), x2);
  _mm_store_si128(reinterpret_cast<__m128i*>(c[3]), x3);
#else
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kW0;
      k1 += kW1;
    }
    for (int l = 0; l < kLanes; ++l) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0][l];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2][l];
      const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c[1][l] ^ k0;
      const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c[3][l] ^ k1;
      c[1][l] = static_cast<std::uint32_t>(p1);
      c[3][l] = static_cast<std::uint32_t>(p0);
      c[0][l] = n0;
      c[2][l] = n2;
    }
  }
#endif
  for (int l = 0; l < kLanes; ++l) {
    for (int w = 0; w < 4; ++w) buffer_[4 * l + w] = c[w][l];
  }
  block_ += kLanes;
  index_ = 0;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma variate: shape must be positive");
  if (shape < 1.0) {
    // Gamma(k) = Gamma(k + 1) * U^{1/k}
    const double g = gamma(shape + 1.0);
    return std::exp(std::log(g) + std::log(uniform()) / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d - d * v + d * std::log(v)) return d * v;
  }
}

double RngStream::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw DomainError("poisson variate: mean must be non-negative");
  // Inversion in chunks keeps exp(-chunk) away from underflow.
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double chunk = remaining > 500.0 ? 500.0 : remaining;
    remaining -= chunk;
    double p = std::exp(-chunk);
    double cdf = p;
    const double u = uniform();
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= chunk / static_cast<double>(k);
      cdf += p;
    }
    total += k;
  }
  return total;
}

}  // namespace skewbessel
