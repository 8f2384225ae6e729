#include "nsdde/rng.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

namespace nsdde::rng {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t Stream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ull);
}

double Stream::next_unit() {
  // 53 mantissa bits, offset by half an ulp so 0 and 1 are unreachable
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Stream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double Stream::next_exponential(double rate) {
  assert(rate > 0.0);
  return -std::log(next_unit()) / rate;
}

double Stream::next_range(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

int Stream::next_index(int n) {
  assert(n >= 1);
  const int idx = 1 + static_cast<int>(next_unit() * static_cast<double>(n));
  return idx > n ? n : idx;
}

Vec Stream::next_gaussian_increment(int m, double dt) {
  const double scale = std::sqrt(dt);
  Vec out(static_cast<std::size_t>(m));
  for (double& v : out) v = scale * next_normal();
  return out;
}

Vec Stream::next_point(const SampleBox& box) {
  assert(box.lo.size() == box.hi.size());
  Vec out(box.lo.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = next_range(box.lo[i], box.hi[i]);
  return out;
}

Stream path_stream(std::uint64_t master_seed, std::uint64_t path_index, std::uint64_t tag) {
  std::uint64_t key = mix64(master_seed ^ 0x8000000080008081ull);
  key = mix64(key ^ mix64(path_index + 0x0123456789ABCDEFull));
  key = mix64(key ^ mix64(tag + 0xFEDCBA9876543210ull));
  return Stream(key);
}

Stream seeded(std::uint64_t seed) { return path_stream(seed, 0, kGenericStream); }

}  // namespace nsdde::rng
