#include "lad/rng.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace lad {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  if (u1 <= 0.0) u1 = 0x1.0p-53;  // keep log finite
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::bounded(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::bounded: n must be >= 1");
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % n;
  }
}

Rng Rng::fork(std::string_view tag) {
  return Rng(splitmix64(next_u64() ^ fnv1a64(tag)));
}

std::string Rng::serialize() const {
  std::ostringstream out;
  out << (has_spare_ ? 1 : 0) << ' ';
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", spare_);
  out << buf << ' ' << engine_;
  return out.str();
}

Rng Rng::deserialize(const std::string& text) {
  std::istringstream in(text);
  int has_spare = 0;
  std::string spare_hex;
  Rng rng(0);
  in >> has_spare >> spare_hex >> rng.engine_;
  if (!in) throw std::invalid_argument("Rng::deserialize: malformed state string");
  rng.has_spare_ = has_spare != 0;
  rng.spare_ = std::strtod(spare_hex.c_str(), nullptr);
  return rng;
}

}  // namespace lad
