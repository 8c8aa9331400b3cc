#include "clocklat/rng.hpp"

namespace clocklat {

__extension__ typedef unsigned __int128 u128;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 64-bit FNV-1a
std::uint64_t hash_string(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view component) {
  return mix64(seed ^ mix64(hash_string(component)));
}

CounterRng::CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> counters)
    : key_(mix64(seed)) {
  for (auto c : counters) key_ = mix64(key_ ^ mix64(c + 0x632be59bd9b4e019ULL));
}

std::uint64_t CounterRng::next() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++draw_); }

std::uint64_t CounterRng::below(std::uint64_t n) {
  const auto product = static_cast<u128>(next()) * n;
  return static_cast<std::uint64_t>(product >> 64);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

}  // namespace clocklat
