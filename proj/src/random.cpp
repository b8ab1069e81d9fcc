#include "causalscore/random.hpp"

namespace causalscore {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view dialogue_id, std::uint64_t response_index) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char c : dialogue_id) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return mix64(mix64(seed) ^ mix64(h) ^ mix64(response_index + 0x632BE59BD9B4E019ULL));
}

}  // namespace causalscore
