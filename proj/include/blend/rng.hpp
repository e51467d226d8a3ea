#pragma once

#include <cstdint>
#include <random>

namespace blend {

/// Independent random streams derived from one run seed.
enum class Stream : std::uint32_t {
  arm_selection = 1,
  environment_contexts = 2,
  environment_noise = 3,
  instance = 4,
};

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace blend
