#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace condfield {

inline constexpr std::string_view kToolName = "condfield";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Numerical tolerances. `norm` gates normalization of probability tables,
// `eq` gates identity checks between two evaluated expressions.
struct Tolerances {
  double norm = 1e-12;
  double eq = 1e-10;
};

// Below this magnitude comparisons are absolute; above it, relative.
inline constexpr double kRelativeSwitch = 1e-8;

// Residual between two sides of an identity, each evaluated in its literal
// form. Relative when the larger side exceeds kRelativeSwitch, absolute
// otherwise, so violations near tiny probabilities are not drowned out.
inline double residual(double lhs, double rhs) {
  const double diff = std::abs(lhs - rhs);
  const double ref = std::max(std::abs(lhs), std::abs(rhs));
  return ref > kRelativeSwitch ? diff / ref : diff;
}

// SplitMix64; used to derive independent deterministic seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t seed_for(std::uint64_t session_seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(session_seed ^ h);
}

}  // namespace condfield
