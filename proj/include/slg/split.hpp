#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace slg {

/// Exact train fraction num/den, 0 < num < den.
struct Ratio {
  std::uint64_t num = 9;
  std::uint64_t den = 10;
};

/// Accepts a decimal ("0.9"), a fraction ("9/10") or a train:test
/// proportion ("9:1"). Throws Error(kRatioOutOfRange) outside (0, 1).
Ratio parse_ratio(std::string_view text);

struct SplitSpec {
  Ratio train_ratio;
  // Absent: seeded from std::random_device, so every run differs.
  std::optional<std::uint64_t> seed;
};

/// floor(n * ratio)
std::size_t train_count(std::size_t n, const Ratio& ratio);

/// Indices of each side, each in ascending (input) order.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

}  // namespace slg
