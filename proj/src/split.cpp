#include "slg/split.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <random>
#include <string>

#include "slg/error.hpp"
#include "slg/random.hpp"

namespace slg {

namespace {

__extension__ using Wide = unsigned __int128;

[[noreturn]] void out_of_range(std::string_view text) {
  throw Error(ErrorCode::kRatioOutOfRange,
              "train ratio \"" + std::string(text) +
                  "\" must lie strictly between 0 and 1");
}

std::uint64_t parse_uint(std::string_view digits, std::string_view whole) {
  std::uint64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc() ||
      ptr != digits.data() + digits.size()) {
    throw Error(ErrorCode::kRatioOutOfRange,
                "cannot parse train ratio \"" + std::string(whole) + "\"");
  }
  return value;
}

Ratio reduced(std::uint64_t num, std::uint64_t den, std::string_view text) {
  if (den == 0 || num == 0 || num >= den) out_of_range(text);
  std::uint64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

}  // namespace

Ratio parse_ratio(std::string_view text) {
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    std::uint64_t train = parse_uint(text.substr(0, colon), text);
    std::uint64_t test = parse_uint(text.substr(colon + 1), text);
    if (train == 0 || test == 0) out_of_range(text);
    return reduced(train, train + test, text);
  }
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return reduced(parse_uint(text.substr(0, slash), text),
                   parse_uint(text.substr(slash + 1), text), text);
  }
  auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view fraction =
      dot == std::string_view::npos ? std::string_view() : text.substr(dot + 1);
  if (fraction.size() > 18) {
    throw Error(ErrorCode::kRatioOutOfRange,
                "train ratio \"" + std::string(text) + "\" has too many digits");
  }
  std::uint64_t integer = whole.empty() ? 0 : parse_uint(whole, text);
  std::uint64_t den = 1;
  for (std::size_t i = 0; i < fraction.size(); ++i) den *= 10;
  std::uint64_t num = fraction.empty() ? 0 : parse_uint(fraction, text);
  if (integer != 0) out_of_range(text);
  return reduced(num, den, text);
}

std::size_t train_count(std::size_t n, const Ratio& ratio) {
  const Wide product = static_cast<Wide>(n) * ratio.num;
  return static_cast<std::size_t>(product / ratio.den);
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed ? *spec.seed
                                : (static_cast<std::uint64_t>(
                                       std::random_device{}()) << 32) ^
                                      std::random_device{}());
  portable_shuffle(std::span<std::size_t>(order), rng);

  const std::size_t k = train_count(n, spec.train_ratio);
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + k);
  out.test.assign(order.begin() + k, order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace slg
