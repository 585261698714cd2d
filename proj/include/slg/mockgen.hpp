#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "slg/codec.hpp"
#include "slg/constraint.hpp"
#include "slg/schema.hpp"

namespace slg {

// Single-fault edits of a gold target, modelling typical generator failures.
enum class CorruptionKind {
  kNone,
  kWrongScLabel,
  kWrongNerLabel,
  kWrongSpan,
  kMissingEntity,
  kDuplicateTail,
  kDropOpenMark,
  kExtraneousText,
};

inline constexpr CorruptionKind kAllCorruptions[] = {
    CorruptionKind::kNone,          CorruptionKind::kWrongScLabel,
    CorruptionKind::kWrongNerLabel, CorruptionKind::kWrongSpan,
    CorruptionKind::kMissingEntity, CorruptionKind::kDuplicateTail,
    CorruptionKind::kDropOpenMark,  CorruptionKind::kExtraneousText};

std::string_view to_string(CorruptionKind kind);
std::optional<CorruptionKind> parse_corruption_kind(std::string_view name);

struct Corruption {
  CorruptionKind kind = CorruptionKind::kNone;
  std::uint64_t rng_seed = 0;
};

/// Text appended by kExtraneousText: an unterminated pair opening that
/// carries a leaked sentinel word.
std::string extraneous_marker(const LabelSchema& schema);

/// The gold target with `corruption` applied. Deterministic in
/// (record, schema, variant, corruption).
std::string generate(const ScnmRecord& record, const LabelSchema& schema,
                     FormatVariant variant, const Corruption& corruption);

/// Decodes the output of generate() token by token under the constraint
/// at `level`. A disallowed planned token is replaced by the constraint's
/// forced text when there is one and dropped otherwise; at the end the
/// output rolls back to the last finishable point. Without a vocabulary
/// the decoder uses one token per code point.
std::string generate_constrained(const ScnmRecord& record,
                                 const LabelSchema& schema,
                                 FormatVariant variant,
                                 const Corruption& corruption,
                                 ConstraintLevel level,
                                 const Vocabulary* vocab = nullptr);

/// One token per distinct code point of `text` and of every schema literal.
Vocabulary character_vocabulary(std::string_view text,
                                const LabelSchema& schema);

/// Fraction of records receiving each corruption kind.
struct CorruptionPlan {
  std::vector<std::pair<CorruptionKind, double>> fractions;
};

/// {"None": 0.64, "DropOpenMark": 0.36}. Fractions must lie in [0, 1] and
/// sum to 1; otherwise throws Error(kInvalidPlan).
CorruptionPlan plan_from_json(const nlohmann::json& doc);

/// Gives each of n records a corruption. Per-kind counts follow the
/// largest-remainder rule, so they are exact whenever fraction * n is an
/// integer; which record gets which kind is a seeded shuffle.
std::vector<Corruption> assign_corruptions(std::size_t n,
                                           const CorruptionPlan& plan,
                                           std::uint64_t seed);

}  // namespace slg
