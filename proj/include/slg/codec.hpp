#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "slg/schema.hpp"

namespace slg {

/// The five input/target layouts, F1 (bare sentence) through F5 (angle
/// bracketed SC menu, the default).
enum class FormatVariant { kF1, kF2, kF3, kF4, kF5 };

inline constexpr FormatVariant kDefaultVariant = FormatVariant::kF5;
inline constexpr FormatVariant kAllVariants[] = {
    FormatVariant::kF1, FormatVariant::kF2, FormatVariant::kF3,
    FormatVariant::kF4, FormatVariant::kF5};

/// Accepts "f1".."f5" (case-insensitive).
std::optional<FormatVariant> parse_variant(std::string_view name);
std::string_view to_string(FormatVariant variant);

struct SeqPair {
  std::string input_text;
  std::string target_text;

  friend bool operator==(const SeqPair&, const SeqPair&) = default;
};

/// Fixed literals of a variant's target grammar:
///   target := sc_prefix SC-LABEL sc_close ner_prefix PAIR+
///   PAIR   := ner_open NER-LABEL ner_close SPAN
/// where labels contain no mark and SPAN runs to the next ner_open.
struct TargetLayout {
  std::string sc_prefix;
  std::string sc_close;
  std::string ner_prefix;
};

TargetLayout target_layout(const LabelSchema& schema, FormatVariant variant);

/// Throws Error(kInvalidSentence) when the sentence is empty or contains a
/// mark.
std::string encode_input(std::string_view sentence, const LabelSchema& schema,
                         FormatVariant variant);

std::string encode_target(const ScnmRecord& record, const LabelSchema& schema,
                          FormatVariant variant);

/// The PAIR+ part of a target. An empty list renders as the single
/// none_label pair with an empty span.
std::string encode_pairs(const std::vector<EntityMention>& entities,
                         const LabelSchema& schema);

enum class FormatErrorKind {
  kMissingOpenMark,
  kMissingCloseMark,
  kMissingNerPrompt,
  kNoEntityPairs,
  kUnexpectedEnd,
  kTrailingGarbage,
};

std::string_view to_string(FormatErrorKind kind);

struct FormatError {
  FormatErrorKind kind;
  std::size_t byte_position;

  friend bool operator==(const FormatError&, const FormatError&) = default;
};

/// Shape-level parse of generated text. Labels are not checked against the
/// schema. A non-empty `trailing` holds residue after the last complete pair
/// and makes the text format-invalid.
struct Parsed {
  std::string sc_label;
  std::vector<EntityMention> entities;
  std::string trailing;

  friend bool operator==(const Parsed&, const Parsed&) = default;
};

using ParseResult = std::variant<Parsed, FormatError>;

/// Total over arbitrary bytes.
ParseResult parse_generated(std::string_view text, const LabelSchema& schema,
                            FormatVariant variant);

bool is_format_valid(const ParseResult& result);

/// Position of the first format problem, if any. A Parsed result with
/// trailing residue reports kTrailingGarbage at the residue's offset.
std::optional<FormatError> format_error_of(const ParseResult& result,
                                           std::size_t text_size);

/// The SC label of a leading well-formed SC block, regardless of what
/// follows it.
std::optional<std::string> parse_sc_block(std::string_view text,
                                          const LabelSchema& schema,
                                          FormatVariant variant);

struct TaskPairs {
  SeqPair sc;
  SeqPair ner;
};

/// Splits a record into an SC-only pair and an NER-only pair.
TaskPairs separate_tasks(const ScnmRecord& record, const LabelSchema& schema,
                         FormatVariant variant);

struct IlPair {
  std::string surface;
  std::string category;
};

/// Throws Error(kEmptyField) if either side is empty.
SeqPair convert_il(const IlPair& pair);

}  // namespace slg
