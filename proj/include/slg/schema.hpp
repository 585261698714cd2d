#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace slg {

/// Closed label sets plus the mark strings that bracket labels in the
/// linearized text. Each mark is a single code point.
struct LabelSchema {
  std::vector<std::string> sc_labels;
  std::vector<std::string> ner_labels;
  std::string none_label = "None";
  std::string sc_open = "<";
  std::string sc_close = ">";
  std::string ner_open = ":";
  std::string ner_close = ";";
  std::string ner_prompt = "NER";

  /// The four marks in a fixed order: sc_open, sc_close, ner_open, ner_close.
  std::vector<std::string_view> marks() const;

  /// True if `text` contains any of the four marks.
  bool contains_mark(std::string_view text) const;

  /// NER menu as rendered in inputs: the schema labels followed by none_label.
  std::vector<std::string> ner_menu() const;

  bool is_sc_label(std::string_view label) const;
  bool is_ner_label(std::string_view label) const;

  friend bool operator==(const LabelSchema&, const LabelSchema&) = default;
};

LabelSchema default_schema();

/// Every invariant violation of `schema`, human readable. Empty when valid.
std::vector<std::string> check_schema(const LabelSchema& schema);

/// Throws Error(kInvalidSchema) listing all violations.
void require_valid(const LabelSchema& schema);

LabelSchema schema_from_json(const nlohmann::json& doc);
nlohmann::ordered_json schema_to_json(const LabelSchema& schema);
LabelSchema load_schema(const std::string& path);

struct EntityMention {
  std::string label;
  std::string span_text;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
  friend auto operator<=>(const EntityMention&, const EntityMention&) = default;
};

struct ScnmRecord {
  std::string id;
  std::string sentence;
  std::string sc_label;
  std::vector<EntityMention> entities;

  bool is_negative() const { return entities.empty(); }

  friend bool operator==(const ScnmRecord&, const ScnmRecord&) = default;
};

/// Unvalidated record as it comes off disk. A missing field is nullopt.
struct RawRecord {
  std::optional<std::string> id;
  std::optional<std::string> sentence;
  std::optional<std::string> sc_label;
  std::optional<std::vector<EntityMention>> entities;
};

enum class ViolationKind {
  kMissingField,
  kEmptySentence,
  kMarkCharInSentence,
  kUnknownScLabel,
  kUnknownNerLabel,
  kEmptySpan,
  kSpanNotInSentence,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string field;
  std::string reason;
};

using ValidationResult = std::variant<ScnmRecord, std::vector<Violation>>;

/// Checks every record invariant and reports all of them; never repairs.
ValidationResult validate_record(const RawRecord& raw,
                                 const LabelSchema& schema);

}  // namespace slg
