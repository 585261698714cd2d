#include "slg/codec.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "slg/error.hpp"

namespace slg {

namespace {

constexpr std::string_view kSentenceKeyword = "sentence";
constexpr std::string_view kLabelKeyword = "label";
constexpr std::string_view kCategoryKeyword = "category";

std::string sc_menu(const LabelSchema& schema, FormatVariant variant) {
  const bool angle = variant == FormatVariant::kF5;
  const std::string& open = angle ? schema.sc_open : schema.ner_open;
  const std::string& close = angle ? schema.sc_close : schema.ner_close;
  std::string out;
  for (const auto& label : schema.sc_labels) out += open + label + close;
  return out;
}

std::string ner_menu(const LabelSchema& schema) {
  std::string out = schema.ner_prompt;
  for (const auto& label : schema.ner_menu()) {
    out += schema.ner_open + label + schema.ner_close;
  }
  return out;
}

void require_encodable(std::string_view sentence, const LabelSchema& schema) {
  if (sentence.empty()) {
    throw Error(ErrorCode::kInvalidSentence, "sentence is empty");
  }
  if (schema.contains_mark(sentence)) {
    throw Error(ErrorCode::kInvalidSentence,
                "sentence contains a reserved mark character: " +
                    std::string(sentence));
  }
}

struct MarkHit {
  std::size_t position;
  std::size_t mark;  // index into LabelSchema::marks()
};

class Scanner {
 public:
  Scanner(std::string_view text, const LabelSchema& schema)
      : text_(text), marks_(schema.marks()) {}

  std::string_view text() const { return text_; }
  std::string_view rest(std::size_t pos) const { return text_.substr(pos); }

  /// First mark at or after `pos`.
  std::optional<MarkHit> next_mark(std::size_t pos) const {
    for (std::size_t i = pos; i < text_.size(); ++i) {
      for (std::size_t m = 0; m < marks_.size(); ++m) {
        if (text_.substr(i).starts_with(marks_[m])) return MarkHit{i, m};
      }
    }
    return std::nullopt;
  }

 private:
  std::string_view text_;
  std::vector<std::string_view> marks_;
};

constexpr std::size_t kScCloseIndex = 1;
constexpr std::size_t kNerCloseIndex = 3;

// Result of matching a literal against the text at some offset.
enum class LiteralMatch { kMatched, kTruncated, kMismatch };

LiteralMatch match_literal(std::string_view rest, std::string_view literal,
                           std::size_t& mismatch_at) {
  std::size_t n = std::min(rest.size(), literal.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (rest[i] != literal[i]) {
      mismatch_at = i;
      return LiteralMatch::kMismatch;
    }
  }
  mismatch_at = n;
  return rest.size() < literal.size() ? LiteralMatch::kTruncated
                                      : LiteralMatch::kMatched;
}

std::size_t close_index(const LabelSchema& schema, const TargetLayout& layout) {
  return layout.sc_close == schema.sc_close ? kScCloseIndex : kNerCloseIndex;
}

// Parses sc_prefix LABEL sc_close at the start of the text. On success
// stores the label and advances `pos` past the close mark.
std::optional<FormatError> parse_sc(const Scanner& scanner,
                                    const LabelSchema& schema,
                                    const TargetLayout& layout,
                                    std::size_t& pos, std::string& label) {
  const auto text = scanner.text();
  if (text.empty()) return FormatError{FormatErrorKind::kUnexpectedEnd, 0};

  std::size_t mismatch = 0;
  switch (match_literal(text, layout.sc_prefix, mismatch)) {
    case LiteralMatch::kMismatch:
      return FormatError{FormatErrorKind::kMissingOpenMark, mismatch};
    case LiteralMatch::kTruncated:
      return FormatError{FormatErrorKind::kUnexpectedEnd, text.size()};
    case LiteralMatch::kMatched:
      break;
  }
  pos = layout.sc_prefix.size();

  auto hit = scanner.next_mark(pos);
  if (!hit) return FormatError{FormatErrorKind::kUnexpectedEnd, text.size()};
  if (hit->mark != close_index(schema, layout)) {
    return FormatError{FormatErrorKind::kMissingCloseMark, hit->position};
  }
  label = std::string(text.substr(pos, hit->position - pos));
  pos = hit->position + layout.sc_close.size();
  return std::nullopt;
}

}  // namespace

std::optional<FormatVariant> parse_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (auto variant : kAllVariants) {
    if (lower == to_string(variant)) return variant;
  }
  return std::nullopt;
}

std::string_view to_string(FormatVariant variant) {
  switch (variant) {
    case FormatVariant::kF1: return "f1";
    case FormatVariant::kF2: return "f2";
    case FormatVariant::kF3: return "f3";
    case FormatVariant::kF4: return "f4";
    case FormatVariant::kF5: return "f5";
  }
  return "f5";
}

TargetLayout target_layout(const LabelSchema& schema, FormatVariant variant) {
  switch (variant) {
    case FormatVariant::kF1:
      return {schema.ner_open, schema.ner_close, ""};
    case FormatVariant::kF2:
      return {std::string(kLabelKeyword) + schema.ner_open, schema.ner_close,
              schema.ner_prompt};
    case FormatVariant::kF3:
      return {std::string(kCategoryKeyword) + schema.ner_open,
              schema.ner_close, schema.ner_prompt};
    case FormatVariant::kF4:
      return {schema.ner_open, schema.ner_close, schema.ner_prompt};
    case FormatVariant::kF5:
      break;
  }
  return {schema.sc_open, schema.sc_close, schema.ner_prompt};
}

std::string encode_input(std::string_view sentence, const LabelSchema& schema,
                         FormatVariant variant) {
  require_encodable(sentence, schema);
  const std::string s(sentence);
  switch (variant) {
    case FormatVariant::kF1:
      return s;
    case FormatVariant::kF2:
      return std::string(kSentenceKeyword) + schema.ner_open + s;
    case FormatVariant::kF3:
      return s + std::string(kCategoryKeyword) + sc_menu(schema, variant) + s +
             ner_menu(schema);
    case FormatVariant::kF4:
    case FormatVariant::kF5:
      break;
  }
  return s + sc_menu(schema, variant) + s + ner_menu(schema);
}

std::string encode_pairs(const std::vector<EntityMention>& entities,
                         const LabelSchema& schema) {
  if (entities.empty()) {
    return schema.ner_open + schema.none_label + schema.ner_close;
  }
  std::string out;
  for (const auto& entity : entities) {
    out += schema.ner_open + entity.label + schema.ner_close + entity.span_text;
  }
  return out;
}

std::string encode_target(const ScnmRecord& record, const LabelSchema& schema,
                          FormatVariant variant) {
  const TargetLayout layout = target_layout(schema, variant);
  return layout.sc_prefix + record.sc_label + layout.sc_close +
         layout.ner_prefix + encode_pairs(record.entities, schema);
}

std::string_view to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::kMissingOpenMark: return "MissingOpenMark";
    case FormatErrorKind::kMissingCloseMark: return "MissingCloseMark";
    case FormatErrorKind::kMissingNerPrompt: return "MissingNerPrompt";
    case FormatErrorKind::kNoEntityPairs: return "NoEntityPairs";
    case FormatErrorKind::kUnexpectedEnd: return "UnexpectedEnd";
    case FormatErrorKind::kTrailingGarbage: return "TrailingGarbage";
  }
  return "Unknown";
}

ParseResult parse_generated(std::string_view text, const LabelSchema& schema,
                            FormatVariant variant) {
  const TargetLayout layout = target_layout(schema, variant);
  const Scanner scanner(text, schema);

  Parsed parsed;
  std::size_t pos = 0;
  if (auto error = parse_sc(scanner, schema, layout, pos, parsed.sc_label)) {
    return *error;
  }

  if (!layout.ner_prefix.empty()) {
    std::size_t mismatch = 0;
    switch (match_literal(scanner.rest(pos), layout.ner_prefix, mismatch)) {
      case LiteralMatch::kMismatch:
        return FormatError{FormatErrorKind::kMissingNerPrompt, pos};
      case LiteralMatch::kTruncated:
        return FormatError{FormatErrorKind::kUnexpectedEnd, text.size()};
      case LiteralMatch::kMatched:
        break;
    }
    pos += layout.ner_prefix.size();
  }

  if (!scanner.rest(pos).starts_with(schema.ner_open)) {
    return FormatError{FormatErrorKind::kNoEntityPairs, pos};
  }

  while (pos < text.size()) {
    const std::size_t pair_start = pos;
    pos += schema.ner_open.size();
    auto hit = scanner.next_mark(pos);
    if (!hit || hit->mark != kNerCloseIndex) {
      if (!parsed.entities.empty()) {
        parsed.trailing = std::string(text.substr(pair_start));
        break;
      }
      if (!hit) return FormatError{FormatErrorKind::kUnexpectedEnd, text.size()};
      return FormatError{FormatErrorKind::kMissingCloseMark, hit->position};
    }
    EntityMention entity;
    entity.label = std::string(text.substr(pos, hit->position - pos));
    pos = hit->position + schema.ner_close.size();
    std::size_t span_end = text.find(schema.ner_open, pos);
    if (span_end == std::string_view::npos) span_end = text.size();
    entity.span_text = std::string(text.substr(pos, span_end - pos));
    pos = span_end;
    parsed.entities.push_back(std::move(entity));
  }

  if (parsed.entities.size() == 1 &&
      parsed.entities.front().label == schema.none_label &&
      parsed.entities.front().span_text.empty()) {
    parsed.entities.clear();
  }
  return parsed;
}

bool is_format_valid(const ParseResult& result) {
  const auto* parsed = std::get_if<Parsed>(&result);
  return parsed != nullptr && parsed->trailing.empty();
}

std::optional<FormatError> format_error_of(const ParseResult& result,
                                           std::size_t text_size) {
  if (const auto* error = std::get_if<FormatError>(&result)) return *error;
  const auto& parsed = std::get<Parsed>(result);
  if (parsed.trailing.empty()) return std::nullopt;
  return FormatError{FormatErrorKind::kTrailingGarbage,
                     text_size - parsed.trailing.size()};
}

std::optional<std::string> parse_sc_block(std::string_view text,
                                          const LabelSchema& schema,
                                          FormatVariant variant) {
  const TargetLayout layout = target_layout(schema, variant);
  const Scanner scanner(text, schema);
  std::size_t pos = 0;
  std::string label;
  if (parse_sc(scanner, schema, layout, pos, label)) return std::nullopt;
  return label;
}

TaskPairs separate_tasks(const ScnmRecord& record, const LabelSchema& schema,
                         FormatVariant variant) {
  require_encodable(record.sentence, schema);
  const TargetLayout layout = target_layout(schema, variant);
  const std::string& s = record.sentence;

  TaskPairs out;
  switch (variant) {
    case FormatVariant::kF1:
    case FormatVariant::kF2:
      out.sc.input_text = encode_input(s, schema, variant);
      out.ner.input_text = out.sc.input_text;
      break;
    case FormatVariant::kF3:
      out.sc.input_text =
          s + std::string(kCategoryKeyword) + sc_menu(schema, variant);
      out.ner.input_text = s + ner_menu(schema);
      break;
    case FormatVariant::kF4:
    case FormatVariant::kF5:
      out.sc.input_text = s + sc_menu(schema, variant);
      out.ner.input_text = s + ner_menu(schema);
      break;
  }
  out.sc.target_text = layout.sc_prefix + record.sc_label + layout.sc_close;
  out.ner.target_text =
      layout.ner_prefix + encode_pairs(record.entities, schema);
  return out;
}

SeqPair convert_il(const IlPair& pair) {
  if (pair.surface.empty()) {
    throw Error(ErrorCode::kEmptyField, "IL pair has an empty surface");
  }
  if (pair.category.empty()) {
    throw Error(ErrorCode::kEmptyField, "IL pair has an empty category");
  }
  return {pair.surface, pair.category};
}

}  // namespace slg
