#include "slg/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "slg/error.hpp"
#include "slg/utf8.hpp"

namespace slg {

namespace {

// Literal keywords of the F1-F4 grammars; marks may not occur in them.
constexpr std::string_view kKeywords[] = {"sentence", "label", "category"};

bool contains(const std::vector<std::string>& labels, std::string_view label) {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

void check_label_list(const LabelSchema& schema,
                      const std::vector<std::string>& labels,
                      std::string_view name, std::vector<std::string>& out) {
  if (labels.empty()) {
    out.push_back(std::string(name) + " is empty");
    return;
  }
  std::set<std::string_view> seen;
  for (const auto& label : labels) {
    if (label.empty()) {
      out.push_back(std::string(name) + " contains an empty label");
      continue;
    }
    if (!seen.insert(label).second) {
      out.push_back(std::string(name) + " contains duplicate label \"" +
                    label + "\"");
    }
    if (schema.contains_mark(label)) {
      out.push_back(std::string(name) + " label \"" + label +
                    "\" contains a mark character");
    }
  }
}

}  // namespace

std::vector<std::string_view> LabelSchema::marks() const {
  return {sc_open, sc_close, ner_open, ner_close};
}

bool LabelSchema::contains_mark(std::string_view text) const {
  for (auto mark : marks()) {
    if (!mark.empty() && text.find(mark) != std::string_view::npos) return true;
  }
  return false;
}

std::vector<std::string> LabelSchema::ner_menu() const {
  std::vector<std::string> menu = ner_labels;
  menu.push_back(none_label);
  return menu;
}

bool LabelSchema::is_sc_label(std::string_view label) const {
  return contains(sc_labels, label);
}

bool LabelSchema::is_ner_label(std::string_view label) const {
  return contains(ner_labels, label);
}

LabelSchema default_schema() {
  LabelSchema schema;
  schema.sc_labels = {"Social", "LiteratureArt", "Academic", "Technical",
                      "Natural"};
  schema.ner_labels = {"Person",   "Company",        "PoliticalOrg",
                       "OtherOrg", "Location",       "PublicFacility",
                       "Product",  "Event"};
  return schema;
}

std::vector<std::string> check_schema(const LabelSchema& schema) {
  std::vector<std::string> out;

  const std::pair<std::string_view, const std::string*> named_marks[] = {
      {"sc_open", &schema.sc_open},
      {"sc_close", &schema.sc_close},
      {"ner_open", &schema.ner_open},
      {"ner_close", &schema.ner_close},
  };
  bool marks_ok = true;
  for (const auto& [name, mark] : named_marks) {
    if (utf8::count_code_points(*mark) != 1) {
      out.push_back(std::string(name) + " must be a single character");
      marks_ok = false;
    }
  }
  if (marks_ok) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) {
        if (*named_marks[i].second == *named_marks[j].second) {
          out.push_back(std::string(named_marks[i].first) + " and " +
                        std::string(named_marks[j].first) +
                        " must be distinct");
        }
      }
    }
  }
  if (!marks_ok) return out;

  check_label_list(schema, schema.sc_labels, "sc_labels", out);
  check_label_list(schema, schema.ner_labels, "ner_labels", out);

  if (schema.none_label.empty()) {
    out.push_back("none_label is empty");
  } else if (schema.contains_mark(schema.none_label)) {
    out.push_back("none_label contains a mark character");
  }
  if (schema.is_ner_label(schema.none_label)) {
    out.push_back("none_label \"" + schema.none_label +
                  "\" must not be one of ner_labels");
  }
  if (schema.ner_prompt.empty()) {
    out.push_back("ner_prompt is empty");
  } else if (schema.contains_mark(schema.ner_prompt)) {
    out.push_back("ner_prompt contains a mark character");
  }
  for (auto keyword : kKeywords) {
    if (schema.contains_mark(keyword)) {
      out.push_back("a mark character occurs in the format keyword \"" +
                    std::string(keyword) + "\"");
    }
  }
  return out;
}

void require_valid(const LabelSchema& schema) {
  auto problems = check_schema(schema);
  if (problems.empty()) return;
  std::string message = "invalid label schema:";
  for (const auto& p : problems) message += "\n  " + p;
  throw Error(ErrorCode::kInvalidSchema, message);
}

LabelSchema schema_from_json(const nlohmann::json& doc) {
  LabelSchema schema = default_schema();
  try {
    if (!doc.is_object()) {
      throw Error(ErrorCode::kInvalidSchema, "schema must be a JSON object");
    }
    if (doc.contains("sc_labels")) {
      schema.sc_labels = doc.at("sc_labels").get<std::vector<std::string>>();
    }
    if (doc.contains("ner_labels")) {
      schema.ner_labels = doc.at("ner_labels").get<std::vector<std::string>>();
    }
    if (doc.contains("none_label")) {
      schema.none_label = doc.at("none_label").get<std::string>();
    }
    if (doc.contains("ner_prompt")) {
      schema.ner_prompt = doc.at("ner_prompt").get<std::string>();
    }
    if (doc.contains("marks")) {
      const auto& marks = doc.at("marks");
      if (marks.contains("sc_open")) schema.sc_open = marks.at("sc_open");
      if (marks.contains("sc_close")) schema.sc_close = marks.at("sc_close");
      if (marks.contains("ner_open")) schema.ner_open = marks.at("ner_open");
      if (marks.contains("ner_close")) schema.ner_close = marks.at("ner_close");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidSchema,
                std::string("malformed schema document: ") + e.what());
  }
  require_valid(schema);
  return schema;
}

nlohmann::ordered_json schema_to_json(const LabelSchema& schema) {
  nlohmann::ordered_json marks = {{"sc_open", schema.sc_open},
                                  {"sc_close", schema.sc_close},
                                  {"ner_open", schema.ner_open},
                                  {"ner_close", schema.ner_close}};
  nlohmann::ordered_json doc = {{"sc_labels", schema.sc_labels},
                                {"ner_labels", schema.ner_labels},
                                {"none_label", schema.none_label},
                                {"marks", marks},
                                {"ner_prompt", schema.ner_prompt}};
  return doc;
}

LabelSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open schema file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidSchema,
                path + ": " + std::string(e.what()));
  }
  return schema_from_json(doc);
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kMissingField: return "MissingField";
    case ViolationKind::kEmptySentence: return "EmptySentence";
    case ViolationKind::kMarkCharInSentence: return "MarkCharInSentence";
    case ViolationKind::kUnknownScLabel: return "UnknownScLabel";
    case ViolationKind::kUnknownNerLabel: return "UnknownNerLabel";
    case ViolationKind::kEmptySpan: return "EmptySpan";
    case ViolationKind::kSpanNotInSentence: return "SpanNotInSentence";
  }
  return "Unknown";
}

ValidationResult validate_record(const RawRecord& raw,
                                 const LabelSchema& schema) {
  std::vector<Violation> violations;
  auto missing = [&](std::string_view field) {
    violations.push_back({ViolationKind::kMissingField, std::string(field),
                          "field is missing"});
  };
  if (!raw.id) missing("id");
  if (!raw.sentence) missing("sentence");
  if (!raw.sc_label) missing("sc_label");
  if (!raw.entities) missing("entities");
  if (!violations.empty()) return violations;

  const std::string& sentence = *raw.sentence;
  if (sentence.empty()) {
    violations.push_back(
        {ViolationKind::kEmptySentence, "sentence", "sentence is empty"});
  }
  if (schema.contains_mark(sentence)) {
    violations.push_back({ViolationKind::kMarkCharInSentence, "sentence",
                          "sentence contains a reserved mark character"});
  }
  if (!schema.is_sc_label(*raw.sc_label)) {
    violations.push_back({ViolationKind::kUnknownScLabel, "sc_label",
                          "\"" + *raw.sc_label + "\" is not an SC label"});
  }
  const auto& entities = *raw.entities;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const auto& entity = entities[i];
    std::string field = "entities[" + std::to_string(i) + "]";
    if (!schema.is_ner_label(entity.label)) {
      violations.push_back({ViolationKind::kUnknownNerLabel, field + ".label",
                            "\"" + entity.label + "\" is not an NER label"});
    }
    if (entity.span_text.empty()) {
      violations.push_back(
          {ViolationKind::kEmptySpan, field + ".span", "span is empty"});
    } else if (sentence.find(entity.span_text) == std::string::npos) {
      violations.push_back({ViolationKind::kSpanNotInSentence, field + ".span",
                            "\"" + entity.span_text +
                                "\" does not occur in the sentence"});
    }
  }
  if (!violations.empty()) return violations;

  return ScnmRecord{*raw.id, sentence, *raw.sc_label, entities};
}

}  // namespace slg
