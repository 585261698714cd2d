#include "slg/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slg/error.hpp"
#include "slg/utf8.hpp"

namespace slg {

namespace {

std::size_t multiset_overlap(std::vector<EntityMention> a,
                             std::vector<EntityMention> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<EntityMention> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  return common.size();
}

bool same_entities(const std::vector<EntityMention>& a,
                   const std::vector<EntityMention>& b, bool unordered) {
  if (a.size() != b.size()) return false;
  if (!unordered) return a == b;
  return multiset_overlap(a, b) == a.size();
}

double ratio(std::size_t c, std::size_t t) {
  return t == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(t);
}

}  // namespace

ItemVerdict score_item(const EvalItem& item, const LabelSchema& schema,
                       FormatVariant variant, const ScoreOptions& options) {
  const std::string generated =
      options.normalize ? utf8::normalize(item.generated) : item.generated;
  const std::string actual =
      options.normalize ? utf8::normalize(item.actual) : item.actual;

  const ParseResult gold = parse_generated(actual, schema, variant);
  if (!is_format_valid(gold)) {
    throw Error(ErrorCode::kGoldFormatInvalid,
                "gold text for id \"" + item.id +
                    "\" is not format-valid: " + actual);
  }
  const Parsed& gold_parsed = std::get<Parsed>(gold);

  ItemVerdict verdict;
  verdict.id = item.id;
  verdict.entities_gold = gold_parsed.entities.size();

  const ParseResult result = parse_generated(generated, schema, variant);
  verdict.format_ok = is_format_valid(result);
  verdict.text_ok = generated == actual;

  if (verdict.format_ok) {
    verdict.sc_ok = std::get<Parsed>(result).sc_label == gold_parsed.sc_label;
  } else if (!options.strict_sc_on_format_fail) {
    auto sc = parse_sc_block(generated, schema, variant);
    verdict.sc_ok = sc && *sc == gold_parsed.sc_label;
  }

  if (verdict.format_ok) {
    const auto& predicted = std::get<Parsed>(result).entities;
    verdict.ner_ok =
        same_entities(predicted, gold_parsed.entities, options.unordered_ner);
    verdict.entities_predicted = predicted.size();
    verdict.entities_matched =
        multiset_overlap(predicted, gold_parsed.entities);
  } else if (const auto* partial = std::get_if<Parsed>(&result)) {
    verdict.entities_predicted = partial->entities.size();
    verdict.entities_matched =
        multiset_overlap(partial->entities, gold_parsed.entities);
  }
  return verdict;
}

MetricsReport score_set(std::span<const EvalItem> items,
                        const LabelSchema& schema, FormatVariant variant,
                        const ScoreOptions& options) {
  if (items.empty()) throw Error(ErrorCode::kEmptySet, "no items to score");

  MetricsReport report;
  report.per_item.reserve(items.size());
  for (const auto& item : items) {
    ItemVerdict v = score_item(item, schema, variant, options);
    report.c_text += v.text_ok;
    report.c_sc += v.sc_ok;
    report.c_ner += v.ner_ok;
    report.c_format += v.format_ok;
    report.entities_matched += v.entities_matched;
    report.entities_predicted += v.entities_predicted;
    report.entities_gold += v.entities_gold;
    report.per_item.push_back(std::move(v));
  }
  report.t_text = report.t_sc = report.t_ner = report.t_format = items.size();
  report.scnm_acc = ratio(report.c_text, report.t_text);
  report.sc_acc = ratio(report.c_sc, report.t_sc);
  report.ner_acc = ratio(report.c_ner, report.t_ner);
  report.format_acc = ratio(report.c_format, report.t_format);
  return report;
}

std::vector<EvalItem> join_on_id(std::span<const IdText> predictions,
                                 std::span<const IdText> gold) {
  std::map<std::string, std::size_t> pred_count;
  std::map<std::string, const std::string*> pred_text;
  for (const auto& p : predictions) {
    ++pred_count[p.id];
    pred_text[p.id] = &p.text;
  }
  std::map<std::string, std::size_t> gold_count;
  for (const auto& g : gold) ++gold_count[g.id];

  std::vector<std::string> problems;
  for (const auto& [id, n] : gold_count) {
    if (n > 1) problems.push_back("duplicate gold id \"" + id + "\"");
    if (!pred_count.contains(id)) {
      problems.push_back("missing prediction for id \"" + id + "\"");
    }
  }
  for (const auto& [id, n] : pred_count) {
    if (n > 1) problems.push_back("duplicate prediction id \"" + id + "\"");
    if (!gold_count.contains(id)) {
      problems.push_back("prediction id \"" + id + "\" has no gold entry");
    }
  }
  if (!problems.empty()) {
    std::string message = "predictions and gold do not join on id:";
    for (const auto& p : problems) message += "\n  " + p;
    throw Error(ErrorCode::kIdMismatch, message);
  }

  std::vector<EvalItem> items;
  items.reserve(gold.size());
  for (const auto& g : gold) {
    items.push_back({g.id, *pred_text.at(g.id), g.text});
  }
  return items;
}

nlohmann::ordered_json report_to_json(const MetricsReport& report,
                              const ScoreOptions& options) {
  nlohmann::ordered_json doc;
  doc["items"] = report.t_text;
  doc["scnm_acc"] = report.scnm_acc;
  doc["sc_acc"] = report.sc_acc;
  doc["ner_acc"] = report.ner_acc;
  doc["format_acc"] = report.format_acc;
  doc["counts"] = {{"c_text", report.c_text},     {"t_text", report.t_text},
                   {"c_sc", report.c_sc},         {"t_sc", report.t_sc},
                   {"c_ner", report.c_ner},       {"t_ner", report.t_ner},
                   {"c_format", report.c_format}, {"t_format", report.t_format}};
  doc["options"] = {{"normalize", options.normalize},
                    {"unordered_ner", options.unordered_ner},
                    {"strict_sc_on_format_fail",
                     options.strict_sc_on_format_fail}};

  const double precision =
      ratio(report.entities_matched, report.entities_predicted);
  const double recall = ratio(report.entities_matched, report.entities_gold);
  const double f1 = precision + recall == 0
                        ? 0.0
                        : 2 * precision * recall / (precision + recall);
  doc["informational_entity_micro"] = {
      {"note", "entity-level micro scores; not one of the strict accuracies"},
      {"matched", report.entities_matched},
      {"predicted", report.entities_predicted},
      {"gold", report.entities_gold},
      {"precision", precision},
      {"recall", recall},
      {"f1", f1}};

  auto per_item = nlohmann::ordered_json::array();
  for (const auto& v : report.per_item) {
    per_item.push_back({{"id", v.id},
                        {"text_ok", v.text_ok},
                        {"sc_ok", v.sc_ok},
                        {"ner_ok", v.ner_ok},
                        {"format_ok", v.format_ok}});
  }
  doc["per_item"] = std::move(per_item);
  return doc;
}

std::string report_table(const MetricsReport& report) {
  struct Row {
    const char* name;
    std::size_t correct;
    std::size_t total;
    double accuracy;
  };
  const Row rows[] = {
      {"SCNM accuracy", report.c_text, report.t_text, report.scnm_acc},
      {"SC accuracy", report.c_sc, report.t_sc, report.sc_acc},
      {"NER accuracy", report.c_ner, report.t_ner, report.ner_acc},
      {"Format accuracy", report.c_format, report.t_format, report.format_acc},
  };
  std::ostringstream out;
  out << std::left << std::setw(17) << "metric" << std::right << std::setw(9)
      << "correct" << std::setw(9) << "total" << std::setw(11) << "accuracy"
      << '\n';
  for (const auto& row : rows) {
    out << std::left << std::setw(17) << row.name << std::right
        << std::setw(9) << row.correct << std::setw(9) << row.total
        << std::setw(11) << std::fixed << std::setprecision(2)
        << row.accuracy * 100.0 << '\n';
  }
  return out.str();
}

}  // namespace slg
