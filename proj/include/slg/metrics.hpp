#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "slg/codec.hpp"
#include "slg/schema.hpp"

namespace slg {

struct EvalItem {
  std::string id;
  std::string generated;
  std::string actual;
};

struct ScoreOptions {
  // NFC + outer trim before comparing and parsing. Off = bit-exact mode.
  bool normalize = true;
  // Compare entity lists as multisets instead of sequences.
  bool unordered_ner = false;
  // sc_ok is false whenever the generated text is format-invalid, instead
  // of comparing a leading well-formed SC block.
  bool strict_sc_on_format_fail = false;
};

struct ItemVerdict {
  std::string id;
  bool text_ok = false;
  bool sc_ok = false;
  bool ner_ok = false;
  bool format_ok = false;

  // Entity-level counts for the informational micro score.
  std::size_t entities_matched = 0;
  std::size_t entities_predicted = 0;
  std::size_t entities_gold = 0;
};

struct MetricsReport {
  std::size_t c_text = 0, t_text = 0;
  std::size_t c_sc = 0, t_sc = 0;
  std::size_t c_ner = 0, t_ner = 0;
  std::size_t c_format = 0, t_format = 0;
  double scnm_acc = 0, sc_acc = 0, ner_acc = 0, format_acc = 0;

  // Not part of the strict accuracies: micro precision/recall over
  // (label, span) pairs.
  std::size_t entities_matched = 0;
  std::size_t entities_predicted = 0;
  std::size_t entities_gold = 0;

  std::vector<ItemVerdict> per_item;
};

/// Throws Error(kGoldFormatInvalid) if the actual text does not parse
/// format-valid.
ItemVerdict score_item(const EvalItem& item, const LabelSchema& schema,
                       FormatVariant variant, const ScoreOptions& options = {});

/// Throws Error(kEmptySet) on an empty list.
MetricsReport score_set(std::span<const EvalItem> items,
                        const LabelSchema& schema, FormatVariant variant,
                        const ScoreOptions& options = {});

struct IdText {
  std::string id;
  std::string text;
};

/// Pairs predictions with gold texts by id, in gold order. Missing or
/// duplicate ids on either side throw Error(kIdMismatch) naming every
/// offender.
std::vector<EvalItem> join_on_id(std::span<const IdText> predictions,
                                 std::span<const IdText> gold);

nlohmann::ordered_json report_to_json(const MetricsReport& report,
                              const ScoreOptions& options);

/// Aligned plain-text table of the four accuracies.
std::string report_table(const MetricsReport& report);

}  // namespace slg
