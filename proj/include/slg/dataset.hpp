#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "slg/codec.hpp"
#include "slg/metrics.hpp"
#include "slg/schema.hpp"

namespace slg {

/// One dataset line: {"id", "sentence", "sc_label",
/// "entities": [{"label", "span"}, ...]}. `line` is 1-based.
struct NumberedRecord {
  std::size_t line = 0;
  std::string text;
  RawRecord raw;
};

/// Reads a JSON Lines dataset. Blank lines are skipped. Lines that are not
/// JSON objects or carry fields of the wrong type throw Error(kIngest)
/// listing every offending line; missing fields are left empty for
/// validate_record to report.
std::vector<NumberedRecord> read_records(const std::string& path);

RawRecord raw_record_from_json(const nlohmann::json& obj);
nlohmann::ordered_json record_to_json(const ScnmRecord& record);

/// {"id", "text"} lines. `target` is accepted in place of `text` so a
/// converted corpus can serve as gold.
std::vector<IdText> read_id_texts(const std::string& path);

/// {"surface", "category"} lines; empty or missing fields throw
/// Error(kEmptyField) listing every offending line.
std::vector<IlPair> read_il_pairs(const std::string& path);

struct DatasetStats {
  std::size_t sentences = 0;
  std::size_t positive_sentences = 0;
  std::size_t negative_sentences = 0;
  std::size_t entities = 0;
  // Schema labels first in declaration order, then unknown labels sorted.
  std::vector<std::pair<std::string, std::size_t>> sc_histogram;
  std::vector<std::pair<std::string, std::size_t>> ner_histogram;
};

/// Throws Error(kEmptyDataset) for no records and Error(kIngest) when a
/// record lacks a field.
DatasetStats compute_stats(const std::vector<NumberedRecord>& records,
                           const LabelSchema& schema);
nlohmann::ordered_json stats_to_json(const DatasetStats& stats);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

/// Serializes one JSON Lines row (compact, UTF-8, trailing newline).
std::string jsonl_row(const nlohmann::ordered_json& obj);

}  // namespace slg
