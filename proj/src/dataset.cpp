#include "slg/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "slg/error.hpp"

namespace slg {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return in;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::optional<std::string> id_field(const nlohmann::json& obj) {
  if (!obj.contains("id")) return std::nullopt;
  const auto& id = obj.at("id");
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  throw Error(ErrorCode::kIngest, "\"id\" must be a string or an integer");
}

[[noreturn]] void throw_line_errors(ErrorCode code, const std::string& path,
                                    const std::vector<std::string>& errors) {
  std::string message = path + ": " + std::to_string(errors.size()) +
                        " malformed line(s)";
  for (const auto& e : errors) message += "\n  " + e;
  throw Error(code, message);
}

template <typename Row>
std::vector<Row> read_jsonl(const std::string& path, ErrorCode code,
                            auto&& convert) {
  std::ifstream in = open_input(path);
  std::vector<Row> rows;
  std::vector<std::string> errors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw Error(code, "not a JSON object");
      rows.push_back(convert(obj, line_no, line));
    } catch (const nlohmann::json::exception& e) {
      errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!errors.empty()) throw_line_errors(code, path, errors);
  return rows;
}

void bump(std::vector<std::pair<std::string, std::size_t>>& histogram,
          const std::string& label) {
  for (auto& [name, count] : histogram) {
    if (name == label) {
      ++count;
      return;
    }
  }
  histogram.emplace_back(label, 1);
}

// Keeps the schema-ordered head, sorts the unknown tail.
void sort_tail(std::vector<std::pair<std::string, std::size_t>>& histogram,
               std::size_t known) {
  std::sort(histogram.begin() + static_cast<std::ptrdiff_t>(known),
            histogram.end());
}

}  // namespace

RawRecord raw_record_from_json(const nlohmann::json& obj) {
  RawRecord raw;
  raw.id = id_field(obj);
  if (obj.contains("sentence")) raw.sentence = obj.at("sentence");
  if (obj.contains("sc_label")) raw.sc_label = obj.at("sc_label");
  if (obj.contains("entities")) {
    std::vector<EntityMention> entities;
    for (const auto& e : obj.at("entities")) {
      entities.push_back({e.at("label").get<std::string>(),
                          e.at("span").get<std::string>()});
    }
    raw.entities = std::move(entities);
  }
  return raw;
}

nlohmann::ordered_json record_to_json(const ScnmRecord& record) {
  auto entities = nlohmann::ordered_json::array();
  for (const auto& e : record.entities) {
    entities.push_back({{"label", e.label}, {"span", e.span_text}});
  }
  return {{"id", record.id},
          {"sentence", record.sentence},
          {"sc_label", record.sc_label},
          {"entities", std::move(entities)}};
}

std::vector<NumberedRecord> read_records(const std::string& path) {
  return read_jsonl<NumberedRecord>(
      path, ErrorCode::kIngest,
      [](const nlohmann::json& obj, std::size_t line_no,
         const std::string& text) {
        return NumberedRecord{line_no, text, raw_record_from_json(obj)};
      });
}

std::vector<IdText> read_id_texts(const std::string& path) {
  return read_jsonl<IdText>(
      path, ErrorCode::kIngest,
      [](const nlohmann::json& obj, std::size_t, const std::string&) {
        auto id = id_field(obj);
        if (!id) throw Error(ErrorCode::kIngest, "missing \"id\"");
        const char* key = obj.contains("text") ? "text" : "target";
        if (!obj.contains(key)) {
          throw Error(ErrorCode::kIngest, "missing \"text\"");
        }
        return IdText{*id, obj.at(key).get<std::string>()};
      });
}

std::vector<IlPair> read_il_pairs(const std::string& path) {
  return read_jsonl<IlPair>(
      path, ErrorCode::kEmptyField,
      [](const nlohmann::json& obj, std::size_t, const std::string&) {
        IlPair pair;
        if (obj.contains("surface")) pair.surface = obj.at("surface");
        if (obj.contains("category")) pair.category = obj.at("category");
        convert_il(pair);
        return pair;
      });
}

DatasetStats compute_stats(const std::vector<NumberedRecord>& records,
                           const LabelSchema& schema) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "dataset has no records");
  }
  DatasetStats stats;
  for (const auto& l : schema.sc_labels) stats.sc_histogram.emplace_back(l, 0);
  for (const auto& l : schema.ner_labels) {
    stats.ner_histogram.emplace_back(l, 0);
  }

  std::vector<std::string> errors;
  for (const auto& record : records) {
    const RawRecord& raw = record.raw;
    if (!raw.id || !raw.sentence || !raw.sc_label || !raw.entities) {
      errors.push_back("line " + std::to_string(record.line) +
                       ": record lacks one of id, sentence, sc_label, "
                       "entities");
      continue;
    }
    ++stats.sentences;
    if (raw.entities->empty()) {
      ++stats.negative_sentences;
    } else {
      ++stats.positive_sentences;
    }
    stats.entities += raw.entities->size();
    bump(stats.sc_histogram, *raw.sc_label);
    for (const auto& e : *raw.entities) bump(stats.ner_histogram, e.label);
  }
  if (!errors.empty()) throw_line_errors(ErrorCode::kIngest, "dataset", errors);

  sort_tail(stats.sc_histogram, schema.sc_labels.size());
  sort_tail(stats.ner_histogram, schema.ner_labels.size());
  return stats;
}

nlohmann::ordered_json stats_to_json(const DatasetStats& stats) {
  nlohmann::ordered_json sc = nlohmann::ordered_json::object();
  for (const auto& [label, count] : stats.sc_histogram) sc[label] = count;
  nlohmann::ordered_json ner = nlohmann::ordered_json::object();
  for (const auto& [label, count] : stats.ner_histogram) ner[label] = count;
  return {{"sentences", stats.sentences},
          {"positive_sentences", stats.positive_sentences},
          {"negative_sentences", stats.negative_sentences},
          {"entities", stats.entities},
          {"sc_labels", std::move(sc)},
          {"ner_labels", std::move(ner)}};
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + temp.string());
    out << content;
    if (!out.flush()) {
      throw Error(ErrorCode::kIo, "write failed for " + temp.string());
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp);
    throw Error(ErrorCode::kIo,
                "cannot move " + temp.string() + " to " + path + ": " +
                    ec.message());
  }
}

std::string jsonl_row(const nlohmann::ordered_json& obj) {
  return obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) +
         "\n";
}

}  // namespace slg
