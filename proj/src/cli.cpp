#include "slg/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slg/codec.hpp"
#include "slg/constraint.hpp"
#include "slg/dataset.hpp"
#include "slg/error.hpp"
#include "slg/metrics.hpp"
#include "slg/mockgen.hpp"
#include "slg/schema.hpp"
#include "slg/split.hpp"

namespace slg {

namespace {

// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string schema_path;
  std::string variant = "f5";
  std::optional<std::uint64_t> seed;
  std::string out;
};

LabelSchema schema_of(const CommonOptions& opts) {
  return opts.schema_path.empty() ? default_schema()
                                  : load_schema(opts.schema_path);
}

FormatVariant variant_of(const CommonOptions& opts) {
  auto variant = parse_variant(opts.variant);
  if (!variant) throw UsageError("unknown variant " + opts.variant);
  return *variant;
}

void add_schema_options(CLI::App& cmd, CommonOptions& opts) {
  cmd.add_option("--schema", opts.schema_path, "Label schema JSON file")
      ->check(CLI::ExistingFile);
  cmd.add_option("--variant", opts.variant, "Format variant f1..f5")
      ->check(CLI::IsMember({"f1", "f2", "f3", "f4", "f5"}, CLI::ignore_case))
      ->capture_default_str();
}

// Validates every record, reporting all failures to `err`. Returns nullopt
// if any record failed.
std::optional<std::vector<ScnmRecord>> validated_records(
    const std::vector<NumberedRecord>& rows, const LabelSchema& schema,
    std::ostream& err) {
  std::vector<ScnmRecord> records;
  records.reserve(rows.size());
  std::size_t failures = 0;
  for (const auto& row : rows) {
    auto result = validate_record(row.raw, schema);
    if (auto* record = std::get_if<ScnmRecord>(&result)) {
      records.push_back(std::move(*record));
      continue;
    }
    ++failures;
    const std::string id = row.raw.id.value_or("?");
    for (const auto& v : std::get<std::vector<Violation>>(result)) {
      err << "line " << row.line << " (id " << id << "): " << to_string(v.kind)
          << " " << v.field << ": " << v.reason << '\n';
    }
  }
  if (failures > 0) {
    err << failures << " of " << rows.size() << " record(s) failed validation\n";
    return std::nullopt;
  }
  return records;
}

int cmd_stats(const std::string& dataset, const CommonOptions& opts,
              std::ostream& out) {
  const LabelSchema schema = schema_of(opts);
  auto stats = compute_stats(read_records(dataset), schema);
  const std::string doc = stats_to_json(stats).dump(2) + "\n";
  if (opts.out.empty()) {
    out << doc;
  } else {
    write_file_atomic(opts.out, doc);
  }
  return kExitOk;
}

int cmd_split(const std::string& dataset, const std::string& ratio,
              const CommonOptions& opts, std::ostream& out) {
  SplitSpec spec;
  spec.train_ratio = parse_ratio(ratio);
  spec.seed = opts.seed;
  const auto rows = read_records(dataset);
  if (rows.size() < 2) {
    throw Error(ErrorCode::kEmptyDataset,
                "split needs at least 2 records, found " +
                    std::to_string(rows.size()));
  }
  const SplitIndices parts = split_indices(rows.size(), spec);
  auto render = [&](const std::vector<std::size_t>& indices) {
    std::string text;
    for (auto i : indices) text += rows[i].text + "\n";
    return text;
  };
  const std::filesystem::path dir(opts.out);
  write_file_atomic((dir / "train.jsonl").string(), render(parts.train));
  write_file_atomic((dir / "test.jsonl").string(), render(parts.test));
  out << "train " << parts.train.size() << "\ntest " << parts.test.size()
      << '\n';
  return kExitOk;
}

int cmd_convert(const std::string& dataset, const std::string& mode,
                const CommonOptions& opts, std::ostream& err) {
  const LabelSchema schema = schema_of(opts);
  const FormatVariant variant = variant_of(opts);
  auto records = validated_records(read_records(dataset), schema, err);
  if (!records) return kExitInvalidInput;

  std::string text;
  for (const auto& record : *records) {
    SeqPair pair;
    if (mode == "scnm") {
      pair = {encode_input(record.sentence, schema, variant),
              encode_target(record, schema, variant)};
    } else {
      TaskPairs split = separate_tasks(record, schema, variant);
      pair = mode == "sc-only" ? split.sc : split.ner;
    }
    text += jsonl_row({{"id", record.id},
                       {"input", pair.input_text},
                       {"target", pair.target_text}});
  }
  write_file_atomic(opts.out, text);
  return kExitOk;
}

struct ScoreArgs {
  std::string pred;
  std::string gold;
  std::string table;
  ScoreOptions options;
  bool no_normalize = false;
};

int cmd_score(ScoreArgs args, const CommonOptions& opts, std::ostream& out) {
  const LabelSchema schema = schema_of(opts);
  const FormatVariant variant = variant_of(opts);
  args.options.normalize = !args.no_normalize;
  const auto predictions = read_id_texts(args.pred);
  const auto gold = read_id_texts(args.gold);
  const auto items = join_on_id(predictions, gold);
  const MetricsReport report = score_set(items, schema, variant, args.options);

  const std::string table = report_table(report);
  out << table;
  if (!opts.out.empty()) {
    write_file_atomic(opts.out,
                      report_to_json(report, args.options).dump(2) + "\n");
  }
  if (!args.table.empty()) write_file_atomic(args.table, table);
  return kExitOk;
}

nlohmann::json read_plan(const std::string& plan) {
  try {
    if (!plan.empty() && plan.front() == '{') return nlohmann::json::parse(plan);
    std::ifstream in(plan);
    if (!in) throw Error(ErrorCode::kIo, "cannot open plan file " + plan);
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidPlan,
                "corruption plan is not valid JSON: " + std::string(e.what()));
  }
}

struct MockArgs {
  std::string plan;
  int level = 0;
  std::string vocab;
};

int cmd_mock(const std::string& dataset, const MockArgs& args,
             const CommonOptions& opts, std::ostream& err) {
  const LabelSchema schema = schema_of(opts);
  const FormatVariant variant = variant_of(opts);
  const CorruptionPlan plan = plan_from_json(read_plan(args.plan));
  if (!args.vocab.empty() && args.level == 0) {
    throw UsageError("--vocab needs --level 1 or 2");
  }
  auto records = validated_records(read_records(dataset), schema, err);
  if (!records) return kExitInvalidInput;

  std::optional<Vocabulary> vocab;
  if (!args.vocab.empty()) vocab.emplace(Vocabulary::load(args.vocab));

  const auto corruptions =
      assign_corruptions(records->size(), plan, opts.seed.value_or(0));
  std::string text;
  for (std::size_t i = 0; i < records->size(); ++i) {
    const ScnmRecord& record = (*records)[i];
    std::string generated =
        args.level == 0
            ? generate(record, schema, variant, corruptions[i])
            : generate_constrained(record, schema, variant, corruptions[i],
                                   static_cast<ConstraintLevel>(args.level),
                                   vocab ? &*vocab : nullptr);
    text += jsonl_row({{"id", record.id}, {"text", generated}});
  }
  write_file_atomic(opts.out, text);
  return kExitOk;
}

int cmd_il_convert(const std::string& input, const CommonOptions& opts) {
  const auto pairs = read_il_pairs(input);
  std::string text;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    SeqPair pair = convert_il(pairs[i]);
    text += jsonl_row({{"id", std::to_string(i + 1)},
                       {"input", pair.input_text},
                       {"target", pair.target_text}});
  }
  write_file_atomic(opts.out, text);
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kRatioOutOfRange:
      return kExitUsage;
    default:
      return kExitInvalidInput;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Sentence-to-label toolkit: format conversion, constrained "
               "mock generation and strict SC+NER scoring",
               "slg"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string dataset;

  auto* stats = app.add_subcommand("stats", "Count sentences, entities and labels");
  stats->add_option("dataset", dataset, "Record JSON Lines file")
      ->required()
      ->check(CLI::ExistingFile);
  add_schema_options(*stats, opts);
  stats->add_option("--out", opts.out, "Write the JSON report here");

  std::string ratio = "0.9";
  auto* split = app.add_subcommand("split", "Shuffle and split into train/test");
  split->add_option("dataset", dataset, "Record JSON Lines file")
      ->required()
      ->check(CLI::ExistingFile);
  split->add_option("--ratio", ratio, "Train share: 0.9, 9/10 or 9:1")
      ->capture_default_str();
  split->add_option("--seed", opts.seed, "Shuffle seed (default: random)");
  split->add_option("--out", opts.out, "Output directory")->required();

  std::string mode = "scnm";
  auto* convert = app.add_subcommand("convert", "Render records as input/target pairs");
  convert->add_option("dataset", dataset, "Record JSON Lines file")
      ->required()
      ->check(CLI::ExistingFile);
  add_schema_options(*convert, opts);
  convert->add_option("--mode", mode, "scnm, sc-only or ner-only")
      ->check(CLI::IsMember({"scnm", "sc-only", "ner-only"}))
      ->capture_default_str();
  convert->add_option("--out", opts.out, "Output JSON Lines file")->required();

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score predictions against gold");
  score->add_option("--pred", score_args.pred, "Predictions {id, text}")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--gold", score_args.gold, "Gold {id, text} or {id, target}")
      ->required()
      ->check(CLI::ExistingFile);
  add_schema_options(*score, opts);
  score->add_flag("--unordered-ner", score_args.options.unordered_ner,
                  "Compare entity lists as multisets");
  score->add_flag("--strict-sc-on-format-fail",
                  score_args.options.strict_sc_on_format_fail,
                  "Count SC wrong whenever the format is wrong");
  score->add_flag("--no-normalize", score_args.no_normalize,
                  "Compare raw bytes (no NFC, no trimming)");
  score->add_option("--out", opts.out, "Write the JSON report here");
  score->add_option("--table", score_args.table, "Write the text table here");

  MockArgs mock_args;
  auto* mock = app.add_subcommand("mock", "Generate mock predictions");
  mock->add_option("dataset", dataset, "Gold record JSON Lines file")
      ->required()
      ->check(CLI::ExistingFile);
  add_schema_options(*mock, opts);
  mock->add_option("--plan", mock_args.plan,
                   "Corruption plan: JSON file or inline JSON object")
      ->required();
  mock->add_option("--level", mock_args.level,
                   "Constraint level: 0 off, 1 first token, 2 full grammar")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  mock->add_option("--vocab", mock_args.vocab,
                   "Token vocabulary (.jsonl {id,text} or one token per line)")
      ->check(CLI::ExistingFile);
  mock->add_option("--seed", opts.seed, "Assignment seed (default 0)");
  mock->add_option("--out", opts.out, "Output JSON Lines file")->required();

  auto* il = app.add_subcommand("il-convert",
                                "Convert {surface, category} pairs to input/target");
  il->add_option("input", dataset, "IL JSON Lines file")
      ->required()
      ->check(CLI::ExistingFile);
  il->add_option("--out", opts.out, "Output JSON Lines file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (stats->parsed()) return cmd_stats(dataset, opts, out);
    if (split->parsed()) return cmd_split(dataset, ratio, opts, out);
    if (convert->parsed()) return cmd_convert(dataset, mode, opts, err);
    if (score->parsed()) return cmd_score(score_args, opts, out);
    if (mock->parsed()) return cmd_mock(dataset, mock_args, opts, err);
    if (il->parsed()) return cmd_il_convert(dataset, opts);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return kExitUsage;
}

}  // namespace slg
