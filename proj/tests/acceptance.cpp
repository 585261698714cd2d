// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slg/codec.hpp"
#include "slg/constraint.hpp"
#include "slg/metrics.hpp"
#include "slg/mockgen.hpp"
#include "slg/schema.hpp"
#include "test_support.hpp"

namespace {

using namespace slg;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

int shell(const std::string& command) {
  return std::system((command + " >/dev/null 2>&1").c_str());
}

std::string cli(const std::string& args) {
  return quote(SLG_CLI_PATH) + " " + args;
}

// 1
Outcome round_trip() {
  Outcome o;
  const auto start = Clock::now();
  std::size_t checked = 0, failures = 0;
  std::mt19937_64 rng(1001);
  const LabelSchema schemas[] = {
      default_schema(), load_schema(testing::data_path("schema_ja.json"))};
  for (const auto& schema : schemas) {
    const std::size_t n = &schema == &schemas[0] ? 10000 : 2000;
    for (std::size_t i = 0; i < n; ++i) {
      const ScnmRecord r =
          testing::random_record(rng, schema, testing::wide_alphabet());
      for (auto variant : kAllVariants) {
        ++checked;
        auto parsed = parse_generated(encode_target(r, schema, variant),
                                      schema, variant);
        if (!is_format_valid(parsed) ||
            std::get<Parsed>(parsed).sc_label != r.sc_label ||
            std::get<Parsed>(parsed).entities != r.entities) {
          ++failures;
        }
      }
    }
  }
  const double secs = seconds_since(start);
  o.pass = failures == 0 && secs < 30.0;
  o.detail = std::to_string(checked) + " targets, " + std::to_string(failures) +
             " failures, " + std::to_string(secs) + " s";
  return o;
}

// 2
Outcome fuzz() {
  Outcome o;
  const auto start = Clock::now();
  const LabelSchema schema = default_schema();
  std::mt19937_64 rng(2002);
  std::vector<std::string> pool = {"<", ">", ":", ";", "NER", "None",
                                   "label", "category", "Social", "Person",
                                   "Shinzo Abe", " ", "\xE3\x81\x82",
                                   "\xFF", "\xC3", "\xE3\x81", "\0"};
  for (auto variant : kAllVariants) {
    const std::string t =
        encode_target(testing::example_record(), schema, variant);
    for (std::size_t i = 0; i + 3 <= t.size(); i += 3) pool.push_back(t.substr(i, 3));
  }
  std::size_t strings = 0, problems = 0;
  for (int i = 0; i < 120000; ++i) {
    std::string text;
    const std::size_t len = rng() % 48;
    switch (i % 3) {
      case 0:
        for (std::size_t k = 0; k < len; ++k) text += static_cast<char>(rng() & 0xFF);
        break;
      case 1: {
        std::u32string cps;
        for (std::size_t k = 0; k < len; ++k) {
          cps += static_cast<char32_t>(rng() % 4 == 0 ? rng() % 0x110000
                                                      : 0x20 + rng() % 0x60);
        }
        text = utf8::encode(cps);
        break;
      }
      default:
        for (std::size_t k = 0; k < len / 3; ++k) text += pool[rng() % pool.size()];
        break;
    }
    const FormatVariant variant = kAllVariants[i % 5];
    ++strings;
    try {
      auto result = parse_generated(text, schema, variant);
      if (const auto* err = std::get_if<FormatError>(&result)) {
        if (err->byte_position > text.size()) ++problems;
      }
      (void)parse_sc_block(text, schema, variant);
      (void)format_error_of(result, text.size());
    } catch (...) {
      ++problems;
    }
  }
  const double secs = seconds_since(start);
  o.pass = problems == 0 && secs < 60.0;
  o.detail = std::to_string(strings) + " strings, " + std::to_string(problems) +
             " problems, " + std::to_string(secs) + " s";
  return o;
}

// 3: an independent F5 reader and a direct count of the four accuracies.
struct OracleVerdict {
  bool text, sc, ner, format;
  bool operator==(const OracleVerdict&) const = default;
};

std::string ascii_trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\n\r") - b + 1);
}

struct OracleParse {
  bool valid = false;
  std::string sc;
  std::vector<std::pair<std::string, std::string>> entities;
};

OracleParse oracle_parse(const std::string& text) {
  static const std::regex whole(R"(^<([^<>:;]*)>NER((?::[^<>:;]*;[^:]*)+)$)");
  static const std::regex pair(R"(:([^<>:;]*);([^:]*))");
  OracleParse p;
  std::smatch m;
  if (!std::regex_match(text, m, whole)) return p;
  p.valid = true;
  p.sc = m[1];
  const std::string pairs = m[2];
  for (std::sregex_iterator it(pairs.begin(), pairs.end(), pair), end;
       it != end; ++it) {
    p.entities.emplace_back((*it)[1], (*it)[2]);
  }
  if (p.entities.size() == 1 && p.entities[0].first == "None" &&
      p.entities[0].second.empty()) {
    p.entities.clear();
  }
  return p;
}

OracleVerdict oracle_verdict(const std::string& generated,
                             const std::string& actual, bool unordered) {
  const std::string g = ascii_trim(generated), a = ascii_trim(actual);
  const OracleParse pg = oracle_parse(g), pa = oracle_parse(a);
  OracleVerdict v{};
  v.text = g == a;
  v.format = pg.valid;
  if (pg.valid) {
    v.sc = pg.sc == pa.sc;
  } else {
    static const std::regex sc_block(R"(^<([^<>:;]*)>)");
    std::smatch m;
    v.sc = std::regex_search(g, m, sc_block) && m[1] == pa.sc;
  }
  if (pg.valid) {
    auto x = pg.entities, y = pa.entities;
    if (unordered) {
      std::sort(x.begin(), x.end());
      std::sort(y.begin(), y.end());
    }
    v.ner = x == y;
  }
  return v;
}

Outcome oracle_equivalence() {
  Outcome o;
  const LabelSchema schema = default_schema();
  const std::string gold = "<Social>NER:Person;Shinzo Abe:Location;Japan";
  struct Prototype {
    std::string text;
    OracleVerdict ordered, unordered;
  };
  const std::vector<Prototype> protos = {
      {gold, {1, 1, 1, 1}, {1, 1, 1, 1}},
      {"<Academic>NER:Person;Shinzo Abe:Location;Japan", {0, 0, 1, 1}, {0, 0, 1, 1}},
      {gold + ":", {0, 1, 0, 0}, {0, 1, 0, 0}},
      {"Social>NER:Person;Shinzo Abe:Location;Japan", {0, 0, 0, 0}, {0, 0, 0, 0}},
      {"<Social>NER:Person;Shinzo Abe:Location;Tokyo", {0, 1, 0, 1}, {0, 1, 0, 1}},
      {"<Social>NER:Location;Japan:Person;Shinzo Abe", {0, 1, 0, 1}, {0, 1, 1, 1}},
      {"  " + gold + "\n", {1, 1, 1, 1}, {1, 1, 1, 1}},
  };
  std::size_t frozen_mismatch = 0;
  for (const auto& p : protos) {
    if (!(oracle_verdict(p.text, gold, false) == p.ordered)) ++frozen_mismatch;
    if (!(oracle_verdict(p.text, gold, true) == p.unordered)) ++frozen_mismatch;
  }

  std::size_t sets = 0, mismatches = 0;
  const std::size_t k = protos.size();
  for (bool unordered : {false, true}) {
    ScoreOptions options;
    options.unordered_ner = unordered;
    std::size_t total = 1;
    for (int i = 0; i < 5; ++i) total *= k;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<EvalItem> items;
      std::size_t c[4] = {0, 0, 0, 0};
      std::size_t rest = code;
      for (int i = 0; i < 5; ++i) {
        const auto& p = protos[rest % k];
        rest /= k;
        items.push_back({std::to_string(i), p.text, gold});
        const OracleVerdict v = oracle_verdict(p.text, gold, unordered);
        c[0] += v.text;
        c[1] += v.sc;
        c[2] += v.ner;
        c[3] += v.format;
      }
      const MetricsReport r =
          score_set(items, schema, FormatVariant::kF5, options);
      ++sets;
      const bool same = r.c_text == c[0] && r.c_sc == c[1] &&
                        r.c_ner == c[2] && r.c_format == c[3] &&
                        r.scnm_acc == c[0] / 5.0 && r.sc_acc == c[1] / 5.0 &&
                        r.ner_acc == c[2] / 5.0 && r.format_acc == c[3] / 5.0 &&
                        r.t_text == 5 && r.t_sc == 5 && r.t_ner == 5 &&
                        r.t_format == 5;
      if (!same) ++mismatches;
    }
  }
  o.pass = frozen_mismatch == 0 && mismatches == 0;
  o.detail = std::to_string(sets) + " five-item sets, " +
             std::to_string(mismatches) + " mismatches, " +
             std::to_string(frozen_mismatch) + " frozen-verdict mismatches";
  return o;
}

// 4
Outcome strictness() {
  Outcome o;
  const LabelSchema schema = default_schema();
  std::mt19937_64 rng(4004);
  std::size_t sets = 0, violations = 0;
  for (int plan_no = 0; plan_no < 300; ++plan_no) {
    std::vector<double> weights;
    double sum = 0;
    for (std::size_t i = 0; i < std::size(kAllCorruptions); ++i) {
      weights.push_back(rng() % 4 == 0 ? 0.0 : static_cast<double>(rng() % 100));
      sum += weights.back();
    }
    if (sum == 0) {
      weights[0] = 1;
      sum = 1;
    }
    CorruptionPlan plan;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      plan.fractions.emplace_back(kAllCorruptions[i], weights[i] / sum);
    }
    const FormatVariant variant = kAllVariants[rng() % 5];
    const int level = static_cast<int>(rng() % 3);
    const std::size_t n = 20 + rng() % 30;
    const auto corruptions = assign_corruptions(n, plan, rng());
    std::vector<EvalItem> items;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = testing::random_record(rng, schema, testing::wide_alphabet());
      const std::string gen =
          level == 0 ? generate(r, schema, variant, corruptions[i])
                     : generate_constrained(r, schema, variant, corruptions[i],
                                            static_cast<ConstraintLevel>(level));
      items.push_back({std::to_string(i), gen, encode_target(r, schema, variant)});
    }
    const MetricsReport rep = score_set(items, schema, variant);
    ++sets;
    if (rep.scnm_acc > std::min({rep.sc_acc, rep.ner_acc, rep.format_acc})) {
      ++violations;
    }
    for (const auto& v : rep.per_item) {
      if (v.text_ok && !(v.sc_ok && v.ner_ok && v.format_ok)) ++violations;
    }
  }
  o.pass = violations == 0;
  o.detail = std::to_string(sets) + " random plans, " +
             std::to_string(violations) + " violations";
  return o;
}

// 5
Outcome constraint_effect() {
  Outcome o;
  testing::TempDir tmp("acceptance_cm");
  const std::string data = testing::data_path("synthetic_scnm.jsonl");
  const std::string gold = tmp.file("gold.jsonl");
  const std::string plan =
      tmp.write("plan.json", R"({"None": 0.64, "DropOpenMark": 0.36})");
  if (shell(cli("convert " + quote(data) + " --out " + quote(gold))) != 0) {
    return {false, "convert failed"};
  }
  std::map<int, nlohmann::json> reports;
  for (int level : {0, 1}) {
    const std::string pred = tmp.file("pred" + std::to_string(level) + ".jsonl");
    const std::string report = tmp.file("report" + std::to_string(level) + ".json");
    if (shell(cli("mock " + quote(data) + " --plan " + quote(plan) +
                  " --level " + std::to_string(level) + " --seed 1 --out " +
                  quote(pred))) != 0 ||
        shell(cli("score --pred " + quote(pred) + " --gold " + quote(gold) +
                  " --out " + quote(report))) != 0) {
      return {false, "mock/score failed at level " + std::to_string(level)};
    }
    reports[level] = nlohmann::json::parse(testing::read_file(report));
  }
  bool all_metrics = true;
  for (const auto& [level, doc] : reports) {
    for (const char* key : {"scnm_acc", "sc_acc", "ner_acc", "format_acc"}) {
      all_metrics = all_metrics && doc.contains(key);
    }
  }
  const double f0 = reports[0]["format_acc"];
  const double f1 = reports[1]["format_acc"];
  o.pass = all_metrics && std::abs(f0 - 0.64) <= 0.02 && f1 == 1.0;
  std::ostringstream d;
  d << "format_acc unconstrained " << f0 << ", level 1 " << f1;
  o.detail = d.str();
  return o;
}

// 6
Outcome level2_soundness() {
  Outcome o;
  const LabelSchema schema = default_schema();
  const Vocabulary vocab = testing::toy_vocabulary();
  std::mt19937_64 rng(6006);
  std::size_t invalid = 0, dead_ends = 0, replay_failures = 0, finishes = 0;
  for (int i = 0; i < 1000; ++i) {
    const FormatVariant variant = kAllVariants[i % 5];
    const auto r = testing::random_record(rng, schema, testing::toy_alphabet());

    const auto ids = testing::tokenize(vocab, encode_target(r, schema, variant));
    auto state = init_constraint(ConstraintLevel::kGrammar, vocab, schema, variant);
    bool ok = !ids.empty();
    for (TokenId id : ids) {
      if (!ok || !is_allowed(state, vocab, id)) {
        ok = false;
        break;
      }
      state = advance(state, vocab, id);
    }
    if (!ok || !can_finish(state)) ++replay_failures;

    auto walk = init_constraint(ConstraintLevel::kGrammar, vocab, schema, variant);
    const int steps = 1 + static_cast<int>(rng() % 40);
    for (int s = 0; s < steps; ++s) {
      const auto allowed = allowed_tokens(walk, vocab);
      if (allowed.empty()) {
        ++dead_ends;
        break;
      }
      walk = advance(walk, vocab, allowed[uniform_below(rng, allowed.size())]);
      if (can_finish(walk)) {
        ++finishes;
        if (!testing::valid_in_schema(walk.emitted(), schema, variant)) ++invalid;
      }
    }
    if (!testing::valid_in_schema(walk.emitted() + completion(walk), schema,
                                  variant)) {
      ++invalid;
    }
  }
  o.pass = invalid == 0 && dead_ends == 0 && replay_failures == 0;
  o.detail = "1000 records, " + std::to_string(finishes) +
             " finishable prefixes checked, " + std::to_string(invalid) +
             " invalid, " + std::to_string(dead_ends) + " dead ends, " +
             std::to_string(replay_failures) + " gold replay failures";
  return o;
}

// 7
Outcome dataset_stats() {
  testing::TempDir tmp("acceptance_stats");
  const std::string out = tmp.file("stats.json");
  if (shell(cli("stats " + quote(testing::data_path("synthetic_scnm.jsonl")) +
                " --out " + quote(out))) != 0) {
    return {false, "stats failed"};
  }
  const std::string produced = testing::read_file(out);
  const std::string golden =
      testing::read_file(testing::golden_path("synthetic_stats.json"));
  const auto doc = nlohmann::json::parse(produced);
  const bool counts = doc["sentences"] == 5343 &&
                      doc["positive_sentences"] == 4859 &&
                      doc["negative_sentences"] == 484 &&
                      doc["entities"] == 13185;
  Outcome o;
  o.pass = counts && produced == golden;
  o.detail = std::string("counts ") + (counts ? "match" : "differ") +
             ", report " + (produced == golden ? "byte-identical" : "differs") +
             " to golden";
  return o;
}

// 8
Outcome format_fidelity() {
  const auto doc = nlohmann::json::parse(
      testing::read_file(testing::golden_path("example_formats.json")));
  const LabelSchema schema = default_schema();
  const ScnmRecord r = testing::example_record();
  std::size_t mismatches = 0;
  for (auto variant : kAllVariants) {
    const auto& g = doc["variants"][std::string(to_string(variant))];
    if (encode_input(r.sentence, schema, variant) != g["input"]) ++mismatches;
    if (encode_target(r, schema, variant) != g["target"]) ++mismatches;
  }
  return {mismatches == 0,
          "10 strings, " + std::to_string(mismatches) + " mismatches"};
}

// 9
std::vector<std::string> ids_of(const std::string& path) {
  std::vector<std::string> ids;
  std::istringstream in(testing::read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto row = nlohmann::json::parse(line);
    ids.push_back(row["id"].is_string() ? row["id"].get<std::string>()
                                        : row["id"].dump());
  }
  return ids;
}

Outcome split_arithmetic() {
  testing::TempDir tmp("acceptance_split");
  const std::string data = testing::data_path("synthetic_scnm.jsonl");
  for (const char* dir : {"a", "b"}) {
    if (shell(cli("split " + quote(data) + " --ratio 0.9 --seed 7 --out " +
                  quote(tmp.file(dir)))) != 0) {
      return {false, "split failed"};
    }
  }
  const auto train = ids_of(tmp.file("a/train.jsonl"));
  const auto test = ids_of(tmp.file("a/test.jsonl"));
  auto all = train;
  all.insert(all.end(), test.begin(), test.end());
  std::sort(all.begin(), all.end());
  auto original = ids_of(data);
  std::sort(original.begin(), original.end());
  const bool same_seed =
      testing::read_file(tmp.file("a/train.jsonl")) ==
          testing::read_file(tmp.file("b/train.jsonl")) &&
      testing::read_file(tmp.file("a/test.jsonl")) ==
          testing::read_file(tmp.file("b/test.jsonl"));
  Outcome o;
  o.pass = train.size() == 4808 && test.size() == 535 && all == original &&
           same_seed;
  o.detail = std::to_string(train.size()) + " / " + std::to_string(test.size()) +
             ", ids " + (all == original ? "preserved" : "changed") +
             ", reruns " + (same_seed ? "identical" : "differ");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"round trip over all variants", round_trip},
      {"parser totality fuzz", fuzz},
      {"metric oracle equivalence", oracle_equivalence},
      {"strictness hierarchy", strictness},
      {"constraint effect on format accuracy", constraint_effect},
      {"level-2 constraint soundness", level2_soundness},
      {"dataset statistics", dataset_stats},
      {"format fidelity", format_fidelity},
      {"split arithmetic", split_arithmetic},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": "
              << criteria[i].first << " (" << o.detail << ")" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
