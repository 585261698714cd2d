#include "slg/mockgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "slg/error.hpp"
#include "slg/random.hpp"
#include "slg/utf8.hpp"

namespace slg {

namespace {

constexpr std::string_view kSentinel = "extra_id_0";
constexpr std::size_t kMaxTokenBytes = 64;

// Remove a single code point of `text` at the front or back.
std::string drop_code_point(const std::string& text, bool front) {
  std::u32string cps = utf8::decode(text);
  if (front) {
    cps.erase(cps.begin());
  } else {
    cps.pop_back();
  }
  return utf8::encode(cps);
}

std::string corrupt_span(const std::string& span, std::mt19937_64& rng) {
  if (utf8::count_code_points(span) >= 2) {
    return drop_code_point(span, rng() % 2 == 0);
  }
  return span + span;
}

std::string other_ner_label(const LabelSchema& schema,
                            const std::string& current, std::mt19937_64& rng) {
  std::vector<std::string> choices;
  for (const auto& l : schema.ner_labels) {
    if (l != current) choices.push_back(l);
  }
  if (choices.empty()) return schema.none_label;
  return choices[rng() % choices.size()];
}

// Entity list rendered verbatim, without collapsing to the None pair.
std::string render_pairs(const std::vector<EntityMention>& entities,
                         const LabelSchema& schema) {
  std::string out;
  for (const auto& e : entities) {
    out += schema.ner_open + e.label + schema.ner_close + e.span_text;
  }
  return out;
}

std::optional<TokenId> longest_allowed_prefix(const ConstraintState& state,
                                              const Vocabulary& vocab,
                                              std::string_view text,
                                              std::size_t& length) {
  for (std::size_t n = std::min(text.size(), kMaxTokenBytes); n > 0; --n) {
    auto id = vocab.id(text.substr(0, n));
    if (id && is_allowed(state, vocab, *id)) {
      length = n;
      return id;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kNone: return "None";
    case CorruptionKind::kWrongScLabel: return "WrongScLabel";
    case CorruptionKind::kWrongNerLabel: return "WrongNerLabel";
    case CorruptionKind::kWrongSpan: return "WrongSpan";
    case CorruptionKind::kMissingEntity: return "MissingEntity";
    case CorruptionKind::kDuplicateTail: return "DuplicateTail";
    case CorruptionKind::kDropOpenMark: return "DropOpenMark";
    case CorruptionKind::kExtraneousText: return "ExtraneousText";
  }
  return "None";
}

std::optional<CorruptionKind> parse_corruption_kind(std::string_view name) {
  for (auto kind : kAllCorruptions) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

std::string extraneous_marker(const LabelSchema& schema) {
  return schema.ner_open + std::string(kSentinel);
}

std::string generate(const ScnmRecord& record, const LabelSchema& schema,
                     FormatVariant variant, const Corruption& corruption) {
  std::mt19937_64 rng(corruption.rng_seed);
  const TargetLayout layout = target_layout(schema, variant);
  std::string sc_label = record.sc_label;

  // Negative records carry the None pair explicitly so label and span
  // corruptions have something to act on.
  std::vector<EntityMention> pairs = record.entities;
  if (pairs.empty()) pairs.push_back({schema.none_label, ""});

  switch (corruption.kind) {
    case CorruptionKind::kNone:
      return encode_target(record, schema, variant);
    case CorruptionKind::kWrongScLabel: {
      const auto& labels = schema.sc_labels;
      auto it = std::find(labels.begin(), labels.end(), sc_label);
      std::size_t index = it == labels.end() ? 0 : it - labels.begin() + 1;
      sc_label = labels[index % labels.size()];
      break;
    }
    case CorruptionKind::kWrongNerLabel:
      pairs.front().label = other_ner_label(schema, pairs.front().label, rng);
      break;
    case CorruptionKind::kWrongSpan:
      if (record.is_negative()) {
        pairs.front().span_text = record.sentence.substr(
            0, utf8::first_code_point_length(record.sentence));
      } else {
        pairs.front().span_text = corrupt_span(pairs.front().span_text, rng);
      }
      break;
    case CorruptionKind::kMissingEntity:
      if (!record.is_negative()) {
        pairs.pop_back();
        if (pairs.empty()) pairs.push_back({schema.none_label, ""});
      }
      break;
    case CorruptionKind::kDuplicateTail:
      pairs.push_back(pairs.back());
      break;
    case CorruptionKind::kDropOpenMark:
    case CorruptionKind::kExtraneousText:
      break;
  }

  std::string text = layout.sc_prefix + sc_label + layout.sc_close +
                     layout.ner_prefix + render_pairs(pairs, schema);

  if (corruption.kind == CorruptionKind::kDropOpenMark) {
    // The mark that opens the SC block is the last code point of the prefix.
    std::u32string prefix = utf8::decode(layout.sc_prefix);
    std::size_t mark_bytes = utf8::encode(prefix.substr(prefix.size() - 1)).size();
    text.erase(layout.sc_prefix.size() - mark_bytes, mark_bytes);
  } else if (corruption.kind == CorruptionKind::kExtraneousText) {
    text += extraneous_marker(schema);
  }
  return text;
}

Vocabulary character_vocabulary(std::string_view text,
                                const LabelSchema& schema) {
  std::set<char32_t> cps;
  auto add = [&](std::string_view s) {
    for (char32_t c : utf8::decode(s)) cps.insert(c);
  };
  add(text);
  for (const auto& l : schema.sc_labels) add(l);
  for (const auto& l : schema.ner_labels) add(l);
  add(schema.none_label);
  add(schema.ner_prompt);
  for (auto mark : schema.marks()) add(mark);
  for (auto variant : kAllVariants) {
    add(target_layout(schema, variant).sc_prefix);
  }

  std::vector<std::string> tokens;
  tokens.reserve(cps.size());
  for (char32_t c : cps) tokens.push_back(utf8::encode(std::u32string(1, c)));
  return Vocabulary(std::move(tokens));
}

std::string generate_constrained(const ScnmRecord& record,
                                 const LabelSchema& schema,
                                 FormatVariant variant,
                                 const Corruption& corruption,
                                 ConstraintLevel level,
                                 const Vocabulary* vocab) {
  const std::string plan = generate(record, schema, variant, corruption);
  std::optional<Vocabulary> own_vocab;
  if (vocab == nullptr) {
    own_vocab.emplace(character_vocabulary(plan, schema));
    vocab = &*own_vocab;
  }

  ConstraintState state = init_constraint(level, *vocab, schema, variant);
  std::optional<ConstraintState> last_finishable;
  if (can_finish(state)) last_finishable = state;

  std::string_view rest = plan;
  const std::size_t max_steps = 4 * plan.size() + 64;
  for (std::size_t step = 0; !rest.empty() && step < max_steps; ++step) {
    std::size_t length = 0;
    if (auto id = longest_allowed_prefix(state, *vocab, rest, length)) {
      state = advance(state, *vocab, *id);
      rest.remove_prefix(length);
    } else {
      const std::string forced = forced_continuation(state);
      if (auto forced_id =
              longest_allowed_prefix(state, *vocab, forced, length)) {
        state = advance(state, *vocab, *forced_id);
      } else {
        rest.remove_prefix(utf8::first_code_point_length(rest));
      }
    }
    if (can_finish(state)) last_finishable = state;
  }

  if (can_finish(state)) return state.emitted();
  if (last_finishable) return last_finishable->emitted();

  // Never reached a finishable point: complete along the grammar.
  std::string tail = completion(state);
  std::string_view pending = tail;
  while (!pending.empty()) {
    std::size_t length = 0;
    auto id = longest_allowed_prefix(state, *vocab, pending, length);
    if (!id) return state.emitted() + std::string(pending);
    state = advance(state, *vocab, *id);
    pending.remove_prefix(length);
  }
  return state.emitted();
}

CorruptionPlan plan_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.empty()) {
    throw Error(ErrorCode::kInvalidPlan,
                "corruption plan must be a non-empty JSON object");
  }
  CorruptionPlan plan;
  double total = 0;
  for (const auto& [name, value] : doc.items()) {
    auto kind = parse_corruption_kind(name);
    if (!kind) {
      throw Error(ErrorCode::kInvalidPlan,
                  "unknown corruption kind \"" + name + "\"");
    }
    if (!value.is_number()) {
      throw Error(ErrorCode::kInvalidPlan,
                  "fraction for " + name + " is not a number");
    }
    double fraction = value.get<double>();
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
      throw Error(ErrorCode::kInvalidPlan,
                  "fraction for " + name + " must lie in [0, 1]");
    }
    total += fraction;
    plan.fractions.emplace_back(*kind, fraction);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidPlan,
                "corruption plan fractions sum to " + std::to_string(total) +
                    ", not 1");
  }
  // Canonical kind order so the assignment does not depend on key order.
  std::sort(plan.fractions.begin(), plan.fractions.end());
  return plan;
}

std::vector<Corruption> assign_corruptions(std::size_t n,
                                           const CorruptionPlan& plan,
                                           std::uint64_t seed) {
  struct Quota {
    CorruptionKind kind;
    std::size_t count;
    double remainder;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (const auto& [kind, fraction] : plan.fractions) {
    // Rounded first so exact products like 0.36 * 1000 are not floored
    // to 359 by binary representation error.
    double exact = fraction * static_cast<double>(n);
    double whole = std::floor(exact + 1e-9);
    quotas.push_back({kind, static_cast<std::size_t>(whole),
                      std::max(0.0, exact - whole)});
    assigned += quotas.back().count;
  }
  std::vector<std::size_t> order(quotas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return quotas[a].remainder > quotas[b].remainder;
  });
  for (std::size_t i = 0; assigned < n && !order.empty(); ++i) {
    ++quotas[order[i % order.size()]].count;
    ++assigned;
  }

  std::vector<CorruptionKind> kinds;
  kinds.reserve(n);
  for (const auto& q : quotas) kinds.insert(kinds.end(), q.count, q.kind);
  kinds.resize(n, CorruptionKind::kNone);

  std::mt19937_64 rng(seed);
  portable_shuffle(std::span<CorruptionKind>(kinds), rng);

  std::vector<Corruption> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({kinds[i], splitmix64(seed ^ splitmix64(i))});
  }
  return out;
}

}  // namespace slg
