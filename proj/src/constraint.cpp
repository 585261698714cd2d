#include "slg/constraint.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "slg/error.hpp"
#include "slg/utf8.hpp"

namespace slg {

namespace detail {

struct Step {
  enum class Kind { kLiteral, kLabel, kSpan };
  Kind kind = Kind::kLiteral;
  std::u32string literal;
  // Preference order doubles as completion order.
  std::vector<std::u32string> labels;
  char32_t close = 0;
};

struct Grammar {
  std::vector<Step> steps;
  char32_t ner_open = 0;
  std::size_t pair_label_step = 0;
  std::size_t span_step = 0;
};

}  // namespace detail

namespace {

using detail::Grammar;
using detail::GrammarCursor;
using detail::Step;

char32_t single(const std::string& mark) { return utf8::decode(mark).front(); }

std::shared_ptr<const Grammar> compile(const LabelSchema& schema,
                                       FormatVariant variant) {
  const TargetLayout layout = target_layout(schema, variant);
  auto grammar = std::make_shared<Grammar>();
  auto literal = [](std::u32string text) {
    Step step;
    step.kind = Step::Kind::kLiteral;
    step.literal = std::move(text);
    return step;
  };
  auto label = [](const std::vector<std::string>& labels, char32_t close) {
    Step step;
    step.kind = Step::Kind::kLabel;
    for (const auto& l : labels) step.labels.push_back(utf8::decode(l));
    step.close = close;
    return step;
  };

  std::vector<std::string> pair_labels{schema.none_label};
  pair_labels.insert(pair_labels.end(), schema.ner_labels.begin(),
                     schema.ner_labels.end());

  grammar->steps.push_back(literal(utf8::decode(layout.sc_prefix)));
  grammar->steps.push_back(label(schema.sc_labels, single(layout.sc_close)));
  grammar->steps.push_back(
      literal(utf8::decode(layout.ner_prefix + schema.ner_open)));
  grammar->pair_label_step = grammar->steps.size();
  grammar->steps.push_back(label(pair_labels, single(schema.ner_close)));
  grammar->span_step = grammar->steps.size();
  Step span;
  span.kind = Step::Kind::kSpan;
  grammar->steps.push_back(span);
  grammar->ner_open = single(schema.ner_open);
  return grammar;
}

bool has_label(const Step& step, const std::u32string& text) {
  return std::find(step.labels.begin(), step.labels.end(), text) !=
         step.labels.end();
}

bool extends_label(const Step& step, const std::u32string& prefix,
                   char32_t c) {
  for (const auto& l : step.labels) {
    if (l.size() > prefix.size() && l.starts_with(prefix) &&
        l[prefix.size()] == c) {
      return true;
    }
  }
  return false;
}

bool feed(const Grammar& grammar, GrammarCursor& cursor, char32_t c) {
  const Step& step = grammar.steps[cursor.step];
  switch (step.kind) {
    case Step::Kind::kLiteral:
      if (step.literal[cursor.buffer.size()] != c) return false;
      cursor.buffer.push_back(c);
      if (cursor.buffer.size() == step.literal.size()) {
        ++cursor.step;
        cursor.buffer.clear();
      }
      return true;
    case Step::Kind::kLabel:
      if (c == step.close && has_label(step, cursor.buffer)) {
        ++cursor.step;
        cursor.buffer.clear();
        if (cursor.step == grammar.span_step) ++cursor.pairs;
        return true;
      }
      if (!extends_label(step, cursor.buffer, c)) return false;
      cursor.buffer.push_back(c);
      return true;
    case Step::Kind::kSpan:
      if (c == grammar.ner_open) {
        cursor.step = grammar.pair_label_step;
        cursor.buffer.clear();
      }
      return true;
  }
  return false;
}

bool feed_all(const Grammar& grammar, GrammarCursor& cursor,
              std::u32string_view text) {
  for (char32_t c : text) {
    if (!feed(grammar, cursor, c)) return false;
  }
  return true;
}

// Next code points the grammar admits, or nullopt inside a free span.
std::optional<std::vector<char32_t>> options(const Grammar& grammar,
                                             const GrammarCursor& cursor) {
  const Step& step = grammar.steps[cursor.step];
  switch (step.kind) {
    case Step::Kind::kLiteral:
      return std::vector<char32_t>{step.literal[cursor.buffer.size()]};
    case Step::Kind::kLabel: {
      std::vector<char32_t> out;
      if (has_label(step, cursor.buffer)) out.push_back(step.close);
      for (const auto& l : step.labels) {
        if (l.size() > cursor.buffer.size() && l.starts_with(cursor.buffer)) {
          char32_t c = l[cursor.buffer.size()];
          if (std::find(out.begin(), out.end(), c) == out.end()) {
            out.push_back(c);
          }
        }
      }
      return out;
    }
    case Step::Kind::kSpan:
      return std::nullopt;
  }
  return std::nullopt;
}

std::string opening_text(const LabelSchema& schema, FormatVariant variant) {
  const std::string prefix = target_layout(schema, variant).sc_prefix;
  return prefix.substr(0, utf8::first_code_point_length(prefix));
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  decoded_.reserve(tokens_.size());
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) {
      throw Error(ErrorCode::kInvalidVocabulary,
                  "token " + std::to_string(i) + " is empty");
    }
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw Error(ErrorCode::kInvalidVocabulary,
                  "duplicate token text \"" + tokens_[i] + "\" at id " +
                      std::to_string(i));
    }
    decoded_.push_back(utf8::decode(tokens_[i]));
  }
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open vocabulary file " + path);

  std::vector<std::string> tokens;
  std::string line;
  if (std::filesystem::path(path).extension() != ".jsonl") {
    while (std::getline(in, line)) tokens.push_back(line);
    return Vocabulary(std::move(tokens));
  }

  std::vector<std::optional<std::string>> slots;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto obj = nlohmann::json::parse(line);
      auto id = obj.at("id").get<std::size_t>();
      auto text = obj.at("text").get<std::string>();
      if (id >= slots.size()) slots.resize(id + 1);
      if (slots[id]) {
        throw Error(ErrorCode::kInvalidVocabulary,
                    path + ":" + std::to_string(line_no) + ": duplicate id " +
                        std::to_string(id));
      }
      slots[id] = std::move(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidVocabulary,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) {
      throw Error(ErrorCode::kInvalidVocabulary,
                  path + ": ids are not dense, missing " + std::to_string(i));
    }
    tokens.push_back(std::move(*slots[i]));
  }
  return Vocabulary(std::move(tokens));
}

std::optional<TokenId> Vocabulary::id(std::string_view text) const {
  auto it = index_.find(std::string(text));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ConstraintState init_constraint(ConstraintLevel level, const Vocabulary& vocab,
                                const LabelSchema& schema,
                                FormatVariant variant) {
  require_valid(schema);
  const std::string opening = opening_text(schema, variant);
  auto id = vocab.id(opening);
  if (!id) {
    throw Error(ErrorCode::kMarkTokenNotInVocabulary,
                "opening mark \"" + opening +
                    "\" is not a single vocabulary token");
  }
  ConstraintState state;
  state.level_ = level;
  state.opening_token_ = *id;
  state.opening_text_ = opening;
  if (level == ConstraintLevel::kGrammar) {
    state.grammar_ = compile(schema, variant);
  }
  return state;
}

bool is_allowed(const ConstraintState& state, const Vocabulary& vocab,
                TokenId id) {
  if (id >= vocab.size()) return false;
  if (state.level_ == ConstraintLevel::kFirstToken) {
    return state.position_ > 1 || id == state.opening_token_;
  }
  GrammarCursor cursor = state.cursor_;
  return feed_all(*state.grammar_, cursor, vocab.code_points(id));
}

std::vector<TokenId> allowed_tokens(const ConstraintState& state,
                                    const Vocabulary& vocab) {
  std::vector<TokenId> out;
  if (state.level_ == ConstraintLevel::kFirstToken && state.position_ == 1) {
    out.push_back(state.opening_token_);
    return out;
  }
  for (TokenId id = 0; id < vocab.size(); ++id) {
    if (is_allowed(state, vocab, id)) out.push_back(id);
  }
  return out;
}

ConstraintState advance(const ConstraintState& state, const Vocabulary& vocab,
                        TokenId id) {
  if (!is_allowed(state, vocab, id)) {
    std::string what = id < vocab.size() ? "\"" + vocab.text(id) + "\""
                                         : "id " + std::to_string(id);
    throw Error(ErrorCode::kDisallowedToken,
                "token " + what + " is not allowed at position " +
                    std::to_string(state.position_));
  }
  ConstraintState next = state;
  if (next.level_ == ConstraintLevel::kGrammar) {
    feed_all(*next.grammar_, next.cursor_, vocab.code_points(id));
  }
  next.emitted_ += vocab.text(id);
  ++next.position_;
  return next;
}

bool can_finish(const ConstraintState& state) {
  if (state.level_ == ConstraintLevel::kFirstToken) return state.position_ > 1;
  return state.cursor_.step == state.grammar_->span_step;
}

std::string forced_continuation(const ConstraintState& state) {
  if (state.level_ == ConstraintLevel::kFirstToken) {
    return state.position_ == 1 ? state.opening_text_ : std::string();
  }
  const Grammar& grammar = *state.grammar_;
  GrammarCursor cursor = state.cursor_;
  std::u32string out;
  for (;;) {
    auto next = options(grammar, cursor);
    if (!next || next->size() != 1) break;
    out.push_back(next->front());
    feed(grammar, cursor, next->front());
  }
  return utf8::encode(out);
}

std::string completion(const ConstraintState& state) {
  if (state.level_ == ConstraintLevel::kFirstToken) {
    return forced_continuation(state);
  }
  const Grammar& grammar = *state.grammar_;
  GrammarCursor cursor = state.cursor_;
  std::u32string out;
  while (cursor.step != grammar.span_step) {
    const Step& step = grammar.steps[cursor.step];
    std::u32string piece;
    if (step.kind == Step::Kind::kLiteral) {
      piece = step.literal.substr(cursor.buffer.size());
    } else {
      for (const auto& l : step.labels) {
        if (l.starts_with(cursor.buffer)) {
          piece = l.substr(cursor.buffer.size());
          break;
        }
      }
      piece.push_back(step.close);
    }
    feed_all(grammar, cursor, piece);
    out += piece;
  }
  return utf8::encode(out);
}

}  // namespace slg
