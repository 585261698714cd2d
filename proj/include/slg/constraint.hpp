#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slg/codec.hpp"
#include "slg/schema.hpp"

namespace slg {

using TokenId = std::uint32_t;

/// Dense, bijective token id <-> text mapping. Token texts are non-empty
/// and unique.
class Vocabulary {
 public:
  explicit Vocabulary(std::vector<std::string> tokens);

  /// `.jsonl` files hold {"id": n, "text": "..."} objects; anything else is
  /// read as one token per line with id = zero-based line number.
  static Vocabulary load(const std::string& path);

  std::size_t size() const { return tokens_.size(); }
  const std::string& text(TokenId id) const { return tokens_.at(id); }
  const std::u32string& code_points(TokenId id) const {
    return decoded_.at(id);
  }
  std::optional<TokenId> id(std::string_view text) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::u32string> decoded_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Level 1 forces the first token to the target's opening mark and leaves
/// later steps free. Level 2 masks every step against the full target
/// grammar with labels restricted to the schema.
enum class ConstraintLevel { kFirstToken = 1, kGrammar = 2 };

namespace detail {

struct Grammar;

// Position inside the level-2 grammar. `step` indexes Grammar::steps;
// `buffer` holds the matched part of the current literal or label.
struct GrammarCursor {
  std::size_t step = 0;
  std::u32string buffer;
  std::size_t pairs = 0;

  friend bool operator==(const GrammarCursor&, const GrammarCursor&) = default;
};

}  // namespace detail

/// Immutable decoding state. advance() returns a new state; older states
/// stay valid.
class ConstraintState {
 public:
  ConstraintLevel level() const { return level_; }

  /// 1-based index of the step about to be decoded.
  std::size_t position() const { return position_; }

  /// Text emitted so far.
  const std::string& emitted() const { return emitted_; }

 private:
  friend ConstraintState init_constraint(ConstraintLevel, const Vocabulary&,
                                         const LabelSchema&, FormatVariant);
  friend std::vector<TokenId> allowed_tokens(const ConstraintState&,
                                             const Vocabulary&);
  friend bool is_allowed(const ConstraintState&, const Vocabulary&, TokenId);
  friend ConstraintState advance(const ConstraintState&, const Vocabulary&,
                                 TokenId);
  friend bool can_finish(const ConstraintState&);
  friend std::string forced_continuation(const ConstraintState&);
  friend std::string completion(const ConstraintState&);

  ConstraintLevel level_ = ConstraintLevel::kFirstToken;
  std::size_t position_ = 1;
  TokenId opening_token_ = 0;
  std::string opening_text_;
  std::string emitted_;
  std::shared_ptr<const detail::Grammar> grammar_;
  detail::GrammarCursor cursor_;
};

/// Throws Error(kMarkTokenNotInVocabulary) when the target's opening mark
/// (sc_open for F5) is not a single vocabulary token.
ConstraintState init_constraint(ConstraintLevel level, const Vocabulary& vocab,
                                const LabelSchema& schema,
                                FormatVariant variant);

/// Ids allowed at the current step, ascending.
std::vector<TokenId> allowed_tokens(const ConstraintState& state,
                                    const Vocabulary& vocab);

bool is_allowed(const ConstraintState& state, const Vocabulary& vocab,
                TokenId id);

/// Throws Error(kDisallowedToken) if `id` is not allowed.
ConstraintState advance(const ConstraintState& state, const Vocabulary& vocab,
                        TokenId id);

/// True when stopping here leaves an acceptable output.
bool can_finish(const ConstraintState& state);

/// The text the constraint admits as the only way forward from here, up to
/// the next point with more than one option. Empty when unconstrained.
std::string forced_continuation(const ConstraintState& state);

/// Shortest text that brings the state to a finishable point, preferring
/// the first matching label (none_label first inside entity pairs).
std::string completion(const ConstraintState& state);

}  // namespace slg
