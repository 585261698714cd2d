#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "slg/constraint.hpp"
#include "slg/error.hpp"
#include "slg/random.hpp"
#include "test_support.hpp"

namespace slg {
namespace {

Vocabulary small_vocab() { return Vocabulary({"<", "x", "Social", ">", "NER"}); }

std::vector<TokenId> all_ids(const Vocabulary& vocab) {
  std::vector<TokenId> ids(vocab.size());
  for (TokenId i = 0; i < vocab.size(); ++i) ids[i] = i;
  return ids;
}

ConstraintState walk(ConstraintState state, const Vocabulary& vocab,
                     std::string_view text) {
  for (TokenId id : testing::tokenize(vocab, text)) {
    state = advance(state, vocab, id);
  }
  return state;
}

TEST_CASE("vocabulary is a bijection") {
  Vocabulary vocab = small_vocab();
  CHECK(vocab.size() == 5);
  CHECK(vocab.id("<") == 0u);
  CHECK(vocab.text(2) == "Social");
  CHECK(vocab.id("missing") == std::nullopt);
  CHECK_THROWS_AS(Vocabulary({"a", "a"}), Error);
  CHECK_THROWS_AS(Vocabulary({"a", ""}), Error);
}

TEST_CASE("vocabulary files in both formats") {
  testing::TempDir tmp("vocab");
  const auto dir = tmp.path();
  {
    std::ofstream(dir / "v.txt") << "<\nSocial\n>\n";
    std::ofstream(dir / "v.jsonl") << "{\"id\": 1, \"text\": \"Social\"}\n"
                                      "{\"id\": 0, \"text\": \"<\"}\n";
    std::ofstream(dir / "gap.jsonl") << "{\"id\": 1, \"text\": \"a\"}\n";
  }
  Vocabulary plain = Vocabulary::load((dir / "v.txt").string());
  CHECK(plain.size() == 3);
  CHECK(plain.id(">") == 2u);
  Vocabulary jsonl = Vocabulary::load((dir / "v.jsonl").string());
  CHECK(jsonl.size() == 2);
  CHECK(jsonl.text(0) == "<");
  CHECK_THROWS_AS(Vocabulary::load((dir / "gap.jsonl").string()), Error);
}

TEST_CASE("level 1 forces the opening mark at the first step only") {
  Vocabulary vocab = small_vocab();
  auto state = init_constraint(ConstraintLevel::kFirstToken, vocab,
                               default_schema(), FormatVariant::kF5);
  CHECK(state.position() == 1);
  CHECK(allowed_tokens(state, vocab) == std::vector<TokenId>{*vocab.id("<")});
  CHECK_FALSE(can_finish(state));
  CHECK(forced_continuation(state) == "<");

  auto next = advance(state, vocab, *vocab.id("<"));
  CHECK(next.position() == 2);
  CHECK(allowed_tokens(next, vocab) == all_ids(vocab));
  CHECK(can_finish(next));

  CHECK_THROWS_AS(advance(state, vocab, *vocab.id("x")), Error);
  // The old state is untouched.
  CHECK(state.position() == 1);
  CHECK(state.emitted().empty());
}

TEST_CASE("init requires the opening mark as a token") {
  Vocabulary vocab({"x", "Social"});
  try {
    init_constraint(ConstraintLevel::kFirstToken, vocab, default_schema(),
                    FormatVariant::kF5);
    FAIL("expected MarkTokenNotInVocabulary");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMarkTokenNotInVocabulary);
  }
  CHECK_THROWS_AS(init_constraint(ConstraintLevel::kGrammar, vocab,
                                  default_schema(), FormatVariant::kF5),
                  Error);
}

TEST_CASE("level 1 opening token for other variants") {
  Vocabulary vocab({":", "l", "c", "<"});
  const LabelSchema schema = default_schema();
  auto f1 = init_constraint(ConstraintLevel::kFirstToken, vocab, schema,
                            FormatVariant::kF1);
  CHECK(allowed_tokens(f1, vocab) == std::vector<TokenId>{0});
  auto f2 = init_constraint(ConstraintLevel::kFirstToken, vocab, schema,
                            FormatVariant::kF2);
  CHECK(allowed_tokens(f2, vocab) == std::vector<TokenId>{1});
}

TEST_CASE("level 2 starts at the SC opening mark") {
  Vocabulary vocab = testing::toy_vocabulary();
  auto state = init_constraint(ConstraintLevel::kGrammar, vocab,
                               default_schema(), FormatVariant::kF5);
  CHECK(state.position() == 1);
  CHECK(forced_continuation(state) == "<");
  for (TokenId id : allowed_tokens(state, vocab)) {
    CHECK(vocab.text(id).starts_with("<"));
  }
}

TEST_CASE("toy vocabulary has 50 tokens and covers the gold alphabet") {
  Vocabulary vocab = testing::toy_vocabulary();
  CHECK(vocab.size() == 50);
  CHECK_FALSE(testing::tokenize(vocab, "<Social>NER:Person;ab:Location;x y").empty());
}

TEST_CASE("level 2 after the SC block admits only the NER prompt") {
  const LabelSchema schema = default_schema();
  Vocabulary vocab = testing::toy_vocabulary();
  auto state = walk(init_constraint(ConstraintLevel::kGrammar, vocab, schema,
                                    FormatVariant::kF5),
                    vocab, "<Social>");
  const auto allowed = allowed_tokens(state, vocab);

  testing::ViablePrefixOracle oracle(schema, FormatVariant::kF5);
  CHECK(allowed == oracle.allowed("<Social>", vocab));

  std::vector<std::string> texts;
  for (TokenId id : allowed) texts.push_back(vocab.text(id));
  std::sort(texts.begin(), texts.end());
  CHECK(texts == std::vector<std::string>{"N", "NE", "NER", "NER:"});
  CHECK(forced_continuation(state) == "NER:");
}

TEST_CASE("level 2 masks agree with the brute-force oracle along random walks") {
  const LabelSchema schema = default_schema();
  Vocabulary vocab = testing::toy_vocabulary();
  for (auto variant : {FormatVariant::kF5, FormatVariant::kF1,
                       FormatVariant::kF3}) {
    CAPTURE(to_string(variant));
    testing::ViablePrefixOracle oracle(schema, variant);
    std::mt19937_64 rng(99);
    for (int walk_no = 0; walk_no < 6; ++walk_no) {
      auto state = init_constraint(ConstraintLevel::kGrammar, vocab, schema,
                                   variant);
      for (int step = 0; step < 14; ++step) {
        auto allowed = allowed_tokens(state, vocab);
        REQUIRE(allowed == oracle.allowed(state.emitted(), vocab));
        REQUIRE_FALSE(allowed.empty());
        state = advance(state, vocab, allowed[uniform_below(rng, allowed.size())]);
      }
    }
  }
}

TEST_CASE("level 2 replays the example target without a disallowed token") {
  const LabelSchema schema = default_schema();
  const std::string target = "<Social>NER:Person;Shinzo Abe:Location;Japan";
  // Toy vocabulary extended with the example's span characters.
  std::vector<std::string> tokens;
  Vocabulary toy = testing::toy_vocabulary();
  for (TokenId id = 0; id < toy.size(); ++id) tokens.push_back(toy.text(id));
  for (char c : std::string("ShinzoAbeJp")) {
    std::string t(1, c);
    if (!toy.id(t)) tokens.push_back(t);
  }
  Vocabulary vocab(tokens);
  auto ids = testing::tokenize(vocab, target);
  REQUIRE_FALSE(ids.empty());
  auto state = init_constraint(ConstraintLevel::kGrammar, vocab, schema,
                               FormatVariant::kF5);
  for (TokenId id : ids) {
    REQUIRE(is_allowed(state, vocab, id));
    state = advance(state, vocab, id);
  }
  CHECK(can_finish(state));
  CHECK(state.emitted() == target);
}

TEST_CASE("advance is persistent") {
  Vocabulary vocab = testing::toy_vocabulary();
  auto start = init_constraint(ConstraintLevel::kGrammar, vocab,
                               default_schema(), FormatVariant::kF5);
  auto a = advance(start, vocab, *vocab.id("<Social>"));
  auto b = advance(start, vocab, *vocab.id("<"));
  CHECK(start.position() == 1);
  CHECK(a.emitted() == "<Social>");
  CHECK(b.emitted() == "<");
  CHECK(allowed_tokens(start, vocab) == allowed_tokens(start, vocab));
}

TEST_CASE("completion reaches a finishable point") {
  const LabelSchema schema = default_schema();
  Vocabulary vocab = testing::toy_vocabulary();
  auto state = walk(init_constraint(ConstraintLevel::kGrammar, vocab, schema,
                                    FormatVariant::kF5),
                    vocab, "<Soc");
  CHECK(completion(state) == "ial>NER:None;");
  auto in_pair = walk(init_constraint(ConstraintLevel::kGrammar, vocab, schema,
                                      FormatVariant::kF5),
                      vocab, "<Social>NER:Person;ab:Lo");
  CHECK(completion(in_pair) == "cation;");
  auto done = walk(in_pair, vocab, "cation;");
  CHECK(can_finish(done));
  CHECK(completion(done).empty());
}

}  // namespace
}  // namespace slg
