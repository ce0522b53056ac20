#include <doctest.h>

#include "lexsimp/serializer.hpp"
#include "support.hpp"

using namespace lexsimp;
using namespace lexsimp::testing;

TEST_CASE("trophies source string") {
  SerializationOptions opt;
  opt.include_span_marker = true;
  const auto src = build_eval_source(trophies_instance(), trophies_set().to_token_vector(), trophies_mlm(), opt);
  CHECK(src == kTrophiesSource);

  const auto parsed = parse_source(kTrophiesSource);
  CHECK(parsed.complex_word == "trophies");
  CHECK(parsed.mlm_candidates.size() == 10);
  CHECK(parsed.sentence == trophies_instance().sentence);
  REQUIRE(parsed.span);
  CHECK(parsed.span->first == 8);
  CHECK(parsed.span->second == 8);
  CHECK(parsed.tokens == trophies_set().to_token_vector());
}

TEST_CASE("source variants") {
  SerializationOptions opt;
  const auto inst = trophies_instance();
  CHECK(build_source(inst, TokenVector::defaults(), {}, opt).ends_with("</s> trophies"));
  opt.include_mlm = false;
  CHECK(build_source(inst, TokenVector::defaults(), trophies_mlm(), opt).ends_with("</s> trophies"));

  const auto es = jurisdiccion_es();
  CHECK(build_source(es, TokenVector::defaults(), {}, opt).starts_with("simplify es: "));
  CHECK(build_source(praga_pt(), TokenVector::defaults(), {}, opt).starts_with("simplify pt: "));

  auto cr = TokenVector::defaults();
  cr.cr = {0.5, GridValue::from_hundredths(50)};
  CHECK(build_eval_source(inst, cr, {}, opt).find("<CR_1.00>") != std::string::npos);

  const auto validation = build_eval_source(motive_en(), TokenVector::defaults(), {}, opt);
  CHECK(validation ==
        "simplify en: <CR_1.00> <WL_1.00> <WR_1.00> <WS_1.00> <SS_1.00> The [T] motive [/T] for the "
        "killings was not known. </s> motive");
}

TEST_CASE("computed span marker without a dataset index") {
  auto inst = trophies_instance();
  inst.word_index.reset();
  CHECK(complex_word_span(inst) == std::pair{13, 13});
  inst.sentence = "a (tough task) here";
  inst.complex_word = "tough task";
  CHECK(complex_word_span(inst) == std::pair{1, 2});
}

TEST_CASE("build_source rejects malformed input") {
  SerializationOptions opt;
  auto inst = trophies_instance();
  CHECK_THROWS_AS(build_source(inst, TokenVector::defaults(), {"a", "A"}, opt), DataError);
  CHECK_THROWS_AS(build_source(inst, TokenVector::defaults(), {"two words"}, opt), DataError);
  opt.mlm_top_k = 2;
  CHECK_THROWS_AS(build_source(inst, TokenVector::defaults(), {"a", "b", "c"}, opt), DataError);
  inst.sentence = "has [T] marker trophies";
  CHECK_THROWS_AS(build_source(inst, TokenVector::defaults(), {}, opt), DataError);
  inst.sentence = "no such word";
  CHECK_THROWS_AS(build_source(inst, TokenVector::defaults(), {}, opt), DataError);
}

TEST_CASE("parse_source errors") {
  auto kind_of = [](std::string_view s) {
    try {
      parse_source(s);
    } catch (const SourceParseError& e) {
      return e.kind();
    }
    FAIL("parsed");
    return SourceErrorKind::BadTail;
  };
  CHECK(kind_of("simplify en: <CR_1.00> <WL_1.00> <WR_1.00> <WS_1.00> <SS_1.00> a [T] b [/T] c b") ==
        SourceErrorKind::MissingSeparator);
  CHECK(kind_of("translate en: <CR_1.00> <WL_1.00> <WR_1.00> <WS_1.00> <SS_1.00> a </s> b") ==
        SourceErrorKind::MissingPrefix);
  CHECK(kind_of("simplify en: <CR_1.00> <WL_1.00> <WR_1.00> <WS_1.00> a [T] b [/T] </s> b") ==
        SourceErrorKind::BadTokens);
  CHECK(kind_of("simplify en: <CR_1.00> <WL_1.00> <WR_1.00> <WS_1.00> <SS_1.00> a b </s> b") ==
        SourceErrorKind::MissingMarkers);
  CHECK(kind_of("simplify en: <CR_1.00> <WL_1.00> <WR_1.00> <WS_1.00> <SS_1.00> a [T] b [/T] </s> c") ==
        SourceErrorKind::BadTail);
}

TEST_CASE("training fan-out") {
  const FrequencyLexicon lex(Language::en, {"the", "for", "was", "not", "reason", "aim", "cause",
                                            "object", "motive", "intention", "incentive", "inspiration"});
  const VowelGroupSyllabifier syl;
  const HashEmbedder emb;
  const auto examples = build_training_examples(motive_en(), lex, syl, emb, {}, SerializationOptions{});
  REQUIRE(examples.size() == 8);
  const char* cr[] = {"1.00", "0.75", "0.50", "0.25", "0.10", "0.10", "0.10", "0.10"};
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(examples[i].token_vector.cr.grid.str() == cr[i]);
    CHECK(examples[i].target == motive_en().gold[i].substitute);
    const auto parsed = parse_source(examples[i].source).tokens;
    const auto& tv = examples[i].token_vector;
    CHECK(parsed.cr.grid == tv.cr.grid);
    CHECK(parsed.wl.grid == tv.wl.grid);
    CHECK(parsed.wr.grid == tv.wr.grid);
    CHECK(parsed.ws.grid == tv.ws.grid);
    CHECK(parsed.ss.grid == tv.ss.grid);
  }
  CHECK(examples.front().target == "reason");

  Instance one = motive_en();
  one.gold = {{"reason", 3}};
  const auto single = build_training_examples(one, lex, syl, emb, {}, SerializationOptions{});
  REQUIRE(single.size() == 1);
  CHECK(single[0].token_vector.cr.grid.str() == "1.00");

  Instance nine = motive_en();
  nine.gold.push_back({"purpose", 1});
  CHECK(build_training_examples(nine, lex, syl, emb, {}, SerializationOptions{}).size() == 9);

  CHECK(build_training_examples(jurisdiccion_es(), lex, syl, emb, {}, SerializationOptions{}).size() == 15);
}

TEST_CASE("parse inverts build on fuzzed instances") {
  Rng rng(2024);
  for (std::size_t n = 0; n < 1000; ++n) {
    const auto c = fuzz_case(rng, n);
    const auto src = build_source(c.instance, c.tokens, c.mlm, c.options);
    const auto p = parse_source(src);
    CHECK(p.language == c.instance.language);
    CHECK(p.tokens == c.tokens);
    CHECK(p.sentence == c.instance.sentence);
    CHECK(p.complex_word == c.instance.complex_word);
    CHECK(p.mlm_candidates == (c.options.include_mlm ? c.mlm : std::vector<std::string>{}));
    CHECK(p.span.has_value() == c.options.include_span_marker);
    if (p.span) CHECK(*p.span == complex_word_span(c.instance));
  }
}
