#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "rubric/inference.hpp"
#include "rubric/sampler.hpp"
#include "test_util.hpp"

using namespace rubric;

TEST_CASE("heuristic bounds") {
  const RubricGrammar toy = parse_rubric(kToyRubric);
  const HeuristicTable h = build_heuristic(toy);
  CHECK(h.bound(*toy.find_nonterminal("A")) == std::log(0.9));
  CHECK(h.bound(*toy.find_nonterminal("S")) == doctest::Approx(2 * std::log(0.9)).epsilon(1e-15));

  const RubricGrammar certain = parse_rubric("S -> A B : 1.0\nA -> \"a\" : 1.0\nB -> \"b c\" : 1.0\n");
  const HeuristicTable hc = build_heuristic(certain);
  for (double b : hc.bounds()) CHECK(b == 0.0);

  const RubricGrammar p8 = load_rubric(rubric_path("p8.rubric"));
  const HeuristicTable h8 = build_heuristic(p8);
  for (double b : h8.bounds()) CHECK(b <= 0.0);
  for (const auto& c : oracle::all_derivations(p8, 100'000)) {
    CHECK(h8.bound(p8.start()) >= c.logprob);
  }
}

TEST_CASE("toy parse of a a") {
  const RubricGrammar g = parse_rubric(kToyRubric);
  const auto r = viterbi_parse(g, Program::from_tokens({"a", "a"}));
  REQUIRE(r);
  CHECK(r->logprob == std::log(0.9) + std::log(0.9));
  CHECK(r->derivation.rule_sequence() == std::vector<int>{0, 1, 1});
  CHECK(r->mask.spans.empty());
}

TEST_CASE("out of support") {
  const RubricGrammar g = parse_rubric(kToyRubric);
  CHECK_FALSE(viterbi_parse(g, Program::from_tokens({"a"})));
  CHECK_FALSE(viterbi_parse(g, Program::from_tokens({"a", "a", "a"})));
  CHECK_FALSE(viterbi_parse(g, Program::from_tokens({"a", "c"})));
  CHECK_FALSE(predict_labels_grammar(g, tokenize("( Program ( WhenRun ) )")));
  CHECK_FALSE(highlight(load_rubric(rubric_path("p1.rubric")), tokenize(kSingleMove + std::string(" ( x )"))));
}

TEST_CASE("ambiguous grammar picks the higher-probability labels") {
  const RubricGrammar g = parse_rubric(kAmbiguousRubric);
  const auto best = oracle::argmax_by_program(oracle::all_derivations(g, 1000));
  // "a a": S->X"a" (0.3*0.5), S->"a"Y (0.3*0.5), S->XY (0.4*0.5*0.5) ties at 0.15 / 0.15 / 0.1.
  const auto r = viterbi_parse(g, Program::from_tokens({"a", "a"}));
  REQUIRE(r);
  const auto& want = best.at("a a");
  CHECK(r->derivation.rule_sequence() == want.rules);
  CHECK(r->logprob == want.logprob);
  // The tie goes to the smaller rule sequence, which is the x-labeled one.
  CHECK(r->labels.positive(0));
  CHECK_FALSE(r->labels.positive(1));
}

TEST_CASE("viterbi equals brute force on small grammars") {
  for (const std::string& text :
       {std::string(kToyRubric), std::string(kAmbiguousRubric),
        read_rubric_text(rubric_path("p8.rubric"))}) {
    const RubricGrammar g = parse_rubric(text);
    const ViterbiParser parser(g);
    const auto best = oracle::argmax_by_program(oracle::all_derivations(g, 100'000));
    for (const auto& [program, cand] : best) {
      const auto r = parser.parse(Program::from_tokens(cand.tokens));
      REQUIRE(r);
      CHECK(r->logprob == cand.logprob);
      CHECK(r->derivation.rule_sequence() == cand.rules);
    }
  }
}

TEST_CASE("round trip on unambiguous rubrics") {
  for (const char* path : {"p1.rubric", "p8.rubric"}) {
    const RubricGrammar g = load_rubric(rubric_path(path));
    const ViterbiParser parser(g);
    Rng rng(8);
    for (int i = 0; i < 2000; ++i) {
      const SynExample e = sample(g, rng);
      const auto r = parser.parse(e.program);
      REQUIRE(r);
      CHECK(r->derivation == e.derivation);
      CHECK(r->labels == e.labels);
      CHECK(r->mask == e.mask);
      CHECK(r->logprob == e.logprob);
    }
  }
}

TEST_CASE("a star never expands more than exhaustive search and stays admissible") {
  const RubricGrammar g = load_rubric(rubric_path("p1.rubric"));
  const ViterbiParser parser(g);
  Rng rng(4);
  for (int i = 0; i < 300; ++i) {
    const SynExample e = sample(g, rng);
    ParseStats astar, full;
    const auto a = parser.parse(e.program, {SearchMode::kAStar, true}, &astar);
    const auto b = parser.parse(e.program, {SearchMode::kExhaustive, false}, &full);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->logprob == b->logprob);
    CHECK(a->derivation == b->derivation);
    CHECK(astar.expanded <= full.expanded);
    CHECK(astar.admissibility_violations == 0);
  }
}

TEST_CASE("wrong-angle span covers the turn block") {
  const RubricGrammar g = load_rubric(rubric_path("p1.rubric"));
  const std::string src =
      "( Program ( WhenRun ) ( Repeat ( Value ( Number ( 3 ) ) ) ( Body ( Move ( Forward ) "
      "( Value ( Number ( 50 ) ) ) ) ( Turn ( Left ) ( Value ( Number ( 90 ) ) ) ) ) ) )";
  const Program p = tokenize(src);
  const auto mask = highlight(g, p);
  REQUIRE(mask);
  const int wrong = *g.schema().find("wrong angle");
  int found = 0;
  for (const auto& s : mask->spans) {
    if (s.label != wrong) continue;
    ++found;
    std::vector<std::string> toks;
    for (std::size_t k = s.token_start; k < s.token_end; ++k) toks.push_back(p[k].text);
    CHECK(oracle::join(toks) == "( Turn ( Left ) ( Value ( Number ( 90 ) ) ) )");
  }
  CHECK(found == 1);
  CHECK(annotate(g, p, *mask).find("[wrong angle: ( Turn ( Left ) ( Value ( Number ( 90 ) ) ) ) ]") !=
        std::string::npos);
}

TEST_CASE("unlabeled derivation gives an empty mask") {
  const RubricGrammar g = parse_rubric(
      "%label \"l\" : other\nS -> A : 0.5\nS -> B : 0.5 @label(\"l\")\n"
      "A -> \"a\" : 1.0\nB -> \"b\" : 1.0\n");
  const auto mask = highlight(g, Program::from_tokens({"a"}));
  REQUIRE(mask);
  CHECK(mask->spans.empty());
  const auto labeled = highlight(g, Program::from_tokens({"b"}));
  REQUIRE(labeled);
  CHECK(labeled->spans.size() == 1);
}

TEST_CASE("grammar prediction equals stored labels") {
  const RubricGrammar g = load_rubric(rubric_path("p8.rubric"));
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const SynExample e = sample(g, rng);
    const auto y = predict_labels_grammar(g, e.program);
    REQUIRE(y);
    CHECK(*y == e.labels);
  }
}
