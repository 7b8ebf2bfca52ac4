#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "oracle.hpp"
#include "pdlkit/normal_form.hpp"
#include "pdlkit/parser.hpp"

using namespace pdl;

namespace {
Formula F(const char* s) { return parse_formula(s); }
Program P(const char* s) { return parse_program(s); }

bool same_everywhere(const KripkeStructure& k, const Formula& a, const Formula& b) {
  for (World u = 0; u < k.size(); ++u)
    if (pdltest::holds(k, u, a) != pdltest::holds(k, u, b)) return false;
  return true;
}

bool same_relation(const KripkeStructure& k, const Program& a, const Program& b) {
  for (World u = 0; u < k.size(); ++u)
    for (World v = 0; v < k.size(); ++v)
      if (pdltest::related(k, a, u, v) != pdltest::related(k, b, u, v)) return false;
  return true;
}

const Vocabulary kVocab{{"p", "q"}, {"a", "b"}};
}  // namespace

TEST_CASE("classify") {
  CHECK(classify(P("a")) == ProgramClass::Forw);
  CHECK(classify(P("p?")) == ProgramClass::Cyc);
  CHECK(classify(P("a + b")) == ProgramClass::Neither);
  CHECK(classify(P("a & b")) == ProgramClass::Forw);
  CHECK(classify(P("a & p?")) == ProgramClass::Cyc);
  CHECK(classify(P("p? & a")) == ProgramClass::Neither);
  CHECK(classify(P("a ; b")) == ProgramClass::Neither);
  CHECK(classify(P("a ; true? ; b")) == ProgramClass::Forw);
  CHECK(classify(Program::seq(P("a"), Program::seq(P("p?"), P("b")))) == ProgramClass::Forw);
  CHECK(classify(P("a ; p? ; b ; q? ; (a & b)")) == ProgramClass::Forw);
  CHECK(classify(P("a ; p?")) == ProgramClass::Neither);
  CHECK(classify(P("(a ; (b & p?) ; b) & a")) == ProgramClass::Forw);
  CHECK(classify(P("a^")) == ProgramClass::Cyc);
  CHECK(classify(P("(a;q?;b)^")) == ProgramClass::Cyc);
  CHECK(classify(P("(a;b)^")) == ProgramClass::Neither);
}

TEST_CASE("cyc_to_test") {
  CHECK(cyc_to_test(P("p?")) == F("p"));
  CHECK(cyc_to_test(P("a & p?")) == F("<a^>true & p"));
  CHECK(cyc_to_test(P("(a & b) & p?")) == F("<(a&b)^>true & p"));
  CHECK_THROWS_AS(cyc_to_test(P("a")), std::invalid_argument);

  pdltest::for_each_structure(2, kVocab, [](const KripkeStructure& k) {
    for (const char* s : {"a & p?", "(a & b) & p?", "(a;q?;b) & p?"}) {
      Program c = P(s);
      CHECK(same_relation(k, c, Program::test(cyc_to_test(c))));
    }
  });
}

TEST_CASE("normalize: examples") {
  auto [f1, t1] = normalize(F("<p?>q"));
  CHECK(f1 == F("p & q"));
  REQUIRE(t1.steps.size() == 1);
  CHECK(t1.steps[0].axioms == std::vector<std::string>{"?"});

  auto [f2, t2] = normalize(F("<a + b>p"));
  CHECK(f2 == F("<a>p | <b>p"));
  REQUIRE(t2.steps.size() == 1);
  CHECK(t2.steps[0].axioms == std::vector<std::string>{"D"});

  auto [f3, t3] = normalize(F("<a;(b + c)>p"));
  CHECK(f3 == F("<a;true?;b>p | <a;true?;c>p"));
  REQUIRE(t3.steps.size() >= 1);
  CHECK(t3.steps[0].axioms == std::vector<std::string>{"D4", "D"});

  CHECK(normalize(F("<a>p")).first == F("<a>p"));
  CHECK(normalize(F("<a>p")).second.steps.empty());
  CHECK(normalize(F("<a & p?>q")).first == F("(p & <a^>true) & q"));
  CHECK(normalize(F("<a^>true")).first == F("<a^>true"));
  CHECK(normalize(F("<p?;a;q?>r")).first == F("p & <a>(q & r)"));
  CHECK(normalize(F("<(a;p?) & b>q")).first == F("<a & b>(p & q)"));
}

TEST_CASE("normalize_program_in_context: examples") {
  CHECK(normalize_program_in_context(P("(a;p?) & b")).first == P("(a & b);p?"));
  CHECK(normalize_program_in_context(P("a;b")).first == P("a;true?;b"));
  CHECK(normalize_program_in_context(P("a;p?;q?;b")).first == P("a;(p & q)?;b"));
  CHECK(normalize_program_in_context(P("(p?;a) & b")).first == P("p?;(a & b)"));
  CHECK(normalize_program_in_context(P("a;(b + c)")).first == P("(a;true?;b) + (a;true?;c)"));

  pdltest::Gen g(11);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 300; ++i) {
    Program a = g.program(3);
    auto [b, trace] = normalize_program_in_context(a);
    CHECK(std::get<Program>(replay(a, trace)) == b);
    for (int s = 0; s < 20; ++s) {
      auto k = pdltest::random_structure(rng, 3, kVocab);
      REQUIRE(same_relation(k, a, b));
    }
  }
}

TEST_CASE("normalize: properties on random formulas") {
  pdltest::Gen g(2024);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    Formula f = g.formula(4);
    auto [n, trace] = normalize(f);
    INFO(render(f));
    REQUIRE(in_normal_form(n));
    REQUIRE(normalize(n).first == n);
    REQUIRE(std::get<Formula>(replay(f, trace)) == n);
    for (int s = 0; s < 10; ++s) {
      auto k = pdltest::random_structure(rng, 3, kVocab);
      REQUIRE(same_everywhere(k, f, n));
    }
  }
}

TEST_CASE("normalize: exhaustive on two-world structures") {
  pdltest::Gen g(99);
  std::vector<std::pair<Formula, Formula>> pairs;
  for (int i = 0; i < 60; ++i) {
    Formula f = g.formula(3);
    pairs.emplace_back(f, normalize(f).first);
  }
  pdltest::for_each_structure(2, kVocab, [&](const KripkeStructure& k) {
    for (const auto& [f, n] : pairs) REQUIRE(same_everywhere(k, f, n));
  });
}

TEST_CASE("normalize: totality at depth 6") {
  pdltest::Gen g(5);
  for (int i = 0; i < 500; ++i) CHECK(in_normal_form(normalize(g.formula(6)).first));
}

TEST_CASE("replay rejects a mismatched step") {
  auto [n, trace] = normalize(F("<p?>q"));
  CHECK_THROWS_AS(replay(F("<q?>p"), trace), std::logic_error);
}
