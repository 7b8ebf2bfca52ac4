#include "doctest.h"
#include "gen.hpp"
#include "oracle.hpp"
#include "pdlkit/io.hpp"
#include "pdlkit/model_search.hpp"
#include "pdlkit/parser.hpp"
#include "pdlkit/soundness.hpp"

using namespace pdl;

namespace {
SoundnessConfig small(std::size_t n) {
  SoundnessConfig c;
  c.instances = n;
  return c;
}

// The stored counterexample really refutes the stored statement.
void refutes(const SoundnessEntry& e) {
  REQUIRE(e.first);
  REQUIRE(e.structure);
  const std::string& text = *e.first;
  const auto vs = text.find("  vs  ");
  if (vs != std::string::npos) {
    const Formula f = parse_formula(text.substr(0, vs));
    const auto j = parse_judgement(text.substr(vs + 6));
    bool f_valid = true;
    bool j_valid = true;
    const std::size_t n = e.structure->size();
    for (World u = 0; u < n; ++u) {
      f_valid = f_valid && pdltest::holds(*e.structure, u, f);
      for (World v = 0; v < n; ++v)
        j_valid = j_valid && pdltest::related(*e.structure, j.left, u, v) == pdltest::related(*e.structure, j.right, u, v);
    }
    CHECK(f_valid != j_valid);
    return;
  }
  const Statement s = parse_statement(text);
  if (const auto* f = std::get_if<Formula>(&s)) {
    CHECK_FALSE(pdltest::holds(*e.structure, e.world, *f));
    return;
  }
  const auto& j = std::get<ProgramJudgement>(s);
  REQUIRE(e.pair);
  const auto [u, v] = *e.pair;
  const bool l = pdltest::related(*e.structure, j.left, u, v);
  const bool r = pdltest::related(*e.structure, j.right, u, v);
  if (j.kind == JudgementKind::Implies)
    CHECK((l && !r));
  else
    CHECK(l != r);
}
}  // namespace

TEST_CASE("schemes and rules have no small countermodels") {
  const auto r = check_calculus(small(40));
  CHECK(r.entries.size() == 27);
  for (const auto& e : r.entries) {
    INFO(e.name << ": " << e.first.value_or(""));
    if (e.name == "C") continue;
    CHECK(e.instances == 40);
    CHECK(e.ok());
  }
  CHECK(r.warnings.empty());
}

TEST_CASE("rule C as stated has countermodels") {
  const auto r = check_calculus(small(60));
  const auto* c = r.find("C");
  REQUIRE(c);
  CHECK(c->counterexamples > 0);
  refutes(*c);

  // p = false with a proper beta1 is still refuted.
  KripkeStructure k({"u", "x", "y1", "y2"}, Vocabulary{{}, {"a", "b", "c"}});
  k.add_edge("a", 0, 2);
  k.add_edge("a", 1, 3);
  k.add_edge("b", 2, 0);
  k.add_edge("b", 3, 0);
  k.add_edge("c", 0, 1);
  const Program b1 = Program::atomic("c");
  const Program b2 = Program::atomic("a");
  const Program b3 = Program::atomic("b");
  const Program left = loop(rule_c_pattern(b1, b2, b3, Formula::falsum()));
  const Program right = loop(rule_c_replacement(b1, b2, b3, Formula::falsum()));
  CHECK(pdltest::related(k, left, 0, 0));
  CHECK_FALSE(pdltest::related(k, right, 0, 0));
}

TEST_CASE("rule C with an empty prefix and p = false has no small countermodels") {
  pdltest::Gen g(14);
  SearchBudget b;
  for (int i = 0; i < 60; ++i) {
    const Program b1 = Program::test(verum());
    const Program b2 = g.program(2);
    const Program b3 = g.program(2);
    const Program pat = rule_c_pattern(b1, b2, b3, Formula::falsum());
    const Program rep = rule_c_replacement(b1, b2, b3, Formula::falsum());
    CHECK(check_program_judgement(loop(pat), loop(rep), JudgementKind::Implies, b).kind == OutcomeKind::ValidUpTo);
  }
}

TEST_CASE("every mutated scheme is caught") {
  SoundnessConfig c = small(200);
  c.stop_at_first = true;
  const auto r = check_schemes(mutated_schemes(), c);
  CHECK(r.entries.size() >= 10);
  for (const auto& e : r.entries) {
    INFO(e.name);
    CHECK(e.counterexamples >= 1);
    refutes(e);
  }
}

TEST_CASE("sweeps are deterministic across worker counts") {
  SoundnessConfig one = small(15);
  SoundnessConfig many = small(15);
  many.jobs = 3;
  CHECK(to_json(check_calculus(one)) == to_json(check_calculus(many)));
  one.seed = 2;
  CHECK(to_json(check_calculus(one)) != to_json(check_calculus(many)));
}

TEST_CASE("empty sweeps pass vacuously with a warning") {
  const auto r = check_schemes(formula_schemes(), small(0));
  CHECK(r.ok());
  CHECK(r.warnings.size() == formula_schemes().size());
  const auto j = to_json(r);
  CHECK(j["ok"] == true);
  CHECK(j["entries"][0]["instances"] == 0);
}
