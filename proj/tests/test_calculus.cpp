#include <fstream>
#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "oracle.hpp"
#include "pdlkit/calculus.hpp"
#include "pdlkit/parser.hpp"
#include "proof_corruption.hpp"

using namespace pdl;

namespace {
Formula F(const char* s) { return parse_formula(s); }
Program P(const char* s) { return parse_program(s); }
ProgramJudgement J(const char* s) { return parse_judgement(s); }

Proof load(const std::string& name) {
  std::ifstream in(std::string(PDLKIT_FIXTURE_DIR) + "/" + name);
  REQUIRE(in);
  return proof_from_json(nlohmann::json::parse(in));
}

// Replaces the atomic program `hole` by `with`, outside tests.
Program fill(const Program& a, const std::string& hole, const Program& with) {
  switch (a.kind()) {
    case ProgramKind::Atomic:
      return a.name() == hole ? with : a;
    case ProgramKind::Test:
      return a;
    case ProgramKind::Seq:
      return Program::seq(fill(a.lhs(), hole, with), fill(a.rhs(), hole, with));
    case ProgramKind::Union:
      return Program::choice(fill(a.lhs(), hole, with), fill(a.rhs(), hole, with));
    case ProgramKind::Inter:
      return Program::inter(fill(a.lhs(), hole, with), fill(a.rhs(), hole, with));
  }
  return a;
}

std::size_t holes(const Program& a, const std::string& hole) {
  switch (a.kind()) {
    case ProgramKind::Atomic:
      return a.name() == hole ? 1 : 0;
    case ProgramKind::Test:
      return 0;
    default:
      return holes(a.lhs(), hole) + holes(a.rhs(), hole);
  }
}
}  // namespace

TEST_CASE("scheme inventory") {
  CHECK(formula_schemes().size() == 10);
  CHECK(program_schemes().size() == 11);
  for (const char* n : {"Dl", "?", "T1", ";", "D", "K", "C1", "C2", "C3", "V"}) {
    REQUIRE(find_scheme(n));
    CHECK_FALSE(find_scheme(n)->is_program());
  }
  for (const char* n : {"Wk", "Cm", "Ct", "D3", "D4", "T", "A", "T2", "T3", "D1", "D2"}) {
    REQUIRE(find_scheme(n));
    CHECK(find_scheme(n)->is_program());
  }
  CHECK(find_scheme("nope") == nullptr);
}

TEST_CASE("is_axiom_instance: examples") {
  auto t1 = is_axiom_instance(F("<a & p?>q <-> <a & true?>(p & q)"));
  REQUIRE(t1);
  CHECK(t1->first == "T1");
  CHECK(std::get<Program>(t1->second.at("alpha")) == P("a"));
  CHECK(std::get<Formula>(t1->second.at("p")) == F("p"));
  CHECK(std::get<Formula>(t1->second.at("q")) == F("q"));

  auto k = is_axiom_instance(F("[a](p -> q) -> [a]p -> [a]q"));
  REQUIRE(k);
  CHECK(k->first == "K");

  CHECK_FALSE(is_axiom_instance(F("<a>p <-> <a>p")));

  auto nested = is_axiom_instance(F("[a;(b & c)](q | p) <-> [a][b & c](q | p)"));
  REQUIRE(nested);
  CHECK(nested->first == ";");
}

TEST_CASE("is_program_axiom_instance: examples") {
  auto wk = is_program_axiom_instance(J("a & b => a"));
  REQUIRE(wk);
  CHECK(wk->first == "Wk");
  auto t = is_program_axiom_instance(J("a & p? <=> (<a & true?>p)?"));
  REQUIRE(t);
  CHECK(t->first == "T");
  CHECK_FALSE(is_program_axiom_instance(J("a => a & a")));
  CHECK(is_program_axiom_instance(J("a & a <=> a"))->first == "Ct");
  CHECK_FALSE(is_program_axiom_instance(J("a & b <=> a")));
}

TEST_CASE("instantiate and match round trip") {
  pdltest::Gen g(5);
  g.allow_union = true;
  for (const auto* list : {&formula_schemes(), &program_schemes()}) {
    for (const auto& s : *list) {
      for (int i = 0; i < 20; ++i) {
        Binding b;
        for (const char* m : {"p", "q", "r"}) b[m] = g.formula(2);
        for (const char* m : {"alpha", "beta", "gamma"}) b[m] = g.program(2);
        Statement st = instantiate(s, b);
        auto back = match(s, st);
        REQUIRE(back);
        CHECK(instantiate(s, *back) == st);
      }
    }
  }
}

TEST_CASE("uniform substitution keeps instances instances") {
  const Formula f = F("<p?>q <-> p & q");
  REQUIRE(is_axiom_instance(f));
  pdltest::Gen g(9);
  for (int i = 0; i < 50; ++i) {
    Formula r = g.formula(3);
    auto inst = is_axiom_instance(usub(f, r, "p"));
    REQUIRE(inst);
    CHECK(inst->first == "?");
  }
}

TEST_CASE("rule C: worked instance") {
  const Program pat = rule_c_pattern(P("true?"), P("a"), P("b"), F("false"));
  CHECK(pat == P("a;[(b;a)^]false?;b"));
  CHECK(rule_c_replacement(P("true?"), P("a"), P("b"), F("false")) == P("a;b;[(a;b)^]false?"));
  const ProgramJudgement j = J("(a;[(b;a)^]false?;b)^ => (a;b;[(a;b)^]false?)^");
  std::string why;
  CHECK(check_rule_c(j, P("true?"), P("a"), P("b"), F("false"), pat, true, &why));
  CHECK_FALSE(check_rule_c(j, P("true?"), P("b"), P("a"), F("false"), pat, true, &why));
  CHECK_FALSE(why.empty());
  const ProgramJudgement eq{JudgementKind::Equiv, j.left, j.right};
  CHECK_FALSE(check_rule_c(eq, P("true?"), P("a"), P("b"), F("false"), pat));
}

TEST_CASE("rule C: zero occurrences") {
  std::string why;
  const Program host = P("a;b");
  CHECK_FALSE(check_rule_c(ProgramJudgement{JudgementKind::Implies, loop(host), loop(host)}, P("c"), P("a"),
                           P("b"), F("p"), host, true, &why));
  CHECK(why.find("pattern") != std::string::npos);
}

TEST_CASE("rule C: occurrences against a hole-filling oracle") {
  pdltest::Gen g(21);
  g.programs = {"c", "d", "h"};
  g.props = {"q"};
  std::mt19937_64 rng(4);
  int two_or_more = 0;
  for (int i = 0; i < 300; ++i) {
    Program ctx = g.program(4);
    if (i < 2) ctx = i == 0 ? P("h;c;h") : P("(h & d) + (c;h)");
    const std::size_t n = holes(ctx, "h");
    if (n == 0) continue;
    if (n >= 2) ++two_or_more;
    Program b1 = Program::atomic(rng() % 2 ? "a" : "b");
    if (rng() % 3 == 0) b1 = P("true?");
    const Program b2 = P("a");
    const Program b3 = P("b;a");
    const Formula p = F("p");
    const Program pat = rule_c_pattern(b1, b2, b3, p);
    const Program rep = rule_c_replacement(b1, b2, b3, p);
    const Program host = fill(ctx, "h", pat);
    const Program expected = fill(ctx, "h", rep);
    std::size_t count = 0;
    CHECK(replace_subprogram(host, pat, rep, true, &count) == expected);
    CHECK(count == n);
    CHECK(check_rule_c(ProgramJudgement{JudgementKind::Implies, loop(host), loop(expected)}, b1, b2, b3, p, host));
    if (n >= 2) {
      CHECK_FALSE(
          check_rule_c(ProgramJudgement{JudgementKind::Implies, loop(host), loop(host)}, b1, b2, b3, p, host));
      std::size_t one = 0;
      const Program single = replace_subprogram(host, pat, rep, false, &one);
      CHECK(one == 1);
      CHECK(check_rule_c(ProgramJudgement{JudgementKind::Implies, loop(host), loop(single)}, b1, b2, b3, p, host,
                         false));
    }
  }
  CHECK(two_or_more > 10);
}

TEST_CASE("is_tautology") {
  CHECK(is_tautology(F("p & q -> p")));
  CHECK(is_tautology(F("<a>p | ~<a>p")));
  CHECK(is_tautology(F("true")));
  CHECK_FALSE(is_tautology(F("p -> q")));
  CHECK_FALSE(is_tautology(F("<a>p -> <a>(p | q)")));
  std::string big = "p0";
  for (int i = 1; i < 25; ++i) big += " | p" + std::to_string(i);
  CHECK_THROWS_AS(is_tautology(F(big.c_str())), std::length_error);
}

TEST_CASE("check_proof: shipped proofs") {
  const Proof small = load("test_elimination.proof.json");
  CHECK(check_proof(small).ok);
  CHECK(std::get<Formula>(small.back().statement) == F("<p?>q -> p"));
  const Proof refutation = load("cyclic_refutation.proof.json");
  CHECK(check_proof(refutation).ok);
  CHECK(std::get<Formula>(refutation.back().statement) == F("<(a;[(b;a)^]false?;b)^>true -> false"));
  CHECK(proof_from_json(to_json(refutation)) == refutation);
}

TEST_CASE("check_proof: corrupted binding fails at that line") {
  Proof p = load("cyclic_refutation.proof.json");
  auto& by = std::get<ByProgramAxiom>(p[0].by);
  (*by.binding)["beta2"] = P("b");
  auto r = check_proof(p);
  CHECK_FALSE(r.ok);
  CHECK(r.line == 1);
}

TEST_CASE("check_proof: every single-line corruption fails") {
  for (const char* name : {"cyclic_refutation.proof.json", "test_elimination.proof.json"}) {
    const Proof p = load(name);
    auto variants = pdltest::single_line_corruptions(p);
    CHECK(variants.size() >= p.size());
    for (const auto& v : variants) {
      INFO(name << " line " << v.line + 1 << ": " << v.what);
      auto r = check_proof(v.proof);
      CHECK_FALSE(r.ok);
    }
  }
}

TEST_CASE("check_proof: single-byte corruptions that change the proof fail") {
  std::ifstream in(std::string(PDLKIT_FIXTURE_DIR) + "/test_elimination.proof.json");
  const auto original = nlohmann::json::parse(in);
  const Proof reference = proof_from_json(original);
  const std::string text = original.dump();
  const std::string alphabet = "abpq01?&|~<>[]();-\" ";
  int changed = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    for (char c : alphabet) {
      if (c == text[i]) continue;
      std::string t = text;
      t[i] = c;
      Proof p;
      try {
        p = proof_from_json(nlohmann::json::parse(t));
      } catch (const std::exception&) {
        continue;
      }
      if (p == reference) continue;
      ++changed;
      INFO("byte " << i << " -> " << c);
      CHECK_FALSE(check_proof(p).ok);
    }
  }
  CHECK(changed > 50);
}

TEST_CASE("check_proof: rules") {
  const Proof gen{{1, F("p | ~p"), ByTaut{}}, {2, F("[a](p | ~p)"), ByGen{1, P("a")}}};
  CHECK(check_proof(gen).ok);
  Proof bad_gen = gen;
  bad_gen[1].statement = F("[b](p | ~p)");
  CHECK_FALSE(check_proof(bad_gen).ok);

  const Proof us{{1, F("p | ~p"), ByTaut{}}, {2, F("<a>q | ~<a>q"), ByUSub{1, "p", F("<a>q")}}};
  CHECK(check_proof(us).ok);

  const Proof ps{{1, J("a & b => a"), ByProgramAxiom{"Wk", std::nullopt}},
                 {2, F("<a & b>p -> <a & b>p"), ByTaut{}},
                 {3, F("<a & b>p -> <a>p"), ByPSub{2, 1}}};
  CHECK(check_proof(ps).ok);
  Proof wrong_side = ps;
  wrong_side[2].statement = F("<a>p -> <a>p");
  CHECK_FALSE(check_proof(wrong_side).ok);

  const Proof tp{{1, F("p & q <-> q & p"), ByTaut{}}, {2, J("(p & q)? <=> (q & p)?"), ByTP{1}}};
  CHECK(check_proof(tp).ok);

  const Proof st{{1, J("a & b <=> b & a"), ByProgramAxiom{"Cm", std::nullopt}},
                 {2, J("b & a <=> a & b"), ByStruct{StructKind::SymIff, {1}}},
                 {3, J("c;(a & b) <=> c;(b & a)"), ByStruct{StructKind::CongSeqR, {1}}},
                 {4, J("c;(a & b) => c;(b & a)"), ByStruct{StructKind::SplitIff, {3}}},
                 {5, J("c => c"), ByStruct{StructKind::Refl, {}}}};
  CHECK(check_proof(st).ok);

  const Proof forward{{1, F("p | ~p"), ByTaut{}}, {2, F("[a](p | ~p)"), ByGen{3, P("a")}},
                      {3, F("q | ~q"), ByTaut{}}};
  CHECK_FALSE(check_proof(forward).ok);
  const Proof skipped{{1, F("p | ~p"), ByTaut{}}, {3, F("q | ~q"), ByTaut{}}};
  CHECK(check_proof(skipped).line == 3);
  CHECK_FALSE(check_proof(Proof{}).ok);
}

TEST_CASE("theory_derives: examples") {
  CHECK(theory_derives({F("p")}, F("p"), Proof{{1, F("p -> p"), ByTaut{}}}));
  CHECK(theory_derives({F("p"), F("p -> q")}, F("q"), Proof{{1, F("p & (p -> q) -> q"), ByTaut{}}}));
  CHECK(theory_derives({F("p"), F("p -> q")}, F("q"), Proof{{1, F("(p -> q) & p -> q"), ByTaut{}}}));

  const Formula dl = F("[a]p <-> ~<a>~p");
  const Proof via_top{{1, dl, ByAxiom{"Dl", std::nullopt}},
                      {2, impl(dl, impl(verum(), dl)), ByTaut{}},
                      {3, impl(verum(), dl), ByMP{1, 2}}};
  CHECK(theory_derives({}, dl, via_top));
  CHECK(theory_derives({}, dl, Proof{via_top[0]}));

  std::string why;
  CHECK_FALSE(theory_derives({F("q")}, F("p"), Proof{{1, F("p -> p"), ByTaut{}}}, &why));
  CHECK_FALSE(why.empty());
  CHECK_FALSE(theory_derives({F("p")}, F("q"), Proof{{1, F("p -> p"), ByTaut{}}}));
  CHECK_FALSE(theory_derives({F("p")}, F("p"), Proof{{1, F("p -> p"), ByAxiom{"K", std::nullopt}}}));
}

TEST_CASE("proof JSON") {
  const auto j = nlohmann::json::parse(R"({"lines":[
    {"id":1,"stmt":"<p?>q <-> p & q","by":{"axiom":"?"}},
    {"id":2,"stmt":"a & b => a","by":{"paxiom":"Wk"}},
    {"id":3,"stmt":"a & b => a & b","by":{"struct":"Refl"}},
    {"id":4,"stmt":"a & b => a","by":{"struct":"Trans","from":[3,2]}}]})");
  const Proof p = proof_from_json(j);
  REQUIRE(p.size() == 4);
  CHECK(std::holds_alternative<ByAxiom>(p[0].by));
  CHECK(std::get<ByStruct>(p[3].by).from == std::vector<int>{3, 2});
  CHECK(check_proof(p).ok);
  CHECK(proof_from_json(to_json(p)) == p);
  CHECK_THROWS(proof_from_json(nlohmann::json::parse(R"({"lines":[{"id":1,"stmt":"p","by":{"rule":"magic"}}]})")));
  CHECK_THROWS(proof_from_json(nlohmann::json::parse(R"({"lines":[{"id":1,"stmt":"p &","by":{"rule":"taut"}}]})")));
}

TEST_CASE("closure properties of truth sets") {
  const auto universe = closure_universe({F("<a>p & [b](p | q)"), F("<a & b>~q -> p")});
  CHECK(universe.count(F("p")));
  CHECK(universe.count(F("~p")));
  const Vocabulary vocab{{"p", "q"}, {"a", "b"}};
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    auto k = pdltest::random_structure(rng, 3, vocab, 0.4);
    const Entailment local = [&](const Theory& t, const Formula& f) {
      for (World w = 0; w < k.size(); ++w) {
        bool all = true;
        for (const auto& g : t) all = all && pdltest::holds(k, w, g);
        if (all && !pdltest::holds(k, w, f)) return false;
      }
      return true;
    };
    for (World u = 0; u < k.size(); ++u) {
      Theory t;
      for (const auto& f : universe)
        if (pdltest::holds(k, u, f)) t.insert(f);
      CHECK(conjunction_property(t, universe));
      CHECK(disjunction_property(t, universe));
      CHECK(negation_property(t, universe));
      CHECK(closed_under_entailment(t, universe, local));
    }
  }
  CHECK_FALSE(negation_property({}, universe));
  CHECK_FALSE(negation_property({F("p"), F("~p")}, universe));
  Theory half{F("<a>p")};
  const bool all_hold = conjunction_property(half, universe) && disjunction_property(half, universe) &&
                        negation_property(half, universe);
  CHECK_FALSE(all_hold);
  int violated = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Theory t;
    for (const auto& f : universe)
      if (rng() % 2) t.insert(f);
    if (!conjunction_property(t, universe) || !disjunction_property(t, universe) || !negation_property(t, universe))
      ++violated;
  }
  CHECK(violated == 100);
}
