#include <algorithm>

#include "doctest.h"
#include "gen.hpp"
#include "pdlkit/parser.hpp"
#include "pdlkit/substitution.hpp"

using namespace pdl;

namespace {
Formula P(const char* s) { return Formula::prop(s); }
Program A(const char* s) { return Program::atomic(s); }
}  // namespace

TEST_CASE("derived connectives expand to the core") {
  CHECK(verum() == Formula::negation(Formula::falsum()));
  CHECK(box(A("a"), Formula::falsum()) ==
        Formula::negation(Formula::diamond(A("a"), verum())));
  CHECK(loop(A("a")) == Program::inter(A("a"), Program::test(verum())));
  CHECK(loop_body(loop(A("a"))) != nullptr);
  CHECK(loop_body(A("a")) == nullptr);
}

TEST_CASE("equality and ordering are structural") {
  Formula f = Formula::diamond(Program::seq(A("a"), A("b")), P("p"));
  Formula g = Formula::diamond(Program::seq(A("a"), A("b")), P("p"));
  CHECK(f == g);
  CHECK_FALSE(f < g);
  CHECK(f != Formula::diamond(Program::seq(A("b"), A("a")), P("p")));
  CHECK(std::hash<Formula>{}(f) == std::hash<Formula>{}(g));
  CHECK(f.size() == 5);
}

TEST_CASE("parse: intersection inside a diamond") {
  CHECK(parse_formula("<a & b>true") ==
        Formula::diamond(Program::inter(A("a"), A("b")), verum()));
}

TEST_CASE("parse: the cyclic-test formula") {
  Formula psi = box(loop(Program::seq(A("b"), A("a"))), Formula::falsum());
  Program body = Program::seq(Program::seq(A("a"), Program::test(psi)), A("b"));
  CHECK(parse_formula("<(a ; [ (b;a)^ ] false ? ; b)^> true") ==
        Formula::diamond(loop(body), verum()));
}

TEST_CASE("parse: precedence") {
  CHECK(parse_formula("p -> q | r") ==
        Formula::disjunction(Formula::negation(P("p")), Formula::disjunction(P("q"), P("r"))));
  CHECK(parse_formula("p & q | r") == Formula::disjunction(conj(P("p"), P("q")), P("r")));
  CHECK(parse_formula("p -> q -> r") == impl(P("p"), impl(P("q"), P("r"))));
  CHECK(parse_program("a;b & c + d") ==
        Program::choice(Program::inter(Program::seq(A("a"), A("b")), A("c")), A("d")));
  CHECK(parse_program("a;b;c") == Program::seq(Program::seq(A("a"), A("b")), A("c")));
  CHECK(parse_program("(p)?") == Program::test(P("p")));
  CHECK(parse_program("(a;b)^") == loop(Program::seq(A("a"), A("b"))));
  CHECK(parse_formula("<a & p?>q") ==
        Formula::diamond(Program::inter(A("a"), Program::test(P("p"))), P("q")));
}

TEST_CASE("parse: unicode spellings") {
  CHECK(parse_formula("⟨a ∩ b⟩⊤ ∧ ¬p") == parse_formula("<a & b>true & ~p"));
  CHECK(parse_judgement("a ∩ b ⇒ a") == parse_judgement("a & b => a"));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_formula("p &"), ParseError);
  CHECK_THROWS_AS(parse_formula("<a p"), ParseError);
  CHECK_THROWS_AS(parse_formula("p $ q"), ParseError);
  CHECK_THROWS_AS(parse_formula("P"), ParseError);
  Vocabulary v{{"p"}, {"a"}};
  CHECK_NOTHROW(parse_formula("<a>p", v));
  CHECK_THROWS_AS(parse_formula("<b>p", v), ParseError);
  CHECK_THROWS_AS(parse_formula("<a>q", v), ParseError);
  CHECK_THROWS_AS(parse_formula("<p>p", v), ParseError);
}

TEST_CASE("statements") {
  auto s = parse_statement("a & b => a");
  REQUIRE(std::holds_alternative<ProgramJudgement>(s));
  CHECK(std::get<ProgramJudgement>(s).kind == JudgementKind::Implies);
  auto t = parse_statement("a & p? <=> (<a^>p)?");
  REQUIRE(std::holds_alternative<ProgramJudgement>(t));
  CHECK(std::get<ProgramJudgement>(t).kind == JudgementKind::Equiv);
  CHECK(std::holds_alternative<Formula>(parse_statement("<a>p <-> q")));
}

TEST_CASE("render") {
  CHECK(render(Formula::diamond(Program::test(P("p")), P("q"))) == "<p?>q");
  CHECK(render(loop(A("a"))) == "a^");
  Formula f = Formula::disjunction(Formula::negation(P("p")), P("q"));
  CHECK(render(f) == "p -> q");
  CHECK(render(f, {.sugar = false}) == "~p | q");
  CHECK(render(parse_formula("[a](p -> q) -> [a]p -> [a]q")) == "[a](p -> q) -> [a]p -> [a]q");
  CHECK(render(parse_formula("(p <-> q) <-> r")) == "(p <-> q) <-> r");
  CHECK(render(parse_program("a;(b;c)")) == "a;(b;c)");
}

TEST_CASE("render/parse round trip on random terms") {
  pdltest::Gen g(7);
  for (int i = 0; i < 3000; ++i) {
    Formula f = g.formula(6);
    INFO(render(f));
    CHECK(parse_formula(render(f)) == f);
    CHECK(parse_formula(render(f, {.sugar = false})) == f);
    Program p = g.program(4);
    CHECK(parse_program(render(p)) == p);
  }
}

TEST_CASE("usub") {
  Formula rs = conj(P("r"), P("s"));
  CHECK(usub(parse_formula("<q?>p"), rs, "p") == Formula::diamond(Program::test(P("q")), rs));
  CHECK(usub(parse_formula("<p?>p"), Formula::falsum(), "p") == parse_formula("<false?>false"));
}

TEST_CASE("usub commutes with printing") {
  pdltest::Gen g(11);
  for (int i = 0; i < 500; ++i) {
    Formula f = g.formula(5);
    Formula psi = g.formula(2);
    CHECK(usub(parse_formula(render(f)), psi, "p") == parse_formula(render(usub(f, psi, "p"))));
  }
}

TEST_CASE("psub respects negation parity") {
  Program ab = Program::inter(A("a"), A("b"));
  CHECK(psub(parse_formula("<a>p"), A("a"), ab) == parse_formula("<a & b>p"));
  CHECK(psub(parse_formula("~<a>p"), A("a"), ab) == parse_formula("~<a>p"));
  CHECK(psub(parse_formula("<a>p | ~<a>q"), A("a"), A("b")) == parse_formula("<b>p | ~<a>q"));
  // Diamonds inside tests are left alone.
  CHECK(psub(parse_formula("<(<a>p)?>q"), A("a"), A("b")) == parse_formula("<(<a>p)?>q"));
}

TEST_CASE("polarity_of_occurrences") {
  auto o1 = polarity_of_occurrences(parse_formula("<a>p"), A("a"));
  REQUIRE(o1.size() == 1);
  CHECK(o1[0].path.empty());
  CHECK(o1[0].polarity == Polarity::Positive);

  auto o2 = polarity_of_occurrences(parse_formula("~~<a>p"), A("a"));
  REQUIRE(o2.size() == 1);
  CHECK(o2[0].path == Path{0, 0});
  CHECK(o2[0].polarity == Polarity::Positive);

  auto o3 = polarity_of_occurrences(parse_formula("<a>~<a>p"), A("a"));
  REQUIRE(o3.size() == 2);
  CHECK(o3[0].polarity == Polarity::Positive);
  CHECK(o3[1].polarity == Polarity::Negative);
}

TEST_CASE("psub touches exactly the positive occurrences") {
  pdltest::Gen g(3);
  Program old = A("a");
  Program rep = A("c");
  for (int i = 0; i < 1000; ++i) {
    Formula f = g.formula(5);
    Formula out = psub(f, old, rep);
    // Oracle: rewrite each reported positive occurrence by path.
    Term t = f;
    for (const auto& occ : polarity_of_occurrences(f, old)) {
      if (occ.polarity != Polarity::Positive) continue;
      Path pp = occ.path;
      pp.push_back(0);
      t = replace_at(t, pp, rep);
    }
    CHECK(std::get<Formula>(t) == out);
  }
}

TEST_CASE("paths") {
  Formula f = parse_formula("~<a;b>p");
  CHECK(std::get<Program>(subterm_at(f, {0, 0, 1})) == A("b"));
  CHECK(std::get<Formula>(replace_at(f, {0, 1}, P("q"))) == parse_formula("~<a;b>q"));
  CHECK_THROWS(subterm_at(f, {1}));
  CHECK_THROWS(replace_at(f, {0, 0}, P("q")));
  CHECK(path_from_string(to_string(Path{0, 1, 1})) == Path{0, 1, 1});
  CHECK(to_string(Path{}) == "root");
}

TEST_CASE("vocabulary") {
  Vocabulary v = symbols_of(parse_formula("<a;(p & q)?>r"));
  CHECK(v.props == std::set<std::string>{"p", "q", "r"});
  CHECK(v.programs == std::set<std::string>{"a"});
  CHECK_THROWS(Vocabulary{{"a"}, {"a"}}.validate());
  CHECK_THROWS(Vocabulary{{"P"}, {}}.validate());
  CHECK(v.contains(Vocabulary{{"p"}, {"a"}}));
  CHECK(is_identifier("x_1"));
  CHECK_FALSE(is_identifier("1x"));
}
