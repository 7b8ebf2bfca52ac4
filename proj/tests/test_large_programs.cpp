#include <algorithm>
#include <random>

#include "doctest.h"
#include "pdlkit/large_programs.hpp"
#include "pdlkit/parser.hpp"

// GCC 11 misreports memcmp bounds for comparisons of short Path vectors.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic ignored "-Wstringop-overread"
#endif

using namespace pdl;

namespace {
Formula F(const char* s) { return parse_formula(s); }
Program P(const char* s) { return parse_program(s); }
FormulaSet S(std::initializer_list<const char*> xs) {
  FormulaSet out;
  for (const char* x : xs) out.insert(F(x));
  return out;
}
const Path kRoot;
LargeProgram A(const char* n) { return LargeProgram::atomic(n); }
LargeProgram ST(LargeProgram l, FormulaSet x, LargeProgram r) {
  return LargeProgram::seq_test(std::move(l), std::move(x), std::move(r));
}

// Re-associates every sequence to the left, everywhere.
Program left_assoc(const Program& a) {
  std::vector<Program> fs;
  std::function<void(const Program&)> flat = [&](const Program& x) {
    if (x.kind() == ProgramKind::Seq) {
      flat(x.lhs());
      flat(x.rhs());
    } else if (x.kind() == ProgramKind::Inter) {
      fs.push_back(Program::inter(left_assoc(x.lhs()), left_assoc(x.rhs())));
    } else {
      fs.push_back(x);
    }
  };
  flat(a);
  Program out = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) out = Program::seq(out, fs[i]);
  return out;
}

bool oracle_instance(const Program& a, const LargeProgram& l) {
  const auto all = enumerate_instances(l);
  return std::find(all.begin(), all.end(), left_assoc(a)) != all.end();
}

bool oracle_leq(const LargeProgram& x, const LargeProgram& y) {
  for (const auto& a : enumerate_instances(x))
    if (!is_instance(a, y)) return false;
  return true;
}

struct LGen {
  std::mt19937_64 rng;
  std::vector<Formula> atoms{F("p"), F("q"), F("r")};
  explicit LGen(std::uint64_t s) : rng(s) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  FormulaSet set(std::size_t max) {
    FormulaSet s;
    const std::size_t n = 1 + pick(static_cast<int>(max));
    while (s.size() < n) s.insert(atoms[pick(static_cast<int>(atoms.size()))]);
    return s;
  }
  // At most `tests` test positions.
  LargeProgram large(int depth, int& tests) {
    const int k = depth <= 0 ? 0 : pick(3);
    if (k == 2 && tests > 0) {
      --tests;
      return ST(large(depth - 1, tests), set(3), large(depth - 1, tests));
    }
    if (k == 1) return LargeProgram::inter(large(depth - 1, tests), large(depth - 1, tests));
    return A(pick(2) ? "a" : "b");
  }
  // Same shape as l, fresh test sets.
  LargeProgram reshape(const LargeProgram& l) {
    switch (l.kind()) {
      case LargeKind::Atomic:
        return l;
      case LargeKind::Test:
        return LargeProgram::test(set(3));
      case LargeKind::Inter:
        return LargeProgram::inter(reshape(l.lhs()), reshape(l.rhs()));
      case LargeKind::SeqTest:
        return ST(reshape(l.lhs()), set(3), reshape(l.rhs()));
    }
    return l;
  }
};

}  // namespace

TEST_CASE("lift: examples") {
  CHECK(lift(P("a;p?;b")) == ST(A("a"), S({"p"}), A("b")));
  CHECK(lift(P("a & b")) == LargeProgram::inter(A("a"), A("b")));
  CHECK(lift(P("a;true?;b")) == ST(A("a"), S({"true"}), A("b")));
  CHECK_THROWS_AS(lift(P("a;((p?;b) & c)")), LiftError);
  CHECK_THROWS_AS(lift(P("a;b")), LiftError);
  CHECK_THROWS_AS(lift(P("a + b")), LiftError);
  CHECK_THROWS_AS(lift(P("p?;a")), LiftError);
  CHECK_THROWS_AS(lift(P("a;p?")), LiftError);
  CHECK_THROWS_AS(lift(P("a;p?;q?;b")), LiftError);
  CHECK(lift_loop(P("(a;p?;b)^")).body == lift(P("a;p?;b")));
  CHECK_THROWS_AS(lift_loop(P("a;p?;b")), LiftError);
}

TEST_CASE("lift then enumerate gives back the program") {
  LGen g(3);
  for (int i = 0; i < 300; ++i) {
    int t = 3;
    const LargeProgram shape = g.large(3, t);
    const auto all = enumerate_instances(shape);
    const Program a = all[g.pick(static_cast<int>(all.size()))];
    const auto back = enumerate_instances(lift(a));
    REQUIRE(back.size() == 1);
    CHECK(back[0] == a);
    CHECK(is_instance(a, lift(a)));
  }
  CHECK(enumerate_instances(lift(P("a;(p?;b)"))) == std::vector<Program>{P("a;p?;b")});
}

TEST_CASE("is_instance: examples") {
  const LargeProgram pq = ST(A("a"), S({"p", "q"}), A("b"));
  CHECK(is_instance(P("a;p?;b"), pq));
  CHECK(is_instance(P("a;(q?;b)"), pq));
  CHECK_FALSE(is_instance(P("a;r?;b"), pq));
  CHECK_FALSE(is_instance(P("a"), pq));
  const LargeProgram ac = ST(LargeProgram::inter(A("a"), A("c")), S({"p"}), A("b"));
  CHECK(is_instance(P("(a & c);p?;b"), ac));
  CHECK(oracle_instance(P("(a & c);p?;b"), ac));
  CHECK_FALSE(is_instance(P("(c & a);p?;b"), ac));
  CHECK(is_instance(P("(a;p?;b)^"), LargeLoop{pq}));
  CHECK_FALSE(is_instance(P("a;p?;b"), LargeLoop{pq}));
}

TEST_CASE("is_instance agrees with enumeration") {
  LGen g(11);
  for (int i = 0; i < 300; ++i) {
    int t = 2;
    const LargeProgram l = g.large(3, t);
    int t2 = 2;
    const LargeProgram other = g.large(3, t2);
    for (const auto& a : enumerate_instances(other)) CHECK(is_instance(a, l) == oracle_instance(a, l));
    for (const auto& a : enumerate_instances(l)) CHECK(is_instance(a, l));
  }
}

TEST_CASE("enumerate_instances: examples") {
  CHECK(enumerate_instances(ST(A("a"), S({"p", "q"}), A("b"))) == std::vector<Program>{P("a;p?;b"), P("a;q?;b")});
  CHECK(enumerate_instances(A("a")) == std::vector<Program>{P("a")});
  const LargeProgram two = LargeProgram::inter(ST(A("a"), S({"p"}), A("b")), ST(A("c"), S({"q", "r"}), A("d")));
  CHECK(enumerate_instances(two).size() == 2);
  CHECK(two.instance_count() == 2);
  LGen g(5);
  for (int i = 0; i < 200; ++i) {
    int t = 3;
    const LargeProgram l = g.large(4, t);
    const auto all = enumerate_instances(l);
    CHECK(all.size() == l.instance_count());
    CHECK(std::set<Program>(all.begin(), all.end()).size() == all.size());
  }
  CHECK_THROWS_AS(ST(A("a"), {}, A("b")), std::invalid_argument);
}

TEST_CASE("leq: examples") {
  CHECK(leq(ST(A("a"), S({"p"}), A("b")), ST(A("a"), S({"p", "q"}), A("b"))));
  CHECK_FALSE(leq(ST(A("a"), S({"p"}), A("b")), ST(A("a"), S({"q"}), A("b"))));
  CHECK_FALSE(leq(A("a"), A("b")));
  CHECK_FALSE(leq(ST(A("a"), S({"p"}), A("b")), A("a")));
  const LargeProgram l = ST(ST(A("a"), S({"p"}), A("b")), S({"q"}), A("c"));
  const LargeProgram r = ST(A("a"), S({"p"}), ST(A("b"), S({"q", "r"}), A("c")));
  CHECK(leq(l, r));
  CHECK(oracle_leq(l, r));
}

TEST_CASE("leq agrees with instance-set inclusion") {
  LGen g(17);
  int yes = 0;
  for (int i = 0; i < 1000; ++i) {
    int t = 2;
    const LargeProgram x = g.large(3, t);
    LargeProgram y = g.reshape(x);
    if (i % 4 == 0) {
      int t2 = 2;
      y = g.large(3, t2);
    }
    const bool s = leq(x, y);
    CHECK(s == oracle_leq(x, y));
    yes += s;
  }
  CHECK(yes > 50);
}

TEST_CASE("left_right_sets: examples") {
  const FormulaSet phi = S({"p"});
  const FormulaSet x = S({"q"});
  const FormulaSet psi = S({"r"});
  auto m = left_right_sets({phi, ST(A("a"), x, A("b")), psi});
  CHECK(m.at(kRoot) == std::make_pair(phi, psi));
  CHECK(m.at(Path{0}) == std::make_pair(phi, x));
  CHECK(m.at(Path{1}) == std::make_pair(x, psi));

  auto n = left_right_sets({phi, LargeProgram::inter(A("a"), A("b")), psi});
  CHECK(n.at(Path{0}) == std::make_pair(phi, psi));
  CHECK(n.at(Path{1}) == std::make_pair(phi, psi));

  auto o = left_right_sets({phi, LargeProgram::inter(ST(A("a"), x, A("b")), A("c")), psi});
  CHECK(o.at(Path{1}) == std::make_pair(phi, psi));
  CHECK(o.at(Path{0, 0}) == std::make_pair(phi, x));
  CHECK(o.at(Path{0, 1}) == std::make_pair(x, psi));
}

TEST_CASE("left_right_sets follows the recurrence from each parent") {
  LGen g(23);
  for (int i = 0; i < 200; ++i) {
    int t = 3;
    const LabelledTransition tr{g.set(2), g.large(4, t), g.set(2)};
    const auto m = left_right_sets(tr);
    const auto occ = occurrences(tr.program);
    CHECK(m.size() == occ.size());
    CHECK(m.at(kRoot) == std::make_pair(tr.left, tr.right));
    for (const auto& [p, node] : occ) {
      if (node.kind() == LargeKind::Inter) {
        for (std::uint8_t c = 0; c < 2; ++c) {
          Path q = p;
          q.push_back(c);
          CHECK(m.at(q) == m.at(p));
        }
      } else if (node.kind() == LargeKind::SeqTest) {
        Path l = p;
        l.push_back(0);
        Path r = p;
        r.push_back(1);
        CHECK(m.at(l) == std::make_pair(m.at(p).first, node.tests()));
        CHECK(m.at(r) == std::make_pair(node.tests(), m.at(p).second));
      }
    }
  }
}

TEST_CASE("loop_left_right_programs: examples") {
  const FormulaSet phi = S({"p"});
  const FormulaSet x = S({"q"});
  const LargeProgram top = LargeProgram::test(S({"true"}));
  auto m = loop_left_right_programs({ST(A("a"), x, A("b"))}, phi);
  REQUIRE(m.size() == 1);
  CHECK(m.at(kRoot).first == ST(top, phi, A("a")));
  CHECK(m.at(kRoot).second == ST(A("b"), phi, top));
  CHECK(render(m.at(kRoot).first) == "{true}?;{p}?;a");

  // Y nested inside the left factor of X.
  const FormulaSet y = S({"r"});
  const LargeProgram inner = ST(A("c"), y, A("a"));
  auto n = loop_left_right_programs({ST(inner, x, A("b"))}, phi);
  REQUIRE(n.size() == 2);
  CHECK(n.at(kRoot).first == ST(top, phi, inner));
  CHECK(n.at(Path{0}).first == ST(top, phi, A("c")));
  CHECK(n.at(Path{0}).second == ST(A("a"), x, ST(A("b"), phi, top)));

  CHECK(loop_left_right_programs({LargeProgram::inter(A("a"), A("b"))}, phi).empty());
}

TEST_CASE("is_consistent_transition: examples") {
  CHECK_FALSE(is_consistent_transition({S({"[a]~q"}), A("a"), S({"q"})}));
  CHECK(is_consistent_transition({{}, A("a"), S({"q"})}));
  CHECK(is_consistent_transition({S({"[a]~q"}), A("a"), S({"p"})}));
  // Violation only at the inner occurrence a, whose right set is X.
  const LabelledTransition nested{S({"[a]~q"}), ST(A("a"), S({"q"}), A("b")), S({"p"})};
  CHECK_FALSE(is_consistent_transition(nested));
  CHECK(is_consistent_transition({S({"[a]~q"}), ST(A("a"), S({"r"}), A("b")), S({"p"})}));
  CHECK_FALSE(is_consistent_transition({S({"[a;q?;b]~p"}), ST(A("a"), S({"q", "r"}), A("b")), S({"p"})}));
}

TEST_CASE("is_consistent_transition agrees with a brute-force scan") {
  LGen g(31);
  int inconsistent = 0;
  for (int i = 0; i < 300; ++i) {
    int t = 2;
    LabelledTransition tr{g.set(2), g.large(3, t), g.set(2)};
    // Seed the left label with boxes over instances of random occurrences.
    const auto occ = occurrences(tr.program);
    for (int k = 0; k < 2; ++k) {
      auto it = occ.begin();
      std::advance(it, g.pick(static_cast<int>(occ.size())));
      const auto inst = enumerate_instances(it->second);
      const Program b = inst[g.pick(static_cast<int>(inst.size()))];
      const Formula psi = g.atoms[g.pick(3)];
      tr.left.insert(box(b, Formula::negation(psi)));
    }
    bool violated = false;
    const auto labels = left_right_sets(tr);
    for (const auto& [p, node] : occurrences(tr.program)) {
      const auto& [l, r] = labels.at(p);
      for (const auto& b : enumerate_instances(node))
        for (const auto& psi : r) violated = violated || l.count(box(b, Formula::negation(psi)));
    }
    CHECK(is_consistent_transition(tr) == !violated);
    inconsistent += violated;
  }
  CHECK(inconsistent > 20);
}

TEST_CASE("growing a test set keeps inconsistent transitions inconsistent") {
  LGen g(37);
  for (int i = 0; i < 300; ++i) {
    int t = 2;
    LabelledTransition tr{g.set(3), g.large(3, t), g.set(3)};
    for (const auto& [p, node] : occurrences(tr.program))
      for (const auto& b : enumerate_instances(node))
        if (g.pick(4) == 0) tr.left.insert(box(b, Formula::negation(g.atoms[g.pick(3)])));
    if (is_consistent_transition(tr)) continue;
    const LabelledTransition bigger{tr.left, g.reshape(tr.program), tr.right};
    if (!leq(tr.program, bigger.program)) continue;
    CHECK_FALSE(is_consistent_transition(bigger));
  }
}

TEST_CASE("is_consistent_loop") {
  const FormulaSet phi = S({"p"});
  const LargeProgram bare = ST(A("a"), S({"q"}), A("b"));
  auto lr = loop_left_right_programs({bare}, phi);
  const auto b1 = enumerate_instances(lr.at(kRoot).second).at(0);
  const auto b2 = enumerate_instances(lr.at(kRoot).first).at(0);
  const Formula forbidden = box(loop(Program::seq(Program::seq(b1, P("p?")), b2)), Formula::falsum());
  CHECK_FALSE(is_consistent_loop({ST(A("a"), FormulaSet{F("q"), forbidden}, A("b"))}, phi));
  CHECK_FALSE(
      is_consistent_loop({ST(A("a"), FormulaSet{F("q"), F("[(b;p?;true?;p?;true?;p?;a)^]false")}, A("b"))}, phi));
  CHECK(is_consistent_loop({bare}, phi));
  CHECK(is_consistent_loop({ST(A("a"), FormulaSet{forbidden, F("q")}, A("b"))}, {}));
  const Formula wrong_phi = box(loop(Program::seq(Program::seq(b1, P("q?")), b2)), Formula::falsum());
  CHECK(is_consistent_loop({ST(A("a"), FormulaSet{wrong_phi}, A("b"))}, phi));
  CHECK_FALSE(is_consistent_loop({bare}, S({"p", "[a]~q"})));
}

TEST_CASE("saturation_gap") {
  auto g1 = saturation_gap({S({"[a]p"}), ST(A("a"), S({"true"}), A("b")), {}});
  REQUIRE(g1.count(kRoot));
  CHECK(g1.at(kRoot).count(F("p")));
  auto g2 = saturation_gap({{}, ST(A("a"), S({"true"}), A("b")), S({"q"})});
  CHECK(g2.at(kRoot) == S({"<b>q"}));

  // Close the gaps by hand until nothing is missing.
  LabelledTransition t{S({"[a]p", "[a](q | p)"}), ST(ST(A("a"), S({"true"}), A("b")), S({"r"}), A("c")), S({"q"})};
  for (int round = 0; round < 10; ++round) {
    const auto gaps = saturation_gap(t);
    if (gaps.empty()) break;
    std::function<LargeProgram(const LargeProgram&, const Path&)> close = [&](const LargeProgram& l,
                                                                              const Path& at) -> LargeProgram {
      if (l.kind() != LargeKind::SeqTest) return l;
      FormulaSet x = l.tests();
      if (gaps.count(at)) x.insert(gaps.at(at).begin(), gaps.at(at).end());
      Path p0 = at;
      p0.push_back(0);
      Path p1 = at;
      p1.push_back(1);
      return ST(close(l.lhs(), p0), x, close(l.rhs(), p1));
    };
    t.program = close(t.program, {});
  }
  CHECK(saturation_gap(t).empty());
  const FormulaSet inner = t.program.lhs().tests();
  CHECK(inner.count(F("p")));
  CHECK(inner.count(F("q | p")));
  CHECK(t.program.tests().count(F("<c>q")));

  const FormulaSet phi = S({"p"});
  auto lg = loop_saturation_gap({ST(A("a"), S({"q"}), A("b"))}, phi);
  CHECK(lg.at(kRoot).count(F("<(true?;p?;a;p?;b;p?;true?)^>true")));
}

TEST_CASE("large program JSON and rendering") {
  const LargeProgram l = LargeProgram::inter(ST(A("a"), S({"p", "q"}), A("b")), A("c"));
  CHECK(large_from_json(to_json(l)) == l);
  CHECK(large_from_json(nlohmann::json("a;p?;b")) == ST(A("a"), S({"p"}), A("b")));
  CHECK(large_from_json(nlohmann::json::parse(R"({"seq":["a",["p","q"],{"atomic":"b"}]})")) ==
        ST(A("a"), S({"p", "q"}), A("b")));
  CHECK(render(l) == "(a;{p, q}?;b) & c");
  CHECK(render(LargeProgram::inter(A("a"), LargeProgram::inter(A("b"), A("c")))) == "a & (b & c)");
  const LabelledTransition t{S({"p"}), l, S({"q"})};
  const auto back = transition_from_json(to_json(t));
  CHECK(back.left == t.left);
  CHECK(back.program == t.program);
  CHECK(back.right == t.right);
  CHECK_THROWS(large_from_json(nlohmann::json::parse(R"({"seq":["a",[],"b"]})")));
  CHECK_THROWS(large_from_json(nlohmann::json::parse(R"({"star":"a"})")));
}
