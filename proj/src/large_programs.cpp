#include "pdlkit/large_programs.hpp"

#include "pdlkit/parser.hpp"

namespace pdl {

LargeProgram LargeProgram::atomic(std::string name) {
  LargeProgram l;
  l.kind_ = LargeKind::Atomic;
  l.name_ = std::move(name);
  return l;
}

LargeProgram LargeProgram::inter(LargeProgram lhs, LargeProgram rhs) {
  LargeProgram l;
  l.kind_ = LargeKind::Inter;
  l.parts_ = {std::move(lhs), std::move(rhs)};
  return l;
}

LargeProgram LargeProgram::seq_test(LargeProgram lhs, FormulaSet tests, LargeProgram rhs) {
  if (tests.empty()) throw std::invalid_argument("test sets of large programs must be nonempty");
  LargeProgram l;
  l.kind_ = LargeKind::SeqTest;
  l.tests_ = std::move(tests);
  l.parts_ = {std::move(lhs), std::move(rhs)};
  return l;
}

LargeProgram LargeProgram::test(FormulaSet tests) {
  if (tests.empty()) throw std::invalid_argument("test sets of large programs must be nonempty");
  LargeProgram l;
  l.kind_ = LargeKind::Test;
  l.tests_ = std::move(tests);
  return l;
}

std::size_t LargeProgram::instance_count() const {
  switch (kind_) {
    case LargeKind::Atomic:
      return 1;
    case LargeKind::Test:
      return tests_.size();
    case LargeKind::Inter:
      return lhs().instance_count() * rhs().instance_count();
    case LargeKind::SeqTest:
      return lhs().instance_count() * tests_.size() * rhs().instance_count();
  }
  return 0;
}

namespace {

void factors(const Program& a, std::vector<Program>& out) {
  if (a.kind() == ProgramKind::Seq) {
    factors(a.lhs(), out);
    factors(a.rhs(), out);
  } else {
    out.push_back(a);
  }
}

std::vector<Program> factors(const Program& a) {
  std::vector<Program> out;
  factors(a, out);
  return out;
}

Program fold(const std::vector<Program>& fs, std::size_t from, std::size_t to) {
  Program out = fs.at(from);
  for (std::size_t i = from + 1; i < to; ++i) out = Program::seq(out, fs[i]);
  return out;
}

// L0 X1 L1 ... Xn Ln: leaves[i] are non-SeqTest nodes, sets[i] sits between
// leaves[i] and leaves[i + 1].
struct Chain {
  std::vector<const LargeProgram*> leaves;
  std::vector<const FormulaSet*> sets;
  std::size_t width() const { return leaves.size() + sets.size(); }
};

void chain(const LargeProgram& l, Chain& c) {
  if (l.kind() == LargeKind::SeqTest) {
    chain(l.lhs(), c);
    c.sets.push_back(&l.tests());
    chain(l.rhs(), c);
  } else {
    c.leaves.push_back(&l);
  }
}

Chain chain(const LargeProgram& l) {
  Chain c;
  chain(l, c);
  return c;
}

bool is_test_in(const Program& f, const FormulaSet& s) {
  return f.kind() == ProgramKind::Test && s.count(f.condition()) > 0;
}

bool leaf_instance(const Program& f, const LargeProgram& leaf);

bool chain_instance(const std::vector<Program>& fs, std::size_t from, const Chain& c) {
  if (fs.size() - from != c.width()) return false;
  for (std::size_t i = 0; i < c.leaves.size(); ++i) {
    if (!leaf_instance(fs[from + 2 * i], *c.leaves[i])) return false;
    if (i < c.sets.size() && !is_test_in(fs[from + 2 * i + 1], *c.sets[i])) return false;
  }
  return true;
}

bool leaf_instance(const Program& f, const LargeProgram& leaf) {
  switch (leaf.kind()) {
    case LargeKind::Atomic:
      return f.kind() == ProgramKind::Atomic && f.name() == leaf.name();
    case LargeKind::Test:
      return is_test_in(f, leaf.tests());
    case LargeKind::Inter:
      return f.kind() == ProgramKind::Inter && is_instance(f.lhs(), leaf.lhs()) && is_instance(f.rhs(), leaf.rhs());
    case LargeKind::SeqTest:
      break;
  }
  return false;
}

void enumerate_chain(const Chain& c, std::size_t pos, std::vector<Program>& prefix, std::vector<Program>& out);

std::vector<Program> leaf_instances(const LargeProgram& leaf) {
  std::vector<Program> out;
  switch (leaf.kind()) {
    case LargeKind::Atomic:
      out.push_back(Program::atomic(leaf.name()));
      break;
    case LargeKind::Test:
      for (const auto& f : leaf.tests()) out.push_back(Program::test(f));
      break;
    case LargeKind::Inter:
      for (const auto& x : enumerate_instances(leaf.lhs()))
        for (const auto& y : enumerate_instances(leaf.rhs())) out.push_back(Program::inter(x, y));
      break;
    case LargeKind::SeqTest:
      break;
  }
  return out;
}

void enumerate_chain(const Chain& c, std::size_t pos, std::vector<Program>& prefix, std::vector<Program>& out) {
  if (pos == c.width()) {
    out.push_back(fold(prefix, 0, prefix.size()));
    return;
  }
  std::vector<Program> options;
  if (pos % 2 == 0) {
    options = leaf_instances(*c.leaves[pos / 2]);
  } else {
    for (const auto& f : *c.sets[pos / 2]) options.push_back(Program::test(f));
  }
  for (const auto& o : options) {
    prefix.push_back(o);
    enumerate_chain(c, pos + 1, prefix, out);
    prefix.pop_back();
  }
}

LargeProgram lift_chain(const std::vector<Program>& fs);

LargeProgram lift_factor(const Program& f) {
  switch (f.kind()) {
    case ProgramKind::Atomic:
      return LargeProgram::atomic(f.name());
    case ProgramKind::Inter:
      return LargeProgram::inter(lift(f.lhs()), lift(f.rhs()));
    case ProgramKind::Union:
      throw LiftError("union is not allowed in large programs: " + render(f));
    case ProgramKind::Test:
      throw LiftError("test outside an interior sequence position: " + render(f));
    case ProgramKind::Seq:
      break;
  }
  throw LiftError("unexpected sequence");
}

LargeProgram lift_chain(const std::vector<Program>& fs) {
  if (fs.size() % 2 == 0) {
    for (std::size_t i = 0; i + 1 < fs.size(); ++i)
      if (fs[i].kind() != ProgramKind::Test && fs[i + 1].kind() != ProgramKind::Test)
        throw LiftError("adjacent programs " + render(fs[i]) + " and " + render(fs[i + 1]) +
                        " need a test between them (pad with true?)");
    throw LiftError("sequence must alternate programs and tests, starting and ending with a program");
  }
  LargeProgram out = lift_factor(fs[0]);
  for (std::size_t i = 1; i < fs.size(); i += 2) {
    if (fs[i].kind() != ProgramKind::Test) {
      throw LiftError("adjacent programs " + render(fs[i - 1]) + " and " + render(fs[i]) +
                      " need a test between them (pad with true?)");
    }
    out = LargeProgram::seq_test(std::move(out), {fs[i].condition()}, lift_factor(fs[i + 1]));
  }
  return out;
}

// [P]~psi, i.e. ~<P>~~psi: returns (P, psi).
std::optional<std::pair<Program, Formula>> box_not(const Formula& m) {
  if (m.kind() != FormulaKind::Not || m.operand().kind() != FormulaKind::Diamond) return std::nullopt;
  const Formula& body = m.operand().body();
  if (body.kind() != FormulaKind::Not || body.operand().kind() != FormulaKind::Not) return std::nullopt;
  return std::make_pair(m.operand().program(), body.operand().operand());
}

// [P]f, i.e. ~<P>~f: returns (P, f).
std::optional<std::pair<Program, Formula>> box_of(const Formula& m) {
  if (m.kind() != FormulaKind::Not || m.operand().kind() != FormulaKind::Diamond) return std::nullopt;
  const Formula& body = m.operand().body();
  if (body.kind() != FormulaKind::Not) return std::nullopt;
  return std::make_pair(m.operand().program(), body.operand());
}

struct Labels {
  FormulaSet left;
  FormulaSet right;
  std::optional<Path> left_source;  // SeqTest occurrence providing `left`; none for the top
  std::optional<Path> right_source;
};

void label(const LargeProgram& l, const Path& at, Labels lab, std::map<Path, Labels>& out) {
  out[at] = lab;
  if (l.kind() == LargeKind::Inter) {
    for (std::uint8_t i = 0; i < 2; ++i) {
      Path p = at;
      p.push_back(i);
      label(l.parts()[i], p, lab, out);
    }
  } else if (l.kind() == LargeKind::SeqTest) {
    Path p0 = at;
    p0.push_back(0);
    label(l.lhs(), p0, Labels{lab.left, l.tests(), lab.left_source, at}, out);
    Path p1 = at;
    p1.push_back(1);
    label(l.rhs(), p1, Labels{l.tests(), lab.right, at, lab.right_source}, out);
  }
}

std::map<Path, Labels> labels(const LargeProgram& l, const FormulaSet& left, const FormulaSet& right) {
  std::map<Path, Labels> out;
  label(l, {}, Labels{left, right, std::nullopt, std::nullopt}, out);
  return out;
}

const LargeProgram& node_at(const LargeProgram& l, const Path& p) {
  const LargeProgram* cur = &l;
  for (auto i : p) cur = &cur->parts().at(i);
  return *cur;
}

Program loop_of(const std::vector<Program>& fs) { return loop(fold(fs, 0, fs.size())); }

std::string render_set(const FormulaSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& f : s) {
    if (!first) out += ", ";
    first = false;
    out += render(f);
  }
  return out + "}";
}

std::string render_in(const LargeProgram& l, bool in_inter) {
  switch (l.kind()) {
    case LargeKind::Atomic:
      return l.name();
    case LargeKind::Test:
      return render_set(l.tests()) + "?";
    case LargeKind::Inter: {
      std::string s = render_in(l.lhs(), true) + " & " + render_in(l.rhs(), true);
      return in_inter ? "(" + s + ")" : s;
    }
    case LargeKind::SeqTest: {
      std::string s = render_in(l.lhs(), false) + ";" + render_set(l.tests()) + "?;" + render_in(l.rhs(), false);
      return in_inter ? "(" + s + ")" : s;
    }
  }
  return {};
}

}  // namespace

LargeProgram lift(const Program& a) { return lift_chain(factors(a)); }

LargeLoop lift_loop(const Program& a) {
  const Program* body = loop_body(a);
  if (!body) throw LiftError("not a loop: " + render(a));
  return LargeLoop{lift(*body)};
}

bool is_instance(const Program& a, const LargeProgram& l) { return chain_instance(factors(a), 0, chain(l)); }

bool is_instance(const Program& a, const LargeLoop& l) {
  const Program* body = loop_body(a);
  return body && is_instance(*body, l.body);
}

std::vector<Program> enumerate_instances(const LargeProgram& l) {
  std::vector<Program> out;
  std::vector<Program> prefix;
  enumerate_chain(chain(l), 0, prefix, out);
  return out;
}

bool leq(const LargeProgram& l1, const LargeProgram& l2) {
  const Chain c1 = chain(l1);
  const Chain c2 = chain(l2);
  if (c1.width() != c2.width()) return false;
  for (std::size_t i = 0; i < c1.sets.size(); ++i)
    if (!std::includes(c2.sets[i]->begin(), c2.sets[i]->end(), c1.sets[i]->begin(), c1.sets[i]->end()))
      return false;
  for (std::size_t i = 0; i < c1.leaves.size(); ++i) {
    const LargeProgram& x = *c1.leaves[i];
    const LargeProgram& y = *c2.leaves[i];
    if (x.kind() != y.kind()) return false;
    switch (x.kind()) {
      case LargeKind::Atomic:
        if (x.name() != y.name()) return false;
        break;
      case LargeKind::Test:
        if (!std::includes(y.tests().begin(), y.tests().end(), x.tests().begin(), x.tests().end())) return false;
        break;
      case LargeKind::Inter:
        if (!leq(x.lhs(), y.lhs()) || !leq(x.rhs(), y.rhs())) return false;
        break;
      case LargeKind::SeqTest:
        return false;
    }
  }
  return true;
}

std::map<Path, LargeProgram> occurrences(const LargeProgram& l) {
  std::map<Path, LargeProgram> out;
  std::vector<std::pair<Path, const LargeProgram*>> todo{{{}, &l}};
  while (!todo.empty()) {
    auto [p, node] = todo.back();
    todo.pop_back();
    out.emplace(p, *node);
    for (std::uint8_t i = 0; i < node->parts().size(); ++i) {
      Path q = p;
      q.push_back(i);
      todo.emplace_back(q, &node->parts()[i]);
    }
  }
  return out;
}

std::map<Path, std::pair<FormulaSet, FormulaSet>> left_right_sets(const LabelledTransition& t) {
  std::map<Path, std::pair<FormulaSet, FormulaSet>> out;
  for (auto& [p, lab] : labels(t.program, t.left, t.right)) out.emplace(p, std::make_pair(lab.left, lab.right));
  return out;
}

std::map<Path, std::pair<LargeProgram, LargeProgram>> loop_left_right_programs(const LargeLoop& l,
                                                                               const FormulaSet& phi) {
  std::map<Path, std::pair<LargeProgram, LargeProgram>> out;
  const LargeProgram top = LargeProgram::test({verum()});
  // Labels are keyed by path, and a source is always a proper prefix of the
  // node, so map order visits sources first.
  for (const auto& [p, lab] : labels(l.body, phi, phi)) {
    const LargeProgram& node = node_at(l.body, p);
    if (node.kind() != LargeKind::SeqTest) continue;
    const LargeProgram& lp_src = lab.left_source ? out.at(*lab.left_source).first : top;
    const LargeProgram& rp_src = lab.right_source ? out.at(*lab.right_source).second : top;
    LargeProgram lp = LargeProgram::seq_test(lp_src, lab.left, node.lhs());
    LargeProgram rp = LargeProgram::seq_test(node.rhs(), lab.right, rp_src);
    out.emplace(p, std::make_pair(std::move(lp), std::move(rp)));
  }
  return out;
}

bool is_consistent_transition(const LabelledTransition& t) {
  for (const auto& [p, lab] : labels(t.program, t.left, t.right)) {
    const LargeProgram& node = node_at(t.program, p);
    for (const auto& m : lab.left) {
      auto bn = box_not(m);
      if (bn && lab.right.count(bn->second) && is_instance(bn->first, node)) return false;
    }
  }
  return true;
}

bool is_consistent_loop(const LargeLoop& l, const FormulaSet& phi) {
  if (!is_consistent_transition(LabelledTransition{phi, l.body, phi})) return false;
  if (phi.empty()) return true;
  for (const auto& [p, progs] : loop_left_right_programs(l, phi)) {
    const auto& [lp, rp] = progs;
    const std::size_t k = chain(rp).width();
    for (const auto& m : node_at(l.body, p).tests()) {
      auto b = box_of(m);
      if (!b || b->second != Formula::falsum()) continue;
      const Program* body = loop_body(b->first);
      if (!body) continue;
      const auto fs = factors(*body);
      if (fs.size() <= k + 1) continue;
      if (fs[k].kind() != ProgramKind::Test || !phi.count(fs[k].condition())) continue;
      if (is_instance(fold(fs, 0, k), rp) && is_instance(fold(fs, k + 1, fs.size()), lp)) return false;
    }
  }
  return true;
}

std::map<Path, FormulaSet> saturation_gap(const LabelledTransition& t) {
  std::map<Path, FormulaSet> out;
  for (const auto& [p, lab] : labels(t.program, t.left, t.right)) {
    const LargeProgram& node = node_at(t.program, p);
    if (node.kind() != LargeKind::SeqTest) continue;
    FormulaSet need;
    for (const auto& m : lab.left) {
      auto b = box_of(m);
      if (b && is_instance(b->first, node.lhs())) need.insert(b->second);
    }
    for (const auto& b2 : enumerate_instances(node.rhs()))
      for (const auto& psi : lab.right) need.insert(Formula::diamond(b2, psi));
    FormulaSet missing;
    for (const auto& f : need)
      if (!node.tests().count(f)) missing.insert(f);
    if (!missing.empty()) out.emplace(p, std::move(missing));
  }
  return out;
}

std::map<Path, FormulaSet> loop_saturation_gap(const LargeLoop& l, const FormulaSet& phi) {
  auto out = saturation_gap(LabelledTransition{phi, l.body, phi});
  if (phi.empty()) return out;
  for (const auto& [p, progs] : loop_left_right_programs(l, phi)) {
    const FormulaSet& x = node_at(l.body, p).tests();
    for (const auto& b1 : enumerate_instances(progs.first)) {
      for (const auto& b2 : enumerate_instances(progs.second)) {
        for (const auto& f : phi) {
          std::vector<Program> fs = factors(b1);
          fs.push_back(Program::test(f));
          for (const auto& g : factors(b2)) fs.push_back(g);
          const Formula need = Formula::diamond(loop_of(fs), verum());
          if (!x.count(need)) out[p].insert(need);
        }
      }
    }
  }
  return out;
}

std::string render(const LargeProgram& l) { return render_in(l, false); }

FormulaSet formula_set_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("formula set must be a JSON array of strings");
  FormulaSet out;
  for (const auto& s : j) out.insert(parse_formula(s.get<std::string>()));
  return out;
}

nlohmann::json to_json(const FormulaSet& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : s) out.push_back(render(f));
  return out;
}

LargeProgram large_from_json(const nlohmann::json& j) {
  if (j.is_string()) return lift(parse_program(j.get<std::string>()));
  if (!j.is_object() || j.size() != 1) throw std::invalid_argument("large program: expected a string or a one-key object");
  if (j.contains("atomic")) return LargeProgram::atomic(j.at("atomic").get<std::string>());
  if (j.contains("inter")) {
    const auto& a = j.at("inter");
    if (!a.is_array() || a.size() != 2) throw std::invalid_argument("large program: inter needs two operands");
    return LargeProgram::inter(large_from_json(a[0]), large_from_json(a[1]));
  }
  if (j.contains("seq")) {
    const auto& a = j.at("seq");
    if (!a.is_array() || a.size() != 3) throw std::invalid_argument("large program: seq needs [program, tests, program]");
    return LargeProgram::seq_test(large_from_json(a[0]), formula_set_from_json(a[1]), large_from_json(a[2]));
  }
  if (j.contains("test")) return LargeProgram::test(formula_set_from_json(j.at("test")));
  throw std::invalid_argument("large program: unknown key " + j.begin().key());
}

nlohmann::json to_json(const LargeProgram& l) {
  switch (l.kind()) {
    case LargeKind::Atomic:
      return {{"atomic", l.name()}};
    case LargeKind::Inter:
      return {{"inter", {to_json(l.lhs()), to_json(l.rhs())}}};
    case LargeKind::SeqTest:
      return {{"seq", {to_json(l.lhs()), to_json(l.tests()), to_json(l.rhs())}}};
    case LargeKind::Test:
      return {{"test", to_json(l.tests())}};
  }
  return {};
}

LabelledTransition transition_from_json(const nlohmann::json& j) {
  return LabelledTransition{formula_set_from_json(j.at("left")), large_from_json(j.at("program")),
                            formula_set_from_json(j.at("right"))};
}

nlohmann::json to_json(const LabelledTransition& t) {
  return {{"left", to_json(t.left)}, {"program", to_json(t.program)}, {"right", to_json(t.right)}};
}

}  // namespace pdl
