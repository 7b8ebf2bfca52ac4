#include "pdlkit/substitution.hpp"

#include <stdexcept>

namespace pdl {

std::string to_string(const Path& path) {
  if (path.empty()) return "root";
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(path[i]);
  }
  return s;
}

Path path_from_string(const std::string& text) {
  Path p;
  if (text == "root" || text.empty()) return p;
  for (char c : text) {
    if (c == '.') continue;
    if (c != '0' && c != '1') throw std::invalid_argument("bad path '" + text + "'");
    p.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return p;
}

namespace {

Term child(const Term& t, std::uint8_t i) {
  if (const auto* f = std::get_if<Formula>(&t)) {
    switch (f->kind()) {
      case FormulaKind::Not:
        if (i == 0) return f->operand();
        break;
      case FormulaKind::Or:
        if (i == 0) return f->lhs();
        if (i == 1) return f->rhs();
        break;
      case FormulaKind::Diamond:
        if (i == 0) return f->program();
        if (i == 1) return f->body();
        break;
      default:
        break;
    }
  } else {
    const auto& p = std::get<Program>(t);
    switch (p.kind()) {
      case ProgramKind::Test:
        if (i == 0) return p.condition();
        break;
      case ProgramKind::Seq:
      case ProgramKind::Union:
      case ProgramKind::Inter:
        if (i == 0) return p.lhs();
        if (i == 1) return p.rhs();
        break;
      default:
        break;
    }
  }
  throw std::out_of_range("path leaves the term");
}

Term with_child(const Term& t, std::uint8_t i, const Term& c) {
  auto as_f = [&]() -> const Formula& {
    if (!std::holds_alternative<Formula>(c)) throw std::invalid_argument("sort mismatch in replace_at");
    return std::get<Formula>(c);
  };
  auto as_p = [&]() -> const Program& {
    if (!std::holds_alternative<Program>(c)) throw std::invalid_argument("sort mismatch in replace_at");
    return std::get<Program>(c);
  };
  if (const auto* f = std::get_if<Formula>(&t)) {
    switch (f->kind()) {
      case FormulaKind::Not:
        return Formula::negation(as_f());
      case FormulaKind::Or:
        return i == 0 ? Formula::disjunction(as_f(), f->rhs()) : Formula::disjunction(f->lhs(), as_f());
      case FormulaKind::Diamond:
        return i == 0 ? Formula::diamond(as_p(), f->body()) : Formula::diamond(f->program(), as_f());
      default:
        break;
    }
  } else {
    const auto& p = std::get<Program>(t);
    switch (p.kind()) {
      case ProgramKind::Test:
        return Program::test(as_f());
      case ProgramKind::Seq:
        return i == 0 ? Program::seq(as_p(), p.rhs()) : Program::seq(p.lhs(), as_p());
      case ProgramKind::Union:
        return i == 0 ? Program::choice(as_p(), p.rhs()) : Program::choice(p.lhs(), as_p());
      case ProgramKind::Inter:
        return i == 0 ? Program::inter(as_p(), p.rhs()) : Program::inter(p.lhs(), as_p());
      default:
        break;
    }
  }
  throw std::out_of_range("path leaves the term");
}

Term replace_from(const Term& t, const Path& path, std::size_t depth, const Term& r) {
  if (depth == path.size()) {
    if (t.index() != r.index()) throw std::invalid_argument("sort mismatch in replace_at");
    return r;
  }
  Term c = child(t, path[depth]);
  return with_child(t, path[depth], replace_from(c, path, depth + 1, r));
}

}  // namespace

Term subterm_at(const Term& root, const Path& path) {
  Term t = root;
  for (auto i : path) t = child(t, i);
  return t;
}

Term replace_at(const Term& root, const Path& path, const Term& replacement) {
  return replace_from(root, path, 0, replacement);
}

Formula usub(const Formula& f, const Formula& r, const std::string& p) {
  switch (f.kind()) {
    case FormulaKind::False:
      return f;
    case FormulaKind::Prop:
      return f.name() == p ? r : f;
    case FormulaKind::Not:
      return Formula::negation(usub(f.operand(), r, p));
    case FormulaKind::Or:
      return Formula::disjunction(usub(f.lhs(), r, p), usub(f.rhs(), r, p));
    case FormulaKind::Diamond:
      return Formula::diamond(usub(f.program(), r, p), usub(f.body(), r, p));
  }
  return f;
}

Program usub(const Program& a, const Formula& r, const std::string& p) {
  switch (a.kind()) {
    case ProgramKind::Atomic:
      return a;
    case ProgramKind::Test:
      return Program::test(usub(a.condition(), r, p));
    case ProgramKind::Seq:
      return Program::seq(usub(a.lhs(), r, p), usub(a.rhs(), r, p));
    case ProgramKind::Union:
      return Program::choice(usub(a.lhs(), r, p), usub(a.rhs(), r, p));
    case ProgramKind::Inter:
      return Program::inter(usub(a.lhs(), r, p), usub(a.rhs(), r, p));
  }
  return a;
}

namespace {

void collect(const Formula& f, const Program& old, bool negative, Path& path,
             std::vector<Occurrence>& out) {
  switch (f.kind()) {
    case FormulaKind::False:
    case FormulaKind::Prop:
      return;
    case FormulaKind::Not:
      path.push_back(0);
      collect(f.operand(), old, !negative, path, out);
      path.pop_back();
      return;
    case FormulaKind::Or:
      path.push_back(0);
      collect(f.lhs(), old, negative, path, out);
      path.back() = 1;
      collect(f.rhs(), old, negative, path, out);
      path.pop_back();
      return;
    case FormulaKind::Diamond:
      if (f.program() == old)
        out.push_back({path, negative ? Polarity::Negative : Polarity::Positive});
      path.push_back(1);
      collect(f.body(), old, negative, path, out);
      path.pop_back();
      return;
  }
}

Formula rewrite(const Formula& f, const Program& old, const Program& rep, bool negative) {
  switch (f.kind()) {
    case FormulaKind::False:
    case FormulaKind::Prop:
      return f;
    case FormulaKind::Not:
      return Formula::negation(rewrite(f.operand(), old, rep, !negative));
    case FormulaKind::Or:
      return Formula::disjunction(rewrite(f.lhs(), old, rep, negative),
                                  rewrite(f.rhs(), old, rep, negative));
    case FormulaKind::Diamond: {
      Formula body = rewrite(f.body(), old, rep, negative);
      const Program& prog = (!negative && f.program() == old) ? rep : f.program();
      return Formula::diamond(prog, body);
    }
  }
  return f;
}

}  // namespace

std::vector<Occurrence> polarity_of_occurrences(const Formula& f, const Program& old) {
  std::vector<Occurrence> out;
  Path path;
  collect(f, old, false, path, out);
  return out;
}

Formula psub(const Formula& f, const Program& old, const Program& replacement) {
  return rewrite(f, old, replacement, false);
}

}  // namespace pdl
