#include "pdlkit/semantics.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>

#include "pdlkit/parser.hpp"

namespace pdl {

// ---------------------------------------------------------------------------
// Relation

Relation Relation::identity(std::size_t n, Mask domain) {
  Relation r(n);
  for (World w = 0; w < n; ++w)
    if ((domain >> w) & 1U) r.succ_[w] = bit(w);
  return r;
}

bool Relation::empty() const {
  return std::all_of(succ_.begin(), succ_.end(), [](Mask m) { return m == 0; });
}

std::size_t Relation::count() const {
  std::size_t c = 0;
  for (Mask m : succ_) c += static_cast<std::size_t>(std::popcount(m));
  return c;
}

std::vector<std::pair<World, World>> Relation::pairs() const {
  std::vector<std::pair<World, World>> out;
  for (World u = 0; u < succ_.size(); ++u)
    for (Mask m = succ_[u]; m; m &= m - 1) out.emplace_back(u, std::countr_zero(m));
  return out;
}

Relation Relation::compose(const Relation& other) const {
  Relation r(size());
  for (World u = 0; u < size(); ++u) {
    Mask acc = 0;
    for (Mask m = succ_[u]; m; m &= m - 1) acc |= other.succ_[std::countr_zero(m)];
    r.succ_[u] = acc;
  }
  return r;
}

Relation Relation::operator|(const Relation& other) const {
  Relation r(size());
  for (World u = 0; u < size(); ++u) r.succ_[u] = succ_[u] | other.succ_[u];
  return r;
}

Relation Relation::operator&(const Relation& other) const {
  Relation r(size());
  for (World u = 0; u < size(); ++u) r.succ_[u] = succ_[u] & other.succ_[u];
  return r;
}

bool Relation::subset_of(const Relation& other) const {
  for (World u = 0; u < size(); ++u)
    if (succ_[u] & ~other.succ_[u]) return false;
  return true;
}

Mask Relation::preimage(Mask targets) const {
  Mask out = 0;
  for (World u = 0; u < size(); ++u)
    if (succ_[u] & targets) out |= bit(u);
  return out;
}

// ---------------------------------------------------------------------------
// KripkeStructure

KripkeStructure::KripkeStructure(std::vector<std::string> worlds, const Vocabulary& vocab)
    : worlds_(std::move(worlds)) {
  if (worlds_.size() > kMaxWorlds)
    throw SemanticError("structures are limited to " + std::to_string(kMaxWorlds) + " worlds");
  for (World i = 0; i < worlds_.size(); ++i)
    if (!index_.emplace(worlds_[i], i).second)
      throw SemanticError("duplicate world '" + worlds_[i] + "'");
  vocab.validate();
  extend_vocabulary(vocab);
}

World KripkeStructure::world(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw SemanticError("unknown world '" + name + "'");
  return it->second;
}

Vocabulary KripkeStructure::vocabulary() const {
  Vocabulary v;
  for (const auto& [p, _] : valuation_) v.props.insert(p);
  for (const auto& [a, _] : edges_) v.programs.insert(a);
  return v;
}

Mask KripkeStructure::valuation(const std::string& p) const {
  auto it = valuation_.find(p);
  if (it == valuation_.end()) throw SemanticError("unknown proposition '" + p + "'");
  return it->second;
}

const Relation& KripkeStructure::edges(const std::string& a) const {
  auto it = edges_.find(a);
  if (it == edges_.end()) throw SemanticError("unknown program '" + a + "'");
  return it->second;
}

void KripkeStructure::set_valuation(const std::string& p, Mask worlds) {
  if (edges_.count(p)) throw SemanticError("'" + p + "' is already a program");
  valuation_[p] = worlds & all_worlds(size());
}

void KripkeStructure::set_true(const std::string& p, World w) {
  if (w >= size()) throw SemanticError("world index out of range");
  set_valuation(p, (valuation_.count(p) ? valuation_[p] : 0) | bit(w));
}

void KripkeStructure::set_edges(const std::string& a, Relation r) {
  if (valuation_.count(a)) throw SemanticError("'" + a + "' is already a proposition");
  if (r.size() != size()) throw SemanticError("relation size does not match the structure");
  edges_[a] = std::move(r);
}

void KripkeStructure::add_edge(const std::string& a, World u, World v) {
  if (u >= size() || v >= size()) throw SemanticError("world index out of range");
  if (valuation_.count(a)) throw SemanticError("'" + a + "' is already a proposition");
  auto it = edges_.try_emplace(a, Relation(size())).first;
  it->second.insert(u, v);
}

void KripkeStructure::extend_vocabulary(const Vocabulary& vocab) {
  for (const auto& p : vocab.props) {
    if (edges_.count(p)) throw SemanticError("'" + p + "' is already a program");
    valuation_.try_emplace(p, 0);
  }
  for (const auto& a : vocab.programs) {
    if (valuation_.count(a)) throw SemanticError("'" + a + "' is already a proposition");
    edges_.try_emplace(a, Relation(size()));
  }
}

KripkeStructure KripkeStructure::restrict_to(Mask keep, std::vector<World>* renumber) const {
  std::vector<World> map(size(), static_cast<World>(-1));
  std::vector<std::string> names;
  for (World w = 0; w < size(); ++w)
    if ((keep >> w) & 1U) {
      map[w] = names.size();
      names.push_back(worlds_[w]);
    }
  KripkeStructure out(names, vocabulary());
  for (const auto& [p, m] : valuation_) {
    Mask nm = 0;
    for (World w = 0; w < size(); ++w)
      if (((m & keep) >> w) & 1U) nm |= bit(map[w]);
    out.valuation_[p] = nm;
  }
  for (const auto& [a, r] : edges_)
    for (auto [u, v] : r.pairs())
      if (((keep >> u) & 1U) && ((keep >> v) & 1U)) out.edges_[a].insert(map[u], map[v]);
  if (renumber) *renumber = std::move(map);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Mask Evaluator::extension(const Formula& f) {
  auto it = ext_memo_.find(f);
  if (it != ext_memo_.end()) return it->second;
  const Mask all = all_worlds(k_->size());
  Mask m = 0;
  switch (f.kind()) {
    case FormulaKind::False:
      m = 0;
      break;
    case FormulaKind::Prop:
      m = k_->valuation(f.name());
      break;
    case FormulaKind::Not:
      m = all & ~extension(f.operand());
      break;
    case FormulaKind::Or:
      m = extension(f.lhs()) | extension(f.rhs());
      break;
    case FormulaKind::Diamond: {
      Mask body = extension(f.body());
      m = relation(f.program()).preimage(body);
      break;
    }
  }
  ext_memo_.emplace(f, m);
  return m;
}

const Relation& Evaluator::relation(const Program& p) {
  auto it = rel_memo_.find(p);
  if (it != rel_memo_.end()) return it->second;
  Relation r;
  switch (p.kind()) {
    case ProgramKind::Atomic:
      r = k_->edges(p.name());
      break;
    case ProgramKind::Test:
      r = Relation::identity(k_->size(), extension(p.condition()));
      break;
    case ProgramKind::Seq:
      r = relation(p.lhs()).compose(relation(p.rhs()));
      break;
    case ProgramKind::Union:
      r = relation(p.lhs()) | relation(p.rhs());
      break;
    case ProgramKind::Inter:
      r = relation(p.lhs()) & relation(p.rhs());
      break;
  }
  return rel_memo_.emplace(p, std::move(r)).first->second;
}

bool eval(const KripkeStructure& k, World u, const Formula& f) {
  if (u >= k.size()) throw SemanticError("world index out of range");
  return Evaluator(k).eval(u, f);
}

bool eval(const KripkeStructure& k, const std::string& world, const Formula& f) {
  return eval(k, k.world(world), f);
}

Relation relation(const KripkeStructure& k, const Program& p) { return Evaluator(k).relation(p); }

// ---------------------------------------------------------------------------
// Witness graphs

bool WitnessGraph::contains(const WitnessGraph& other) const {
  return (other.nodes & ~nodes) == 0 &&
         std::includes(edges.begin(), edges.end(), other.edges.begin(), other.edges.end());
}

namespace {

// Edge sets as one successor mask per (program, world) slot.
struct RawGraph {
  Mask nodes = 0;
  std::vector<Mask> edges;
  friend bool operator==(const RawGraph&, const RawGraph&) = default;
  friend bool operator<(const RawGraph& a, const RawGraph& b) {
    if (a.nodes != b.nodes) return a.nodes < b.nodes;
    return a.edges < b.edges;
  }
};

class Enumerator {
 public:
  Enumerator(const KripkeStructure& k, std::size_t cap) : k_(k), ev_(k), cap_(cap) {
    for (const auto& [a, r] : k.all_edges()) {
      prog_index_.emplace(a, names_.size());
      names_.push_back(a);
      allowed_.insert(allowed_.end(), r.size(), 0);
      for (World u = 0; u < r.size(); ++u) allowed_[(names_.size() - 1) * k.size() + u] = r.successors(u);
    }
    allowed_nodes_ = all_worlds(k.size());
  }

  // Restricts the enumeration to the nodes and edges of g.
  void restrict_to(const WitnessGraph& g) {
    allowed_nodes_ = g.nodes;
    std::fill(allowed_.begin(), allowed_.end(), 0);
    for (const auto& e : g.edges) {
      auto it = prog_index_.find(e.program);
      if (it == prog_index_.end()) continue;
      allowed_[it->second * k_.size() + e.from] |= bit(e.to);
    }
  }

  const std::vector<RawGraph>& run(const Program& p, World u, World v) {
    Key key{p.identity(), u, v};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<RawGraph> out;
    if (((allowed_nodes_ >> u) & 1U) && ((allowed_nodes_ >> v) & 1U)) out = compute(p, u, v);
    return memo_.emplace(key, std::move(out)).first->second;
  }

  bool truncated() const { return truncated_; }

  WitnessGraph to_graph(const RawGraph& r, World u, World v) const {
    WitnessGraph g;
    g.nodes = r.nodes;
    g.source = u;
    g.target = v;
    const std::size_t n = k_.size();
    for (std::size_t i = 0; i < names_.size(); ++i)
      for (World x = 0; x < n; ++x)
        for (Mask m = r.edges[i * n + x]; m; m &= m - 1)
          g.edges.insert({x, names_[i], static_cast<World>(std::countr_zero(m))});
    return g;
  }

  RawGraph from_graph(const WitnessGraph& g) const {
    RawGraph r = empty();
    r.nodes = g.nodes;
    for (const auto& e : g.edges) {
      auto it = prog_index_.find(e.program);
      if (it != prog_index_.end()) r.edges[it->second * k_.size() + e.from] |= bit(e.to);
    }
    return r;
  }

 private:
  struct Key {
    const void* id;
    World u, v;
    friend bool operator<(const Key& a, const Key& b) {
      return std::tie(a.id, a.u, a.v) < std::tie(b.id, b.u, b.v);
    }
  };

  RawGraph empty() const { return RawGraph{0, std::vector<Mask>(allowed_.size(), 0)}; }

  static RawGraph merge(const RawGraph& a, const RawGraph& b) {
    RawGraph r = a;
    r.nodes |= b.nodes;
    for (std::size_t i = 0; i < r.edges.size(); ++i) r.edges[i] |= b.edges[i];
    return r;
  }

  void add(std::vector<RawGraph>& out, RawGraph g) {
    if (std::find(out.begin(), out.end(), g) != out.end()) return;
    if (out.size() >= cap_) {
      truncated_ = true;
      return;
    }
    out.push_back(std::move(g));
  }

  std::vector<RawGraph> compute(const Program& p, World u, World v) {
    std::vector<RawGraph> out;
    switch (p.kind()) {
      case ProgramKind::Atomic: {
        auto it = prog_index_.find(p.name());
        if (it == prog_index_.end()) throw SemanticError("unknown program '" + p.name() + "'");
        std::size_t slot = it->second * k_.size() + u;
        if ((allowed_[slot] >> v) & 1U) {
          RawGraph g = empty();
          g.nodes = bit(u) | bit(v);
          g.edges[slot] = bit(v);
          out.push_back(std::move(g));
        }
        break;
      }
      case ProgramKind::Test:
        if (u == v && ev_.eval(u, p.condition())) {
          RawGraph g = empty();
          g.nodes = bit(u);
          out.push_back(std::move(g));
        }
        break;
      case ProgramKind::Union: {
        for (const auto& g : run(p.lhs(), u, v)) add(out, g);
        for (const auto& g : run(p.rhs(), u, v)) add(out, g);
        break;
      }
      case ProgramKind::Inter: {
        const auto& left = run(p.lhs(), u, v);
        if (left.empty()) break;
        const auto& right = run(p.rhs(), u, v);
        for (const auto& g1 : left)
          for (const auto& g2 : right) add(out, merge(g1, g2));
        break;
      }
      case ProgramKind::Seq: {
        for (World w = 0; w < k_.size(); ++w) {
          if (!((allowed_nodes_ >> w) & 1U)) continue;
          const auto& left = run(p.lhs(), u, w);
          if (left.empty()) continue;
          const auto& right = run(p.rhs(), w, v);
          for (const auto& g1 : left)
            for (const auto& g2 : right) add(out, merge(g1, g2));
        }
        break;
      }
    }
    return out;
  }

  const KripkeStructure& k_;
  Evaluator ev_;
  std::size_t cap_;
  bool truncated_ = false;
  std::map<std::string, std::size_t> prog_index_;
  std::vector<std::string> names_;
  std::vector<Mask> allowed_;
  Mask allowed_nodes_ = 0;
  std::map<Key, std::vector<RawGraph>> memo_;
};

void check_query(const TransitionQuery& q) {
  if (!q.structure) throw std::invalid_argument("transition query without a structure");
  if (q.source >= q.structure->size() || q.target >= q.structure->size())
    throw std::invalid_argument("transition query endpoints outside the structure");
}

// Worlds reachable from `from` by paths of length >= 1 inside g, never
// entering `avoid`.
Mask reach(const WitnessGraph& g, World from, Mask avoid) {
  std::map<World, Mask> succ;
  for (const auto& e : g.edges) succ[e.from] |= bit(e.to);
  Mask seen = 0;
  Mask frontier = succ.count(from) ? succ[from] & ~avoid : 0;
  while (frontier) {
    seen |= frontier;
    Mask next = 0;
    for (Mask m = frontier; m; m &= m - 1) {
      auto it = succ.find(static_cast<World>(std::countr_zero(m)));
      if (it != succ.end()) next |= it->second;
    }
    frontier = next & ~avoid & ~seen;
  }
  return seen;
}

}  // namespace

WitnessResult witness_graphs(const TransitionQuery& q, std::size_t cap) {
  check_query(q);
  if (cap == 0) throw std::invalid_argument("witness cap must be positive");
  Enumerator en(*q.structure, cap);
  WitnessResult r;
  for (const auto& g : en.run(q.program, q.source, q.target))
    r.graphs.push_back(en.to_graph(g, q.source, q.target));
  r.truncated = en.truncated();
  return r;
}

namespace {
std::vector<WitnessGraph> witnesses_inside(const WitnessGraph& g, const TransitionQuery& q) {
  Enumerator en(*q.structure, 1U << 16);
  en.restrict_to(g);
  std::vector<WitnessGraph> out;
  for (const auto& raw : en.run(q.program, q.source, q.target))
    out.push_back(en.to_graph(raw, q.source, q.target));
  return out;
}
}  // namespace

bool is_witness(const WitnessGraph& g, const TransitionQuery& q) {
  check_query(q);
  if (g.source != q.source || g.target != q.target) return false;
  auto inside = witnesses_inside(g, q);
  return std::find(inside.begin(), inside.end(), g) != inside.end();
}

bool is_minimal_witness(const WitnessGraph& g, const TransitionQuery& q) {
  check_query(q);
  auto inside = witnesses_inside(g, q);
  if (std::find(inside.begin(), inside.end(), g) == inside.end()) return false;
  return inside.size() == 1;
}

Mask articulation_nodes(const WitnessGraph& g, World u, World w) {
  if (!((reach(g, u, 0) >> w) & 1U)) return 0;
  Mask out = 0;
  for (Mask m = g.nodes & ~bit(u) & ~bit(w); m; m &= m - 1) {
    World v = static_cast<World>(std::countr_zero(m));
    if (!((reach(g, u, bit(v)) >> w) & 1U)) out |= bit(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gateway split and loop excision

namespace {

bool is_articulation(const WitnessGraph& g, World u, World w, World v) {
  if (v == u || v == w) return false;
  return (articulation_nodes(g, u, w) >> v) & 1U;
}

std::optional<std::pair<Program, Program>> split(const KripkeStructure& k, const WitnessGraph& g,
                                                 World u, World w, World v, const Program& alpha) {
  TransitionQuery q{&k, u, alpha, w};
  switch (alpha.kind()) {
    case ProgramKind::Seq: {
      for (World m = 0; m < k.size(); ++m) {
        if (!((g.nodes >> m) & 1U)) continue;
        auto left = witnesses_inside(g, {&k, u, alpha.lhs(), m});
        if (left.empty()) continue;
        auto right = witnesses_inside(g, {&k, m, alpha.rhs(), w});
        if (right.empty()) continue;
        if (m == v) return std::make_pair(alpha.lhs(), alpha.rhs());
        for (const auto& g1 : left)
          if (is_articulation(g1, u, m, v))
            if (auto s = split(k, g1, u, m, v, alpha.lhs()))
              return std::make_pair(s->first, Program::seq(s->second, alpha.rhs()));
        for (const auto& g2 : right)
          if (is_articulation(g2, m, w, v))
            if (auto s = split(k, g2, m, w, v, alpha.rhs()))
              return std::make_pair(Program::seq(alpha.lhs(), s->first), s->second);
      }
      return std::nullopt;
    }
    case ProgramKind::Inter: {
      auto left = witnesses_inside(g, {&k, u, alpha.lhs(), w});
      auto right = witnesses_inside(g, {&k, u, alpha.rhs(), w});
      for (const auto& g1 : left) {
        if (!is_articulation(g1, u, w, v)) continue;
        auto s1 = split(k, g1, u, w, v, alpha.lhs());
        if (!s1) continue;
        for (const auto& g2 : right) {
          if (!is_articulation(g2, u, w, v)) continue;
          if (auto s2 = split(k, g2, u, w, v, alpha.rhs()))
            return std::make_pair(Program::inter(s1->first, s2->first),
                                  Program::inter(s1->second, s2->second));
        }
      }
      return std::nullopt;
    }
    default:
      (void)q;
      return std::nullopt;
  }
}

bool has_union(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Union:
      return true;
    case ProgramKind::Atomic:
    case ProgramKind::Test:
      return false;
    default:
      return has_union(p.lhs()) || has_union(p.rhs());
  }
}

void flatten_seq(const Program& p, std::vector<Program>& out) {
  if (p.kind() == ProgramKind::Seq) {
    flatten_seq(p.lhs(), out);
    flatten_seq(p.rhs(), out);
  } else {
    out.push_back(p);
  }
}

bool forward(const Program& p);

bool cyclic(const Program& p) {
  if (p.kind() == ProgramKind::Test) return true;
  if (p.kind() != ProgramKind::Inter) return false;
  return (forward(p.lhs()) && p.rhs().kind() == ProgramKind::Test) ||
         (p.lhs().kind() == ProgramKind::Test && forward(p.rhs()));
}

// Forw, with true? padding between adjacent forward factors optional.
bool forward(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Atomic:
      return true;
    case ProgramKind::Inter:
      return forward(p.lhs()) && forward(p.rhs());
    case ProgramKind::Seq: {
      std::vector<Program> fs;
      flatten_seq(p, fs);
      if (!forward(fs.front()) || !forward(fs.back())) return false;
      for (std::size_t i = 1; i + 1 < fs.size(); ++i) {
        if (forward(fs[i])) continue;
        if (!cyclic(fs[i]) || !forward(fs[i + 1])) return false;
      }
      return true;
    }
    default:
      return false;
  }
}

bool has_seq(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Seq:
      return true;
    case ProgramKind::Atomic:
    case ProgramKind::Test:
      return false;
    default:
      return has_seq(p.lhs()) || has_seq(p.rhs());
  }
}

Program chain(const std::vector<Program>& parts, std::size_t from, std::size_t to) {
  Program p = parts[from];
  for (std::size_t i = from + 1; i < to; ++i) p = Program::seq(p, parts[i]);
  return p;
}

Mask touched(const std::set<WitnessEdge>& edges) {
  Mask m = 0;
  for (const auto& e : edges) m |= bit(e.from) | bit(e.to);
  return m;
}

bool avoids(const WitnessGraph& g, const std::set<WitnessEdge>& region, Mask forbidden) {
  if (g.nodes & forbidden) return false;
  for (const auto& e : g.edges)
    if (region.count(e)) return false;
  return true;
}

std::optional<Program> excise_in(const KripkeStructure& k, const WitnessGraph& g, World u, World w,
                                 World v, const std::set<WitnessEdge>& region,
                                 const Program& alpha) {
  std::vector<Program> parts;
  flatten_seq(alpha, parts);
  const Mask forbidden = touched(region) & ~bit(v);
  Evaluator ev(k);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    Program g1 = chain(parts, 0, i);
    if (!ev.relation(g1).contains(u, v)) continue;
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      Program beta = chain(parts, i, j);
      Program g2 = chain(parts, j, parts.size());
      if (!ev.relation(beta).contains(v, v) || !ev.relation(g2).contains(v, w)) continue;
      auto lw = witnesses_inside(g, {&k, u, g1, v});
      auto rw = witnesses_inside(g, {&k, v, g2, w});
      bool left_ok = std::any_of(lw.begin(), lw.end(), [&](const auto& x) { return avoids(x, region, forbidden); });
      bool right_ok = std::any_of(rw.begin(), rw.end(), [&](const auto& x) { return avoids(x, region, forbidden); });
      if (!left_ok || !right_ok) continue;
      Program test = Program::test(Formula::diamond(loop(beta), verum()));
      return Program::seq(Program::seq(g1, test), g2);
    }
  }
  return std::nullopt;
}

}  // namespace

std::pair<Program, Program> gateway_split(const KripkeStructure& k, const WitnessGraph& g, World u,
                                          World w, World v, const Program& alpha) {
  TransitionQuery q{&k, u, alpha, w};
  check_query(q);
  if (!forward(alpha) || !has_seq(alpha))
    throw PreconditionError("gateway split needs a forward program with at least one sequence");
  if (!is_minimal_witness(g, q)) throw PreconditionError("not a minimal witness graph for the transition");
  if (!is_articulation(g, u, w, v)) throw PreconditionError("split node is not an articulation node");
  auto s = split(k, g, u, w, v, alpha);
  if (!s) throw PreconditionError("no gateway split exists for this program at the given node");
  return *s;
}

Program excise_loop(const KripkeStructure& k, const WitnessGraph& g, World u, World w, World v,
                    const std::set<WitnessEdge>& region_edges, const Program& alpha) {
  TransitionQuery q{&k, u, alpha, w};
  check_query(q);
  if (region_edges.empty()) throw PreconditionError("the loop region must contain at least one edge");
  for (const auto& e : region_edges)
    if (!g.edges.count(e)) throw PreconditionError("region edge outside the witness graph");
  if (!is_witness(g, q)) throw PreconditionError("not a witness graph for the transition");
  // v must occur before and after every region edge on every u-w path.
  for (const auto& e : region_edges) {
    bool before = e.from == v || (e.from != u && !((reach(g, u, bit(v)) >> e.from) & 1U));
    bool after = e.to == v || (e.to != w && !((reach(g, e.to, bit(v)) >> w) & 1U));
    if (!before || !after)
      throw PreconditionError("a path reaches a region edge without passing the loop node");
  }
  if (auto r = excise_in(k, g, u, w, v, region_edges, alpha)) return *r;
  if (!has_union(alpha) && is_articulation(g, u, w, v) && is_minimal_witness(g, q)) {
    if (auto s = split(k, g, u, w, v, alpha))
      if (auto r = excise_in(k, g, u, w, v, region_edges, Program::seq(s->first, s->second)))
        return *r;
  }
  throw PreconditionError("the loop region cannot be separated from the rest of the program");
}

std::string to_dot(const WitnessGraph& g, const KripkeStructure& k) {
  std::ostringstream os;
  os << "digraph witness {\n";
  for (World w = 0; w < k.size(); ++w) {
    if (!((g.nodes >> w) & 1U)) continue;
    os << "  \"" << k.world_name(w) << "\"";
    if (w == g.source && w == g.target)
      os << " [shape=doublecircle,label=\"" << k.world_name(w) << " (source, target)\"]";
    else if (w == g.source)
      os << " [shape=doublecircle,label=\"" << k.world_name(w) << " (source)\"]";
    else if (w == g.target)
      os << " [shape=doublecircle,label=\"" << k.world_name(w) << " (target)\"]";
    os << ";\n";
  }
  for (const auto& e : g.edges)
    os << "  \"" << k.world_name(e.from) << "\" -> \"" << k.world_name(e.to) << "\" [label=\""
       << e.program << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace pdl
