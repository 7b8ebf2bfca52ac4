#pragma once

// Independent reference semantics: direct recursion on the inductive
// clauses, one world pair at a time, no bit masks and no memoisation.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pdlkit/semantics.hpp"

namespace pdltest {

bool holds(const pdl::KripkeStructure& k, pdl::World u, const pdl::Formula& f);

inline bool related(const pdl::KripkeStructure& k, const pdl::Program& p, pdl::World u, pdl::World v) {
  using pdl::ProgramKind;
  switch (p.kind()) {
    case ProgramKind::Atomic:
      return k.edges(p.name()).contains(u, v);
    case ProgramKind::Test:
      return u == v && holds(k, u, p.condition());
    case ProgramKind::Union:
      return related(k, p.lhs(), u, v) || related(k, p.rhs(), u, v);
    case ProgramKind::Inter:
      return related(k, p.lhs(), u, v) && related(k, p.rhs(), u, v);
    case ProgramKind::Seq:
      for (pdl::World w = 0; w < k.size(); ++w)
        if (related(k, p.lhs(), u, w) && related(k, p.rhs(), w, v)) return true;
      return false;
  }
  return false;
}

inline bool holds(const pdl::KripkeStructure& k, pdl::World u, const pdl::Formula& f) {
  using pdl::FormulaKind;
  switch (f.kind()) {
    case FormulaKind::False:
      return false;
    case FormulaKind::Prop:
      return (k.valuation(f.name()) >> u) & 1U;
    case FormulaKind::Not:
      return !holds(k, u, f.operand());
    case FormulaKind::Or:
      return holds(k, u, f.lhs()) || holds(k, u, f.rhs());
    case FormulaKind::Diamond:
      for (pdl::World v = 0; v < k.size(); ++v)
        if (related(k, f.program(), u, v) && holds(k, v, f.body())) return true;
      return false;
  }
  return false;
}

inline std::vector<std::string> world_names(std::size_t n) {
  std::vector<std::string> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back("w" + std::to_string(i));
  return w;
}

/// Calls `fn` on every structure with exactly n worlds over `vocab`.
inline void for_each_structure(std::size_t n, const pdl::Vocabulary& vocab,
                               const std::function<void(const pdl::KripkeStructure&)>& fn) {
  std::vector<std::string> props(vocab.props.begin(), vocab.props.end());
  std::vector<std::string> progs(vocab.programs.begin(), vocab.programs.end());
  const std::size_t bits = props.size() * n + progs.size() * n * n;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
    pdl::KripkeStructure k(world_names(n), vocab);
    std::size_t b = 0;
    for (const auto& p : props)
      for (pdl::World w = 0; w < n; ++w, ++b)
        if ((code >> b) & 1U) k.set_true(p, w);
    for (const auto& a : progs)
      for (pdl::World u = 0; u < n; ++u)
        for (pdl::World v = 0; v < n; ++v, ++b)
          if ((code >> b) & 1U) k.add_edge(a, u, v);
    fn(k);
  }
}

inline pdl::KripkeStructure random_structure(std::mt19937_64& rng, std::size_t n,
                                             const pdl::Vocabulary& vocab, double density = 0.35) {
  std::bernoulli_distribution coin(density);
  pdl::KripkeStructure k(world_names(n), vocab);
  for (const auto& p : vocab.props)
    for (pdl::World w = 0; w < n; ++w)
      if (coin(rng)) k.set_true(p, w);
  for (const auto& a : vocab.programs)
    for (pdl::World u = 0; u < n; ++u)
      for (pdl::World v = 0; v < n; ++v)
        if (coin(rng)) k.add_edge(a, u, v);
  return k;
}

}  // namespace pdltest
