#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pdlkit/syntax.hpp"

namespace pdl {

/// World sets are bit masks, so structures hold at most 64 worlds.
using Mask = std::uint64_t;
using World = std::size_t;
constexpr std::size_t kMaxWorlds = 64;

inline Mask bit(World w) { return Mask{1} << w; }
inline Mask all_worlds(std::size_t n) { return n >= 64 ? ~Mask{0} : (bit(n) - 1); }

class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary relation over worlds 0..n-1, stored as successor masks.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t n) : succ_(n, 0) {}
  static Relation identity(std::size_t n, Mask domain);

  std::size_t size() const { return succ_.size(); }
  bool contains(World u, World v) const { return (succ_[u] >> v) & 1U; }
  void insert(World u, World v) { succ_[u] |= bit(v); }
  void erase(World u, World v) { succ_[u] &= ~bit(v); }
  Mask successors(World u) const { return succ_[u]; }
  Mask& row(World u) { return succ_[u]; }
  bool empty() const;
  std::size_t count() const;
  std::vector<std::pair<World, World>> pairs() const;

  Relation compose(const Relation& other) const;
  Relation operator|(const Relation& other) const;
  Relation operator&(const Relation& other) const;
  bool subset_of(const Relation& other) const;
  /// Worlds with at least one successor in `targets`.
  Mask preimage(Mask targets) const;

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::vector<Mask> succ_;
};

class KripkeStructure {
 public:
  KripkeStructure() = default;
  /// World names must be distinct; every vocabulary symbol gets an empty entry.
  KripkeStructure(std::vector<std::string> worlds, const Vocabulary& vocab);

  std::size_t size() const { return worlds_.size(); }
  const std::vector<std::string>& world_names() const { return worlds_; }
  const std::string& world_name(World w) const { return worlds_.at(w); }
  World world(const std::string& name) const;
  bool has_world(const std::string& name) const { return index_.count(name) > 0; }

  Vocabulary vocabulary() const;
  bool has_prop(const std::string& p) const { return valuation_.count(p) > 0; }
  bool has_program(const std::string& a) const { return edges_.count(a) > 0; }

  Mask valuation(const std::string& p) const;
  const Relation& edges(const std::string& a) const;
  const std::map<std::string, Mask>& valuations() const { return valuation_; }
  const std::map<std::string, Relation>& all_edges() const { return edges_; }

  void set_valuation(const std::string& p, Mask worlds);
  void set_true(const std::string& p, World w);
  void set_edges(const std::string& a, Relation r);
  void add_edge(const std::string& a, World u, World v);
  /// Adds symbols (with empty interpretations) that are not yet present.
  void extend_vocabulary(const Vocabulary& vocab);

  /// Structure restricted to the worlds in `keep`, renumbered in order.
  /// Returns the old-to-new index map through `renumber` when given.
  KripkeStructure restrict_to(Mask keep, std::vector<World>* renumber = nullptr) const;

  friend bool operator==(const KripkeStructure&, const KripkeStructure&) = default;

 private:
  std::vector<std::string> worlds_;
  std::map<std::string, World> index_;
  std::map<std::string, Mask> valuation_;
  std::map<std::string, Relation> edges_;
};

/// Evaluates formulas and programs over one structure, memoising relations
/// and extensions.  Throws SemanticError on symbols missing from the structure.
class Evaluator {
 public:
  explicit Evaluator(const KripkeStructure& k) : k_(&k) {}

  Mask extension(const Formula& f);
  const Relation& relation(const Program& p);
  bool eval(World u, const Formula& f) { return (extension(f) >> u) & 1U; }

 private:
  const KripkeStructure* k_;
  std::unordered_map<Formula, Mask> ext_memo_;
  std::unordered_map<Program, Relation> rel_memo_;
};

bool eval(const KripkeStructure& k, World u, const Formula& f);
bool eval(const KripkeStructure& k, const std::string& world, const Formula& f);
Relation relation(const KripkeStructure& k, const Program& p);

// ---------------------------------------------------------------------------
// Witness graphs

struct WitnessEdge {
  World from;
  std::string program;
  World to;
  friend auto operator<=>(const WitnessEdge&, const WitnessEdge&) = default;
};

struct WitnessGraph {
  Mask nodes = 0;
  std::set<WitnessEdge> edges;
  World source = 0;
  World target = 0;

  bool contains(const WitnessGraph& other) const;
  friend bool operator==(const WitnessGraph&, const WitnessGraph&) = default;
};

struct TransitionQuery {
  const KripkeStructure* structure = nullptr;
  World source = 0;
  Program program;
  World target = 0;
};

struct WitnessResult {
  std::vector<WitnessGraph> graphs;
  bool truncated = false;
};

constexpr std::size_t kDefaultWitnessCap = 256;

WitnessResult witness_graphs(const TransitionQuery& q, std::size_t cap = kDefaultWitnessCap);
/// Whether g is produced by the inductive clauses for q using only g's own
/// nodes and edges.
bool is_witness(const WitnessGraph& g, const TransitionQuery& q);
bool is_minimal_witness(const WitnessGraph& g, const TransitionQuery& q);
/// Nodes other than u and w lying on every positive-length path from u to w.
Mask articulation_nodes(const WitnessGraph& g, World u, World w);

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (b1, b2) with u -b1-> v, v -b2-> w in the host and b1;b2 => alpha.
/// alpha must be a forward program (Forw, true? padding optional) with at
/// least one sequence; g must be a minimal witness for u -alpha-> w and v one
/// of its articulation nodes.
std::pair<Program, Program> gateway_split(const KripkeStructure& k, const WitnessGraph& g,
                                          World u, World w, World v, const Program& alpha);

/// Folds the loop region at v into the test (<beta^>true)?.
Program excise_loop(const KripkeStructure& k, const WitnessGraph& g, World u, World w, World v,
                    const std::set<WitnessEdge>& region_edges, const Program& alpha);

std::string to_dot(const WitnessGraph& g, const KripkeStructure& k);

}  // namespace pdl
