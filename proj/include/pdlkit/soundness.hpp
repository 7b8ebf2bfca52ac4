#pragma once

// Bounded soundness sweeps: axiom schemes and rules checked on every small
// Kripke structure.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pdlkit/calculus.hpp"
#include "pdlkit/semantics.hpp"

namespace pdl {

struct SoundnessConfig {
  std::size_t max_worlds = 3;
  /// Distinct instances sampled per scheme or rule.
  std::size_t instances = 500;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::vector<std::string> props{"p", "q"};
  std::vector<std::string> programs{"a", "b"};
  /// Depth bound of the formulas and programs bound to metavariables.
  int depth = 2;
  /// Stop an entry after its first counterexample.
  bool stop_at_first = false;
};

struct SoundnessEntry {
  std::string name;
  std::string kind;  // "formula", "program" or "rule"
  std::size_t instances = 0;
  std::size_t counterexamples = 0;
  /// Premises that turned out invalid on some small structure (rules only).
  std::size_t skipped = 0;
  std::optional<std::string> first;  // rendered offending statement
  std::optional<KripkeStructure> structure;
  World world = 0;
  std::optional<std::pair<World, World>> pair;

  bool ok() const { return counterexamples == 0; }
};

struct SoundnessReport {
  std::vector<SoundnessEntry> entries;
  std::size_t max_worlds = 0;
  std::vector<std::string> warnings;

  std::size_t counterexamples() const;
  bool ok() const;
  const SoundnessEntry* find(const std::string& name) const;
};

/// Instances of each scheme, checked for validity (formulas) or relation
/// inclusion/equality (program judgements) on all structures up to
/// max_worlds.
SoundnessReport check_schemes(const std::vector<Scheme>& schemes, const SoundnessConfig& c);

/// All formula and program schemes, TP and C, then the rules MP, Gen, USub
/// and PSub applied to sampled premises that are valid up to max_worlds.
SoundnessReport check_calculus(const SoundnessConfig& c);

/// Deliberately corrupted variants of the schemes, each with a small
/// countermodel.
const std::vector<Scheme>& mutated_schemes();

nlohmann::json to_json(const SoundnessReport& r);

}  // namespace pdl
