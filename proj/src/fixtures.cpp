#include "pdlkit/fixtures.hpp"

#include <exception>

#include "pdlkit/calculus.hpp"
#include "pdlkit/io.hpp"
#include "pdlkit/model_search.hpp"
#include "pdlkit/parser.hpp"

namespace pdl {

namespace {

SearchBudget exhaustive(std::size_t n, unsigned jobs) {
  SearchBudget b;
  b.max_worlds = n;
  b.jobs = jobs;
  return b;
}

nlohmann::json outcome_json(const SearchOutcome& o) {
  nlohmann::json j{{"outcome", to_string(o.kind)}, {"bound", o.bound}, {"examined", o.examined}};
  if (o.structure) {
    j["model"] = to_json(*o.structure);
    j["world"] = o.structure->world_name(o.world);
  }
  return j;
}

// Satisfiable, no model up to n - 1 worlds, a model with n worlds.
FixtureResult minimal_size(const std::string& name, const Formula& f, std::size_t n, unsigned jobs) {
  FixtureResult r;
  r.name = name;
  const SearchOutcome below = find_model(f, exhaustive(n - 1, jobs));
  const SearchOutcome at = find_model(f, exhaustive(n, jobs));
  r.data = {{"formula", render(f)},
            {"expected_minimum", n},
            {"below", outcome_json(below)},
            {"at", outcome_json(at)}};
  if (below.found()) {
    r.detail = "model with " + std::to_string(below.structure->size()) + " worlds found; expected none up to " +
               std::to_string(n - 1);
    return r;
  }
  if (!at.found()) {
    r.detail = "no model up to " + std::to_string(n) + " worlds";
    return r;
  }
  r.ok = true;
  r.detail = "no model up to " + std::to_string(n - 1) + " worlds, model with " +
             std::to_string(at.structure->size()) + " worlds";
  return r;
}

Formula split_of(const std::vector<Formula>& phi) {
  Formula f = conj(conj(Formula::diamond(Program::atomic("a"), verum()),
                        Formula::diamond(Program::atomic("b"), verum())),
                   box(Program::inter(Program::atomic("a"), Program::atomic("b")), Formula::falsum()));
  for (const auto& x : phi) {
    f = conj(f, box(Program::atomic("a"), x));
    f = conj(f, box(Program::atomic("b"), x));
  }
  return f;
}

FixtureResult split_no_successor(unsigned jobs) {
  const std::vector<Formula> phi0{box(Program::atomic("a"), Formula::falsum()),
                                  box(Program::atomic("b"), Formula::falsum())};
  FixtureResult r = minimal_size("split-no-successor", split_of(phi0), 3, jobs);
  if (!r.ok) return r;
  const SearchOutcome at = find_model(split_of(phi0), exhaustive(3, jobs));
  const KripkeStructure& k = *at.structure;
  const Mask va = k.edges("a").successors(at.world);
  const Mask vb = k.edges("b").successors(at.world);
  bool copies = (va & vb) == 0;
  for (World v = 0; v < k.size(); ++v)
    if (((va | vb) >> v) & 1U)
      for (const auto& x : phi0) copies = copies && eval(k, v, x);
  if (!copies) {
    r.ok = false;
    r.detail = "a- and b-successors are not disjoint copies of the no-successor world";
  }
  return r;
}

FixtureResult proof_fixture(const std::string& name, const std::string& path, const Formula& expected) {
  FixtureResult r;
  r.name = name;
  const Proof proof = proof_from_json(read_json_file(path));
  const ProofResult checked = check_proof(proof);
  r.data = {{"file", path}, {"lines", proof.size()}, {"ok", checked.ok}};
  if (!checked) {
    r.data["line"] = checked.line;
    r.detail = "line " + std::to_string(checked.line) + ": " + checked.reason;
    return r;
  }
  const auto* last = std::get_if<Formula>(&proof.back().statement);
  if (last == nullptr || *last != expected) {
    r.detail = "last line is not " + render(expected);
    return r;
  }
  r.ok = true;
  r.detail = std::to_string(proof.size()) + " lines check, concluding " + render(expected);
  return r;
}

FixtureResult cyclic_test(const FixtureOptions& o) {
  const Formula phi = parse_formula("<(a;[(b;a)^]false?;b)^>true");
  FixtureResult r = proof_fixture("cyclic-test", o.dir + "/cyclic_refutation.proof.json", impl(phi, Formula::falsum()));
  const SearchOutcome s = find_model(phi, exhaustive(4, o.jobs));
  r.data["search"] = outcome_json(s);
  if (s.found()) {
    r.ok = false;
    r.detail = "model with " + std::to_string(s.structure->size()) + " worlds found";
  } else if (r.ok) {
    r.detail = "no model up to 4 worlds; " + r.detail;
  }
  return r;
}

FixtureResult axiom_harness(const FixtureOptions& o) {
  FixtureResult r;
  r.name = "axiom-harness";
  SoundnessConfig c = o.harness;
  c.jobs = o.jobs;
  const SoundnessReport rep = check_calculus(c);
  r.data = to_json(rep);
  r.ok = rep.ok();
  std::string failing;
  for (const auto& e : rep.entries)
    if (!e.ok()) failing += (failing.empty() ? "" : ", ") + e.name + " (" + std::to_string(e.counterexamples) + ")";
  r.detail = std::to_string(rep.counterexamples()) + " countermodels over " + std::to_string(rep.entries.size()) +
             " entries" + (failing.empty() ? "" : ": " + failing);
  return r;
}

template <typename Fn>
FixtureResult guarded(const std::string& name, Fn fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    FixtureResult r;
    r.name = name;
    r.detail = std::string("error: ") + e.what();
    return r;
  }
}

}  // namespace

bool FixtureReport::ok() const {
  for (const auto& r : results)
    if (!r.ok) return false;
  return true;
}

FixtureReport run_fixture_suite(const FixtureOptions& o) {
  FixtureReport rep;
  rep.results.push_back(guarded("split", [&] { return minimal_size("split", split_of({}), 3, o.jobs); }));
  rep.results.push_back(guarded("split-no-successor", [&] { return split_no_successor(o.jobs); }));
  rep.results.push_back(guarded("cyclic-test", [&] { return cyclic_test(o); }));
  rep.results.push_back(guarded("test-elimination", [&] {
    return proof_fixture("test-elimination", o.dir + "/test_elimination.proof.json", parse_formula("<p?>q -> p"));
  }));
  rep.results.push_back(guarded("axiom-harness", [&] { return axiom_harness(o); }));
  return rep;
}

nlohmann::json to_json(const FixtureReport& r) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& x : r.results)
    out.push_back({{"name", x.name}, {"ok", x.ok}, {"detail", x.detail}, {"data", x.data}});
  return {{"ok", r.ok()}, {"fixtures", out}};
}

}  // namespace pdl
