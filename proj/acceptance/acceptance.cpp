#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "gen.hpp"
#include "oracle.hpp"
#include "pdlkit/calculus.hpp"
#include "pdlkit/io.hpp"
#include "pdlkit/large_programs.hpp"
#include "pdlkit/model_search.hpp"
#include "pdlkit/normal_form.hpp"
#include "pdlkit/parser.hpp"
#include "pdlkit/semantics.hpp"
#include "pdlkit/soundness.hpp"
#include "pdlkit/substitution.hpp"
#include "proof_corruption.hpp"

#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic ignored "-Wstringop-overread"
#endif

using namespace pdl;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

unsigned g_jobs = 1;

// Runs fn(i) for i in [0, n) on g_jobs threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1U, g_jobs); ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) fn(i);
    });
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------

Verdict soundness_sweep() {
  SoundnessConfig c;
  c.instances = 500;
  c.max_worlds = 3;
  c.depth = 2;
  c.jobs = g_jobs;
  const SoundnessReport rep = check_calculus(c);
  std::string failing;
  std::size_t short_entries = 0;
  for (const auto& e : rep.entries) {
    if (!e.ok()) failing += " " + e.name + "(" + std::to_string(e.counterexamples) + "/" + std::to_string(e.instances) + ")";
    if (e.kind != "rule" && e.instances < 500) ++short_entries;
  }
  SoundnessConfig m = c;
  m.stop_at_first = true;
  const SoundnessReport mut = check_schemes(mutated_schemes(), m);
  std::size_t caught = 0;
  for (const auto& e : mut.entries) caught += e.counterexamples > 0;
  const bool mutants_ok = mut.entries.size() >= 10 && caught == mut.entries.size();
  std::ostringstream d;
  d << rep.entries.size() << " entries, " << rep.counterexamples() << " counterexamples";
  if (!failing.empty()) d << " [" << failing.substr(1) << "]";
  if (short_entries) d << ", " << short_entries << " schemes under 500 instances";
  d << "; mutants caught " << caught << "/" << mut.entries.size();
  return {rep.counterexamples() == 0 && short_entries == 0 && mutants_ok, d.str()};
}

// ---------------------------------------------------------------------------

Verdict normal_form_contract() {
  constexpr std::size_t kCount = 10000;
  pdltest::Gen g(2024);
  std::vector<Formula> fs;
  for (std::size_t i = 0; i < kCount; ++i) fs.push_back(g.formula(4));
  std::vector<char> grammar(kCount), equal(kCount), fixpoint(kCount);
  parallel_for(kCount, [&](std::size_t i) {
    const Formula nf = normalize(fs[i]).first;
    grammar[i] = in_normal_form(nf);
    fixpoint[i] = normalize(nf).first == nf;
    SearchBudget b;
    b.max_worlds = 3;
    b.vocab = Vocabulary{{"p", "q"}, {"a", "b"}};
    equal[i] = check_validity(iff(fs[i], nf), b).kind == OutcomeKind::ValidUpTo;
  });
  const auto ok = [](const std::vector<char>& v) { return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1)); };
  std::ostringstream d;
  d << kCount << " formulas of depth <= 4: grammar " << ok(grammar) << ", equivalent on <= 3 worlds " << ok(equal)
    << ", fixpoint " << ok(fixpoint);
  return {ok(grammar) == kCount && ok(equal) == kCount && ok(fixpoint) == kCount, d.str()};
}

// ---------------------------------------------------------------------------

std::vector<Program> witness_pool() {
  std::vector<Program> pool;
  std::set<Program> seen;
  auto add = [&](const Program& p) {
    if (seen.insert(p).second) pool.push_back(p);
  };
  for (const char* s : {"a", "p?", "a;b", "a & b", "a + b", "a;b & a", "(a;b)^", "a;p?;b", "(a & b);(a + b)",
                        "a;(b & a;a)", "(a;b & b;a)^", "(<a>p)?;b", "a^;b^", "(a + b) & (b;a)", "a;a;a"})
    add(parse_program(s));
  pdltest::Gen g(7);
  g.props = {"p"};
  while (pool.size() < 40) add(g.program(3));
  return pool;
}

// Structures over {p}, {a, b} with n worlds, one per isomorphism class: the
// code is kept only if no world permutation maps it to a smaller code.
std::uint64_t permute_code(std::uint64_t code, std::size_t n, const std::vector<World>& pi) {
  std::uint64_t out = 0;
  for (World w = 0; w < n; ++w)
    if ((code >> w) & 1U) out |= std::uint64_t{1} << pi[w];
  for (std::size_t a = 0; a < 2; ++a)
    for (World u = 0; u < n; ++u)
      for (World v = 0; v < n; ++v)
        if ((code >> (n + a * n * n + u * n + v)) & 1U)
          out |= std::uint64_t{1} << (n + a * n * n + pi[u] * n + pi[v]);
  return out;
}

KripkeStructure decode(std::uint64_t code, std::size_t n) {
  KripkeStructure k(pdltest::world_names(n), Vocabulary{{"p"}, {"a", "b"}});
  for (World w = 0; w < n; ++w)
    if ((code >> w) & 1U) k.set_true("p", w);
  const char* names[] = {"a", "b"};
  for (std::size_t a = 0; a < 2; ++a)
    for (World u = 0; u < n; ++u)
      for (World v = 0; v < n; ++v)
        if ((code >> (n + a * n * n + u * n + v)) & 1U) k.add_edge(names[a], u, v);
  return k;
}

Verdict witness_equivalence() {
  const std::vector<Program> pool = witness_pool();
  std::atomic<std::uint64_t> structures{0}, checked{0}, related{0}, mismatches{0};
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<std::vector<World>> perms;
    std::vector<World> pi(n);
    for (World w = 0; w < n; ++w) pi[w] = w;
    while (std::next_permutation(pi.begin(), pi.end())) perms.push_back(pi);
    const std::uint64_t total = std::uint64_t{1} << (n + 2 * n * n);
    const std::uint64_t chunk = 4096;
    parallel_for((total + chunk - 1) / chunk, [&](std::size_t c) {
      for (std::uint64_t code = c * chunk; code < std::min(total, (c + 1) * chunk); ++code) {
        bool canonical = true;
        for (const auto& q : perms) canonical = canonical && permute_code(code, n, q) >= code;
        if (!canonical) continue;
        const KripkeStructure k = decode(code, n);
        ++structures;
        Evaluator ev(k);
        for (const auto& p : pool) {
          const Relation& r = ev.relation(p);
          for (World u = 0; u < n; ++u)
            for (World v = 0; v < n; ++v) {
              const bool w = !witness_graphs({&k, u, p, v}, 1).graphs.empty();
              ++checked;
              related += r.contains(u, v);
              mismatches += w != r.contains(u, v);
            }
        }
      }
    });
  }
  std::ostringstream d;
  d << structures << " structures up to isomorphism x " << pool.size() << " programs, " << checked << " pairs ("
    << related << " related), " << mismatches << " mismatches";
  return {mismatches == 0 && checked > 0, d.str()};
}

// ---------------------------------------------------------------------------

Verdict split_fixture() {
  const Formula f = parse_formula("<a>true & <b>true & [a & b]false");
  SearchBudget two;
  two.max_worlds = 2;
  two.jobs = g_jobs;
  SearchBudget three = two;
  three.max_worlds = 3;
  const SearchOutcome small = find_model(f, two);
  const SearchOutcome big = find_model(f, three);
  std::ostringstream d;
  d << "<= 2 worlds: " << to_string(small.kind);
  if (small.found()) d << " (" << small.structure->size() << " worlds)";
  d << "; <= 3 worlds: " << to_string(big.kind);
  if (big.found()) d << " (" << big.structure->size() << " worlds)";
  const bool pass = !small.found() && big.found() && big.structure->size() == 3;
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------

Verdict cyclic_fixture() {
  const Formula phi = parse_formula("<(a;[(b;a)^]false?;b)^>true");
  SearchBudget b;
  b.max_worlds = 4;
  b.jobs = g_jobs;
  const SearchOutcome s = find_model(phi, b);
  const Proof proof = proof_from_json(read_json_file(std::string(PDLKIT_FIXTURE_DIR) + "/cyclic_refutation.proof.json"));
  const ProofResult checked = check_proof(proof);
  const auto* last = std::get_if<Formula>(&proof.back().statement);
  const bool concludes = last != nullptr && *last == impl(phi, Formula::falsum());
  std::set<std::string> rules;
  for (const auto& l : proof) {
    if (const auto* a = std::get_if<ByAxiom>(&l.by)) rules.insert(a->name);
    if (const auto* a = std::get_if<ByProgramAxiom>(&l.by)) rules.insert(a->name);
    if (std::holds_alternative<ByMP>(l.by)) rules.insert("MP");
  }
  const bool uses = rules.count("C") && rules.count("T2") && rules.count("C3") && rules.count("MP");
  const auto corruptions = pdltest::single_line_corruptions(proof);
  std::size_t rejected = 0;
  for (const auto& c : corruptions) rejected += !check_proof(c.proof).ok;
  std::ostringstream d;
  d << "<= 4 worlds: " << to_string(s.kind) << " (" << s.examined << " structures); proof "
    << (checked.ok ? "checks" : "fails at line " + std::to_string(checked.line)) << (concludes ? "" : ", wrong conclusion")
    << (uses ? "" : ", missing C/T2/C3/MP") << "; corruptions rejected " << rejected << "/" << corruptions.size();
  const bool pass = !s.found() && checked.ok && concludes && uses && !corruptions.empty() && rejected == corruptions.size();
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------

// Forw ::= a | F & F | F ; F | F ; Cyc ; F    Cyc ::= phi? | F & phi?
struct ForwGen {
  pdltest::Gen g{607};
  ForwGen() { g.props = {"p"}; }
  Program forw(int depth) {
    if (depth <= 0 || g.coin(0.25)) return Program::atomic(g.coin() ? "a" : "b");
    switch (g.pick(3)) {
      case 0:
        return Program::inter(forw(depth - 1), forw(depth - 1));
      case 1:
        return Program::seq(forw(depth - 1), forw(depth - 1));
      default: {
        const Program l = forw(depth - 1);
        const Program c = cyc(depth - 1);
        return Program::seq(Program::seq(l, c), forw(depth - 1));
      }
    }
  }
  Program cyc(int depth) {
    const Program t = Program::test(g.formula(1));
    if (depth <= 0 || g.coin()) return t;
    return Program::inter(forw(depth - 1), t);
  }
  Program with_seq() {
    if (g.coin()) return Program::seq(forw(2), forw(2));
    const Program l = forw(1);
    const Program c = cyc(1);
    return Program::seq(Program::seq(l, c), forw(1));
  }
};

Verdict gateway_property() {
  std::mt19937_64 rng(606);
  ForwGen g;
  const Vocabulary vocab{{"p"}, {"a", "b"}};
  std::size_t graphs = 0, good = 0;
  std::string first_bad;
  for (int attempt = 0; attempt < 20000 && graphs < 150; ++attempt) {
    const std::size_t n = 3 + attempt % 2;
    const KripkeStructure k = pdltest::random_structure(rng, n, vocab, 0.4);
    const Program alpha = g.with_seq();
    const World u = static_cast<World>(rng() % n);
    const World w = static_cast<World>(rng() % n);
    const TransitionQuery q{&k, u, alpha, w};
    for (const auto& wg : witness_graphs(q, 8).graphs) {
      if (!is_minimal_witness(wg, q)) continue;
      const Mask art = articulation_nodes(wg, u, w);
      if (art == 0) continue;
      World v = 0;
      while (!((art >> v) & 1U)) ++v;
      ++graphs;
      bool ok = false;
      try {
        const auto [b1, b2] = gateway_split(k, wg, u, w, v, alpha);
        SearchBudget b;
        b.max_worlds = 3;
        b.jobs = g_jobs;
        ok = pdltest::related(k, b1, u, v) && pdltest::related(k, b2, v, w) &&
             check_program_judgement(Program::seq(b1, b2), alpha, JudgementKind::Implies, b).kind ==
                 OutcomeKind::ValidUpTo;
      } catch (const std::exception& e) {
        if (first_bad.empty()) first_bad = e.what();
      }
      if (!ok && first_bad.empty()) first_bad = render(alpha) + " at " + k.world_name(v);
      good += ok;
      break;
    }
  }
  std::ostringstream d;
  d << good << "/" << graphs << " minimal witness graphs with an articulation node split correctly";
  if (!first_bad.empty()) d << "; first failure: " << first_bad;
  return {graphs >= 100 && good == graphs, d.str()};
}

// ---------------------------------------------------------------------------

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

bool oracle_leq(const LargeProgram& x, const LargeProgram& y) {
  std::set<Program> ys;
  for (const auto& b : enumerate_instances(y)) ys.insert(left_assoc(b));
  for (const auto& a : enumerate_instances(x))
    if (!ys.count(left_assoc(a))) return false;
  return true;
}

std::vector<LargeProgram> large_universe() {
  const std::vector<Formula> atoms{parse_formula("p"), parse_formula("q"), parse_formula("r")};
  std::vector<FormulaSet> sets;
  for (unsigned m = 1; m < 8; ++m) {
    FormulaSet s;
    for (unsigned i = 0; i < 3; ++i)
      if ((m >> i) & 1U) s.insert(atoms[i]);
    sets.push_back(s);
  }
  const auto A = LargeProgram::atomic;
  const auto I = LargeProgram::inter;
  const auto S = LargeProgram::seq_test;
  std::vector<LargeProgram> out{A("a"), A("b"), I(A("a"), A("b"))};
  for (const auto& x : sets) {
    out.push_back(S(A("a"), x, A("b")));
    out.push_back(S(A("b"), x, A("a")));
    out.push_back(S(A("a"), x, A("a")));
    out.push_back(S(I(A("a"), A("b")), x, A("a")));
    out.push_back(I(A("a"), S(A("a"), x, A("b"))));
    for (const auto& y : sets) {
      out.push_back(S(A("a"), x, S(A("b"), y, A("a"))));
      out.push_back(S(S(A("a"), x, A("b")), y, A("a")));
      out.push_back(I(S(A("a"), x, A("b")), S(A("a"), y, A("b"))));
      out.push_back(S(S(A("a"), x, A("b")), y, I(A("a"), A("b"))));
    }
  }
  return out;
}

struct LGen {
  std::mt19937_64 rng;
  std::vector<Formula> atoms{parse_formula("p"), parse_formula("q"), parse_formula("r")};
  explicit LGen(std::uint64_t s) : rng(s) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  FormulaSet set(std::size_t max) {
    FormulaSet s;
    const std::size_t n = 1 + pick(static_cast<int>(max));
    while (s.size() < n) s.insert(atoms[pick(static_cast<int>(atoms.size()))]);
    return s;
  }
  LargeProgram large(int depth, int& tests) {
    const int k = depth <= 0 ? 0 : pick(3);
    if (k == 2 && tests > 0) {
      --tests;
      LargeProgram l = large(depth - 1, tests);
      FormulaSet x = set(3);
      return LargeProgram::seq_test(std::move(l), std::move(x), large(depth - 1, tests));
    }
    if (k == 1) {
      LargeProgram l = large(depth - 1, tests);
      return LargeProgram::inter(std::move(l), large(depth - 1, tests));
    }
    return LargeProgram::atomic(pick(2) ? "a" : "b");
  }
};

Verdict large_program_oracles() {
  const std::vector<LargeProgram> universe = large_universe();
  std::atomic<std::size_t> pairs{0}, leq_yes{0}, leq_bad{0};
  parallel_for(universe.size(), [&](std::size_t i) {
    for (const auto& y : universe) {
      const bool s = leq(universe[i], y);
      ++pairs;
      leq_yes += s;
      leq_bad += s != oracle_leq(universe[i], y);
    }
  });

  LGen g(31);
  std::size_t transitions = 0, inconsistent = 0, scan_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    int t = 2;
    LabelledTransition tr{g.set(2), g.large(3, t), g.set(2)};
    const auto occ = occurrences(tr.program);
    for (int k = 0; k < 2; ++k) {
      auto it = occ.begin();
      std::advance(it, g.pick(static_cast<int>(occ.size())));
      const auto inst = enumerate_instances(it->second);
      const Program b = inst[g.pick(static_cast<int>(inst.size()))];
      tr.left.insert(box(b, Formula::negation(g.atoms[g.pick(3)])));
    }
    bool violated = false;
    const auto labels = left_right_sets(tr);
    for (const auto& [p, node] : occ) {
      const auto& [l, r] = labels.at(p);
      for (const auto& b : enumerate_instances(node))
        for (const auto& psi : r) violated = violated || l.count(box(b, Formula::negation(psi)));
    }
    ++transitions;
    inconsistent += violated;
    scan_bad += is_consistent_transition(tr) == violated;
  }
  std::ostringstream d;
  d << "leq on " << pairs << " pairs (" << leq_yes << " related): " << leq_bad << " disagreements; "
    << "consistency on " << transitions << " transitions (" << inconsistent << " inconsistent): " << scan_bad
    << " disagreements";
  return {leq_bad == 0 && scan_bad == 0 && pairs > 0, d.str()};
}

// ---------------------------------------------------------------------------

std::vector<Program> diamond_programs(const Formula& f) {
  std::vector<Program> out;
  std::function<void(const Formula&)> walk = [&](const Formula& x) {
    switch (x.kind()) {
      case FormulaKind::Not:
        walk(x.operand());
        break;
      case FormulaKind::Or:
        walk(x.lhs());
        walk(x.rhs());
        break;
      case FormulaKind::Diamond:
        out.push_back(x.program());
        walk(x.body());
        break;
      default:
        break;
    }
  };
  walk(f);
  return out;
}

Verdict substitution_lemmas() {
  const Vocabulary vocab{{"p", "q"}, {"a", "b"}};
  std::mt19937_64 rng(808);
  pdltest::Gen g(809);
  std::size_t usub_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + i % 3;
    const KripkeStructure k = pdltest::random_structure(rng, n, vocab);
    const Formula f = g.formula(4);
    const Formula psi = g.formula(3);
    KripkeStructure swapped = k;
    Mask ext = 0;
    for (World u = 0; u < n; ++u)
      if (pdltest::holds(k, u, psi)) ext |= bit(u);
    swapped.set_valuation("p", ext);
    const Formula sub = usub(f, psi, "p");
    for (World u = 0; u < n; ++u) usub_bad += pdltest::holds(k, u, sub) != pdltest::holds(swapped, u, f);
  }

  std::size_t psub_bad = 0, psub_changed = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + i % 3;
    const KripkeStructure k = pdltest::random_structure(rng, n, vocab);
    const Formula f = g.formula(4);
    const auto progs = diamond_programs(f);
    const Program old = progs.empty() ? Program::atomic("a") : progs[g.pick(static_cast<int>(progs.size()))];
    const Program extra = g.program(1);
    const Formula smaller = psub(f, old, Program::inter(old, extra));
    const Formula larger = psub(f, old, Program::choice(old, extra));
    psub_changed += smaller != f;
    for (World u = 0; u < n; ++u) {
      const bool base = pdltest::holds(k, u, f);
      psub_bad += pdltest::holds(k, u, smaller) && !base;
      psub_bad += base && !pdltest::holds(k, u, larger);
    }
  }
  std::ostringstream d;
  d << "usub valuation swap: 1000 samples, " << usub_bad << " failures; psub monotonicity: 1000 samples ("
    << psub_changed << " rewritten), " << psub_bad << " failures";
  return {usub_bad == 0 && psub_bad == 0 && psub_changed > 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for pdlkit"};
  std::vector<int> only;
  g_jobs = default_jobs();
  app.add_option("--only", only, "Run only these criteria (1-8)")->check(CLI::Range(1, 8));
  app.add_option("--jobs", g_jobs, "Worker threads (default: PDLKIT_JOBS or 1)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"axiom soundness sweep", soundness_sweep},
      {"normal-form contract", normal_form_contract},
      {"witness-graph equivalence", witness_equivalence},
      {"split fixture", split_fixture},
      {"cyclic-test fixture", cyclic_fixture},
      {"gateway property", gateway_property},
      {"large-program oracle equivalence", large_program_oracles},
      {"substitution lemmas", substitution_lemmas},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream time;
    time.precision(1);
    time << std::fixed << s;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[i].first << ": " << v.detail << " ["
              << time.str() << "s]" << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
