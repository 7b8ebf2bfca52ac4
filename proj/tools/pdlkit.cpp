#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdlkit/calculus.hpp"
#include "pdlkit/fixtures.hpp"
#include "pdlkit/io.hpp"
#include "pdlkit/large_programs.hpp"
#include "pdlkit/model_search.hpp"
#include "pdlkit/normal_form.hpp"
#include "pdlkit/parser.hpp"
#include "pdlkit/semantics.hpp"
#include "pdlkit/soundness.hpp"
#include "pdlkit/substitution.hpp"

using namespace pdl;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Report {
  std::string status = "ok";
  int exit = 0;
  Json payload = Json::object();
  std::vector<std::string> lines;

  void say(std::string s) { lines.push_back(std::move(s)); }
  void fail(std::string st, int code) {
    status = std::move(st);
    exit = code;
  }
};

// A term given inline, in a file, or on standard input (--file -).
struct Input {
  std::string text;
  std::string file;

  void attach(CLI::App* app, const std::string& what) {
    app->add_option("input", text, what);
    app->add_option("-f,--file", file, "Read the input from a file ('-' for standard input)");
  }

  std::string get() const {
    if (!text.empty() && !file.empty()) throw UsageError("give the input inline or with --file, not both");
    if (file == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    if (!file.empty()) return read_text_file(file);
    if (text.empty()) throw UsageError("missing input");
    return text;
  }
};

std::string join(const std::vector<std::string>& xs, const std::string& sep = ", ") {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : sep) + x;
  return out;
}

std::string world_list(const KripkeStructure& k, Mask m) {
  std::vector<std::string> names;
  for (World w = 0; w < k.size(); ++w)
    if ((m >> w) & 1U) names.push_back(k.world_name(w));
  return "{" + join(names) + "}";
}

std::string render_term(const Term& t) {
  if (const auto* f = std::get_if<Formula>(&t)) return render(*f);
  return render(std::get<Program>(t));
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (std::uint64_t{rd()} << 32) | rd();
}

Json outcome_json(const SearchOutcome& o) {
  Json j{{"outcome", to_string(o.kind)}, {"bound", o.bound}, {"examined", o.examined}};
  if (o.structure) {
    j["model"] = to_json(*o.structure);
    j["world"] = o.structure->world_name(o.world);
    if (o.pair)
      j["pair"] = {o.structure->world_name(o.pair->first), o.structure->world_name(o.pair->second)};
  }
  return j;
}

void describe_structure(Report& r, const KripkeStructure& k) {
  r.say("  worlds " + world_list(k, all_worlds(k.size())));
  for (const auto& [p, m] : k.valuations()) r.say("  " + p + " " + world_list(k, m));
  for (const auto& [a, rel] : k.all_edges()) {
    std::vector<std::string> pairs;
    for (const auto& [u, v] : rel.pairs()) pairs.push_back(k.world_name(u) + "->" + k.world_name(v));
    r.say("  " + a + " {" + join(pairs) + "}");
  }
}

std::string worlds(std::size_t n) { return std::to_string(n) + (n == 1 ? " world" : " worlds"); }

struct Options {
  bool json = false;
  unsigned jobs = default_jobs();
};

struct SearchFlags {
  std::size_t max_worlds = 3;
  bool random = false;
  std::uint64_t samples = 1000;
  std::optional<std::uint64_t> seed;
  std::string vocab;

  void attach(CLI::App* app) {
    app->add_option("--max-worlds", max_worlds, "Largest structure size searched")->capture_default_str();
    app->add_flag("--random", random, "Sample structures instead of enumerating them");
    app->add_option("--samples", samples, "Samples per size in random mode")->capture_default_str();
    app->add_option("--seed", seed, "Seed for random mode (generated and printed if absent)");
    app->add_option("--vocab", vocab, "Vocabulary JSON file; symbols are checked against it");
  }

  SearchBudget budget(const Options& o, Report& r) const {
    if (seed && !random) throw UsageError("--seed needs --random");
    SearchBudget b;
    b.max_worlds = max_worlds;
    b.jobs = o.jobs;
    if (!vocab.empty()) b.vocab = vocabulary_from_json(read_json_file(vocab));
    if (random) {
      b.mode = SearchMode::Random;
      b.samples = samples;
      b.seed = seed ? *seed : fresh_seed();
      r.payload["seed"] = b.seed;
      r.say("seed: " + std::to_string(b.seed));
    }
    return b;
  }

  std::optional<Vocabulary> strict() const {
    if (vocab.empty()) return std::nullopt;
    return vocabulary_from_json(read_json_file(vocab));
  }
};

std::string bounded(const SearchBudget& b) {
  const std::string scope = b.mode == SearchMode::Random
                                ? "among " + std::to_string(b.samples) + " sampled structures per size up to " +
                                      std::to_string(b.max_worlds) + " worlds"
                                : "with at most " + std::to_string(b.max_worlds) + " worlds";
  return scope;
}

const char* kCaveat = "note: bounded search is evidence only, not a proof (no finite model property is assumed)";

// ---------------------------------------------------------------------------

Report cmd_parse(const Input& in, const std::string& vocab, bool core) {
  Report r;
  const std::string text = in.get();
  const Statement s = vocab.empty() ? parse_statement(text) : parse_statement(text, vocabulary_from_json(read_json_file(vocab)));
  const bool is_formula = std::holds_alternative<Formula>(s);
  r.payload = {{"kind", is_formula ? "formula" : "judgement"},
               {"text", render(s)},
               {"core", render(s, RenderOptions{false})}};
  if (is_formula) r.payload["normal_form"] = in_normal_form(std::get<Formula>(s));
  r.say(core ? render(s, RenderOptions{false}) : render(s));
  return r;
}

Report cmd_eval(const Input& in, const std::string& model, const std::optional<std::string>& world) {
  Report r;
  const KripkeStructure k = kripke_from_json(read_json_file(model));
  const Formula f = parse_formula(in.get());
  Evaluator ev(k);
  const Mask ext = ev.extension(f);
  r.payload = {{"formula", render(f)}, {"extension", Json::array()}};
  for (World w = 0; w < k.size(); ++w)
    if ((ext >> w) & 1U) r.payload["extension"].push_back(k.world_name(w));
  if (world) {
    const bool v = (ext >> k.world(*world)) & 1U;
    r.payload["world"] = *world;
    r.payload["value"] = v;
    r.say(v ? "true" : "false");
  } else {
    r.say(world_list(k, ext));
  }
  return r;
}

Report cmd_relation(const Input& in, const std::string& model) {
  Report r;
  const KripkeStructure k = kripke_from_json(read_json_file(model));
  const Program p = parse_program(in.get());
  const Relation rel = relation(k, p);
  Json pairs = Json::array();
  std::vector<std::string> shown;
  for (const auto& [u, v] : rel.pairs()) {
    pairs.push_back({k.world_name(u), k.world_name(v)});
    shown.push_back("(" + k.world_name(u) + ", " + k.world_name(v) + ")");
  }
  r.payload = {{"program", render(p)}, {"pairs", pairs}};
  r.say("{" + join(shown) + "}");
  return r;
}

struct WitnessFlags {
  std::string model;
  std::string from;
  std::string to;
  std::size_t cap = kDefaultWitnessCap;

  void attach(CLI::App* app) {
    app->add_option("--model", model, "Kripke structure JSON")->required();
    app->add_option("--from", from, "Source world")->required();
    app->add_option("--to", to, "Target world")->required();
    app->add_option("--cap", cap, "Stop after this many graphs")->capture_default_str();
  }
};

Report cmd_witness(const Input& in, const WitnessFlags& w, bool dot, std::optional<std::size_t> index) {
  Report r;
  const KripkeStructure k = kripke_from_json(read_json_file(w.model));
  const Program p = parse_program(in.get());
  const TransitionQuery q{&k, k.world(w.from), p, k.world(w.to)};
  const WitnessResult res = witness_graphs(q, w.cap);
  if (index && *index >= res.graphs.size())
    throw UsageError("--index " + std::to_string(*index) + " out of range (" + std::to_string(res.graphs.size()) +
                     " graphs)");
  Json graphs = Json::array();
  for (std::size_t i = 0; i < res.graphs.size(); ++i) {
    if (index && i != *index) continue;
    const auto& g = res.graphs[i];
    Json j = to_json(g, k);
    j["index"] = i;
    j["minimal"] = is_minimal_witness(g, q);
    j["articulation"] = Json::array();
    for (World v = 0; v < k.size(); ++v)
      if ((articulation_nodes(g, q.source, q.target) >> v) & 1U) j["articulation"].push_back(k.world_name(v));
    if (dot) {
      j["dot"] = to_dot(g, k);
      r.say(to_dot(g, k));
    } else {
      std::vector<std::string> edges;
      for (const auto& e : g.edges) edges.push_back(k.world_name(e.from) + " -" + e.program + "-> " + k.world_name(e.to));
      r.say("graph " + std::to_string(i) + ": nodes " + world_list(k, g.nodes) + ", edges {" + join(edges) + "}");
    }
    graphs.push_back(j);
  }
  r.payload = {{"program", render(p)},
               {"from", w.from},
               {"to", w.to},
               {"related", !res.graphs.empty()},
               {"truncated", res.truncated},
               {"graphs", graphs}};
  if (res.truncated) r.say("note: stopped after " + std::to_string(w.cap) + " graphs");
  if (res.graphs.empty()) {
    r.say("no witness graph: " + w.from + " is not related to " + w.to);
    r.fail("refuted", 1);
  }
  return r;
}

Report cmd_gateway(const Input& in, const WitnessFlags& w, const std::string& via, std::optional<std::size_t> index) {
  Report r;
  const KripkeStructure k = kripke_from_json(read_json_file(w.model));
  const Program alpha = parse_program(in.get());
  const World u = k.world(w.from);
  const World t = k.world(w.to);
  const World v = k.world(via);
  const TransitionQuery q{&k, u, alpha, t};
  const WitnessResult res = witness_graphs(q, w.cap);
  std::optional<std::size_t> chosen = index;
  if (chosen && *chosen >= res.graphs.size()) throw UsageError("--graph out of range");
  for (std::size_t i = 0; !chosen && i < res.graphs.size(); ++i)
    if (is_minimal_witness(res.graphs[i], q) && ((articulation_nodes(res.graphs[i], u, t) >> v) & 1U)) chosen = i;
  if (!chosen) {
    r.say("no minimal witness graph for " + w.from + " -> " + w.to + " has " + via + " as an articulation node");
    r.payload = {{"program", render(alpha)}, {"graphs", res.graphs.size()}};
    r.fail("refuted", 1);
    return r;
  }
  const auto& g = res.graphs[*chosen];
  const auto [b1, b2] = gateway_split(k, g, u, t, v, alpha);
  const bool first = relation(k, b1).contains(u, v);
  const bool second = relation(k, b2).contains(v, t);
  r.payload = {{"program", render(alpha)}, {"graph", to_json(g, k)}, {"graph_index", *chosen},
               {"beta1", render(b1)},      {"beta2", render(b2)},    {"beta1_holds", first},
               {"beta2_holds", second}};
  r.say("beta1: " + render(b1) + "   (" + w.from + " -> " + via + (first ? ")" : ", FAILS)"));
  r.say("beta2: " + render(b2) + "   (" + via + " -> " + w.to + (second ? ")" : ", FAILS)"));
  if (!first || !second) throw std::logic_error("gateway split does not hold on the host structure");
  return r;
}

Report cmd_normalize(const Input& in, bool program, bool trace) {
  Report r;
  const std::string text = in.get();
  Term input;
  Term output;
  RewriteTrace steps;
  if (program) {
    const Program p = parse_program(text);
    auto [nf, t] = normalize_program_in_context(p);
    input = p;
    output = nf;
    steps = std::move(t);
  } else {
    const Formula f = parse_formula(text);
    auto [nf, t] = normalize(f);
    input = f;
    output = nf;
    steps = std::move(t);
    r.payload["in_normal_form"] = in_normal_form(nf);
  }
  if (replay(input, steps) != output) throw std::logic_error("normalize: trace does not replay to the output");
  r.payload["input"] = render_term(input);
  r.payload["normal_form"] = render_term(output);
  Json js = Json::array();
  for (const auto& s : steps.steps) {
    js.push_back({{"axioms", s.axioms},
                  {"position", to_string(s.position)},
                  {"before", render_term(s.before)},
                  {"after", render_term(s.after)}});
    if (trace)
      r.say("[" + axioms_label(s) + "] at " + to_string(s.position) + ": " + render_term(s.before) + "  ~>  " +
            render_term(s.after));
  }
  r.payload["trace"] = js;
  r.say(render_term(output));
  return r;
}

Report cmd_check_proof(const std::string& file) {
  Report r;
  const Proof proof = proof_from_json(read_json_file(file));
  const ProofResult res = check_proof(proof);
  r.payload = {{"file", file}, {"lines", proof.size()}, {"ok", res.ok}};
  if (!proof.empty()) r.payload["conclusion"] = render(proof.back().statement);
  if (res) {
    r.say("ok: " + std::to_string(proof.size()) + " lines");
    if (!proof.empty()) r.say("concludes " + render(proof.back().statement));
    return r;
  }
  r.payload["line"] = res.line;
  r.payload["reason"] = res.reason;
  r.say("line " + std::to_string(res.line) + ": " + res.reason);
  r.fail("proof-error", 1);
  return r;
}

// ---------------------------------------------------------------------------
// large

LargeProgram large_input(const std::string& text) {
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && text[start] == '{') return large_from_json(Json::parse(text));
  return lift(parse_program(text));
}

Json gap_json(const std::map<Path, FormulaSet>& gap, const std::map<Path, LargeProgram>& occ, Report& r) {
  Json out = Json::array();
  for (const auto& [p, missing] : gap) {
    out.push_back({{"position", to_string(p)}, {"occurrence", render(occ.at(p))}, {"missing", to_json(missing)}});
    std::vector<std::string> fs;
    for (const auto& f : missing) fs.push_back(render(f));
    r.say("  at " + to_string(p) + " (" + render(occ.at(p)) + "): missing {" + join(fs) + "}");
  }
  return out;
}

Report cmd_large_instances(const Input& in) {
  Report r;
  const LargeProgram l = large_input(in.get());
  Json all = Json::array();
  for (const auto& p : enumerate_instances(l)) {
    all.push_back(render(p));
    r.say(render(p));
  }
  r.payload = {{"program", render(l)}, {"json", to_json(l)}, {"count", l.instance_count()}, {"instances", all}};
  return r;
}

Report cmd_large_leq(const std::string& a, const std::string& b) {
  Report r;
  const LargeProgram x = large_input(a);
  const LargeProgram y = large_input(b);
  const bool v = leq(x, y);
  r.payload = {{"left", render(x)}, {"right", render(y)}, {"leq", v}};
  r.say(render(x) + (v ? " <= " : " </= ") + render(y));
  if (!v) r.fail("refuted", 1);
  return r;
}

Report cmd_large_transition(const Input& in) {
  Report r;
  const LabelledTransition t = transition_from_json(Json::parse(in.get()));
  const bool ok = is_consistent_transition(t);
  const auto occ = occurrences(t.program);
  r.payload = {{"transition", to_json(t)}, {"consistent", ok}};
  r.say(std::string(ok ? "consistent" : "inconsistent") + ": " + render(t.program));
  const auto gap = saturation_gap(t);
  if (!gap.empty()) r.say("saturation gap:");
  r.payload["gap"] = gap_json(gap, occ, r);
  if (!ok) r.fail("refuted", 1);
  return r;
}

Report cmd_large_loop(const Input& in) {
  Report r;
  const Json j = Json::parse(in.get());
  const LargeLoop l{large_from_json(j.at("body"))};
  const FormulaSet phi = formula_set_from_json(j.at("phi"));
  const bool ok = is_consistent_loop(l, phi);
  const auto occ = occurrences(l.body);
  r.payload = {{"body", render(l.body)}, {"phi", to_json(phi)}, {"consistent", ok}};
  r.say(std::string(ok ? "consistent" : "inconsistent") + ": (" + render(l.body) + ")^");
  if (!phi.empty()) {
    Json lr = Json::array();
    for (const auto& [p, x] : loop_left_right_programs(l, phi)) {
      lr.push_back({{"position", to_string(p)}, {"lp", render(x.first)}, {"rp", render(x.second)}});
      r.say("  at " + to_string(p) + ": lp = " + render(x.first) + ", rp = " + render(x.second));
    }
    r.payload["left_right"] = lr;
  }
  const auto gap = loop_saturation_gap(l, phi);
  if (!gap.empty()) r.say("saturation gap:");
  r.payload["gap"] = gap_json(gap, occ, r);
  if (!ok) r.fail("refuted", 1);
  return r;
}

// ---------------------------------------------------------------------------
// model search

Report cmd_sat(const Input& in, const SearchFlags& s, const Options& o) {
  Report r;
  const std::string text = in.get();
  const auto strict = s.strict();
  const Formula f = strict ? parse_formula(text, *strict) : parse_formula(text);
  const SearchBudget b = s.budget(o, r);
  const SearchOutcome out = find_model(f, b);
  r.payload["formula"] = render(f);
  r.payload["result"] = outcome_json(out);
  if (out.found()) {
    r.say("model found with " + worlds(out.structure->size()) + ", at " +
          out.structure->world_name(out.world) + ":");
    describe_structure(r, *out.structure);
    return r;
  }
  r.say("no model " + bounded(b));
  r.say(kCaveat);
  r.payload["caveat"] = kCaveat;
  r.fail("no-model-bounded", 1);
  return r;
}

Report cmd_valid(const Input& in, const SearchFlags& s, bool minimize, const Options& o) {
  Report r;
  const std::string text = in.get();
  const auto strict = s.strict();
  const Formula f = strict ? parse_formula(text, *strict) : parse_formula(text);
  const SearchBudget b = s.budget(o, r);
  const SearchOutcome out = check_validity(f, b);
  r.payload["formula"] = render(f);
  r.payload["result"] = outcome_json(out);
  if (!out.found()) {
    r.say("valid on every structure " + bounded(b));
    r.say(kCaveat);
    r.payload["caveat"] = kCaveat;
    return r;
  }
  KripkeStructure k = *out.structure;
  World u = out.world;
  if (minimize) {
    std::tie(k, u) = minimize_countermodel(k, u, f);
    r.payload["minimized"] = {{"model", to_json(k)}, {"world", k.world_name(u)}};
  }
  r.say("countermodel with " + worlds(k.size()) + ", false at " + k.world_name(u) + ":");
  describe_structure(r, k);
  r.fail("countermodel", 1);
  return r;
}

Report cmd_pjudge(const Input& in, const SearchFlags& s, const Options& o) {
  Report r;
  const std::string text = in.get();
  const auto strict = s.strict();
  const ProgramJudgement j = strict ? parse_judgement(text, *strict) : parse_judgement(text);
  const SearchBudget b = s.budget(o, r);
  const SearchOutcome out = check_program_judgement(j, b);
  r.payload["judgement"] = render(j);
  r.payload["result"] = outcome_json(out);
  if (!out.found()) {
    r.say("holds on every structure " + bounded(b));
    r.say(kCaveat);
    r.payload["caveat"] = kCaveat;
    return r;
  }
  const auto& k = *out.structure;
  r.say("countermodel with " + worlds(k.size()) + ", violated at (" + k.world_name(out.pair->first) +
        ", " + k.world_name(out.pair->second) + "):");
  describe_structure(r, k);
  r.fail("countermodel", 1);
  return r;
}

struct HarnessFlags {
  int depth = 2;
  std::size_t max_worlds = 3;
  std::size_t instances = 500;
  std::optional<std::uint64_t> seed;
  std::string report;
  bool mutants = false;
  bool stop = false;
};

Report cmd_axioms_test(const HarnessFlags& h, const Options& o) {
  Report r;
  SoundnessConfig c;
  c.depth = h.depth;
  c.max_worlds = h.max_worlds;
  c.instances = h.instances;
  c.jobs = o.jobs;
  c.seed = h.seed ? *h.seed : fresh_seed();
  c.stop_at_first = h.stop;
  r.say("seed: " + std::to_string(c.seed));
  const SoundnessReport rep = h.mutants ? check_schemes(mutated_schemes(), c) : check_calculus(c);
  Json j = to_json(rep);
  j["seed"] = c.seed;
  j["depth"] = c.depth;
  j["instances_requested"] = c.instances;
  j["mutants"] = h.mutants;
  if (!h.report.empty()) {
    std::ofstream out(h.report);
    if (!out) throw UsageError("cannot write " + h.report);
    out << j.dump(2) << "\n";
  }
  r.payload = j;
  r.say("entry          instances  counterexamples  skipped");
  bool all_caught = true;
  for (const auto& e : rep.entries) {
    std::ostringstream row;
    row << std::left << std::setw(15) << e.name << std::setw(11) << e.instances << std::setw(17)
        << e.counterexamples << e.skipped;
    r.say(row.str());
    if (e.first) r.say("    e.g. " + *e.first);
    all_caught = all_caught && e.counterexamples > 0;
  }
  for (const auto& w : rep.warnings) r.say("warning: " + w);
  if (h.mutants) {
    r.say(all_caught ? "every mutant refuted" : "some mutant survived");
    if (!all_caught) r.fail("refuted", 1);
    return r;
  }
  r.say(std::to_string(rep.counterexamples()) + " counterexamples on structures with at most " +
        std::to_string(c.max_worlds) + " worlds");
  if (!rep.ok()) r.fail("countermodel", 1);
  return r;
}

Report cmd_fixtures(const std::string& dir, std::size_t instances, std::uint64_t seed, const Options& o) {
  Report r;
  FixtureOptions fo;
  if (!dir.empty()) fo.dir = dir;
  fo.harness.instances = instances;
  fo.harness.seed = seed;
  fo.jobs = o.jobs;
  r.say("seed: " + std::to_string(seed));
  const FixtureReport rep = run_fixture_suite(fo);
  r.payload = to_json(rep);
  for (const auto& x : rep.results) r.say(std::string(x.ok ? "pass  " : "FAIL  ") + x.name + ": " + x.detail);
  if (!rep.ok()) r.fail("refuted", 1);
  return r;
}

// ---------------------------------------------------------------------------

void emit(const Report& r, const std::string& command, const Options& o, double ms) {
  if (o.json) {
    Json j{{"command", command}, {"status", r.status}, {"exit", r.exit}, {"timing_ms", ms}, {"payload", r.payload}};
    std::cout << j.dump(2) << "\n";
    return;
  }
  for (const auto& l : r.lines) std::cout << l << "\n";
}

Report error_report(const std::string& status, int code, const std::string& message) {
  Report r;
  r.fail(status, code);
  r.payload = {{"error", message}};
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdlkit: iteration-free PDL with intersection and tests"};
  app.require_subcommand(0, 1);
  Options o;
  bool ascii_help = false;
  app.add_flag("--json", o.json, "Print a JSON report");
  app.add_option("--jobs", o.jobs, "Worker threads for model search (default: PDLKIT_JOBS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--ascii-help", ascii_help, "Print the input grammar");

  std::map<CLI::App*, std::function<Report()>> run;

  Input parse_in;
  std::string parse_vocab;
  bool parse_core = false;
  auto* parse = app.add_subcommand("parse", "Parse and print a formula or program judgement");
  parse_in.attach(parse, "Formula or judgement");
  parse->add_option("--vocab", parse_vocab, "Vocabulary JSON file");
  parse->add_flag("--core", parse_core, "Print without derived connectives");
  run[parse] = [&] { return cmd_parse(parse_in, parse_vocab, parse_core); };

  Input eval_in;
  std::string eval_model;
  std::optional<std::string> eval_world;
  auto* eval = app.add_subcommand("eval", "Evaluate a formula on a Kripke structure");
  eval_in.attach(eval, "Formula");
  eval->add_option("--model", eval_model, "Kripke structure JSON")->required();
  eval->add_option("--world", eval_world, "World to evaluate at (default: print the extension)");
  run[eval] = [&] { return cmd_eval(eval_in, eval_model, eval_world); };

  Input rel_in;
  std::string rel_model;
  auto* rel = app.add_subcommand("relation", "Print the relation of a program");
  rel_in.attach(rel, "Program");
  rel->add_option("--model", rel_model, "Kripke structure JSON")->required();
  run[rel] = [&] { return cmd_relation(rel_in, rel_model); };

  Input wit_in;
  WitnessFlags wit_flags;
  bool wit_dot = false;
  std::optional<std::size_t> wit_index;
  auto* wit = app.add_subcommand("witness", "Enumerate witness graphs for a transition");
  wit_in.attach(wit, "Program");
  wit_flags.attach(wit);
  wit->add_flag("--dot", wit_dot, "Print graphs in DOT");
  wit->add_option("--index", wit_index, "Only the graph with this index");
  run[wit] = [&] { return cmd_witness(wit_in, wit_flags, wit_dot, wit_index); };

  Input gw_in;
  WitnessFlags gw_flags;
  std::string gw_via;
  std::optional<std::size_t> gw_graph;
  auto* gw = app.add_subcommand("gateway", "Split a program at an articulation node of a witness graph");
  gw_in.attach(gw, "Program (no union)");
  gw_flags.attach(gw);
  gw->add_option("--via", gw_via, "Articulation node")->required();
  gw->add_option("--graph", gw_graph, "Witness graph index (default: first minimal one through --via)");
  run[gw] = [&] { return cmd_gateway(gw_in, gw_flags, gw_via, gw_graph); };

  Input nf_in;
  bool nf_program = false;
  bool nf_trace = false;
  auto* nf = app.add_subcommand("normalize", "Rewrite into Cyc/Forw normal form");
  nf_in.attach(nf, "Formula (or program with --program)");
  nf->add_flag("--program", nf_program, "Normalise a program outside any modality");
  nf->add_flag("--trace", nf_trace, "Print the rewrite steps");
  run[nf] = [&] { return cmd_normalize(nf_in, nf_program, nf_trace); };

  std::string proof_file;
  auto* cp = app.add_subcommand("check-proof", "Check a proof JSON file");
  cp->add_option("proof", proof_file, "Proof JSON file")->required();
  run[cp] = [&] { return cmd_check_proof(proof_file); };

  auto* large = app.add_subcommand("large", "Large programs and labelled transitions");
  large->require_subcommand(1);
  Input li_in;
  auto* li = large->add_subcommand("instances", "Enumerate the instances of a large program");
  li_in.attach(li, "Program text (lifted) or large-program JSON");
  run[li] = [&] { return cmd_large_instances(li_in); };
  std::string leq_a;
  std::string leq_b;
  auto* lq = large->add_subcommand("leq", "Whether every instance of the first is one of the second");
  lq->add_option("left", leq_a, "Large program")->required();
  lq->add_option("right", leq_b, "Large program")->required();
  run[lq] = [&] { return cmd_large_leq(leq_a, leq_b); };
  Input lt_in;
  auto* lt = large->add_subcommand("transition", "Consistency and saturation gap of a labelled transition");
  lt_in.attach(lt, "Transition JSON {\"left\",\"program\",\"right\"}");
  run[lt] = [&] { return cmd_large_transition(lt_in); };
  Input ll_in;
  auto* ll = large->add_subcommand("loop", "Consistency and saturation gap of a labelled loop");
  ll_in.attach(ll, "Loop JSON {\"body\",\"phi\"}");
  run[ll] = [&] { return cmd_large_loop(ll_in); };

  Input sat_in;
  SearchFlags sat_flags;
  auto* sat = app.add_subcommand("sat", "Search for a model");
  sat_in.attach(sat, "Formula");
  sat_flags.attach(sat);
  run[sat] = [&] { return cmd_sat(sat_in, sat_flags, o); };

  Input valid_in;
  SearchFlags valid_flags;
  bool valid_min = false;
  auto* valid = app.add_subcommand("valid", "Search for a countermodel");
  valid_in.attach(valid, "Formula");
  valid_flags.attach(valid);
  valid->add_flag("--minimize", valid_min, "Shrink the countermodel");
  run[valid] = [&] { return cmd_valid(valid_in, valid_flags, valid_min, o); };

  Input pj_in;
  SearchFlags pj_flags;
  auto* pj = app.add_subcommand("pjudge", "Check a program judgement a => b or a <=> b");
  pj_in.attach(pj, "Judgement");
  pj_flags.attach(pj);
  run[pj] = [&] { return cmd_pjudge(pj_in, pj_flags, o); };

  HarnessFlags hf;
  auto* ax = app.add_subcommand("axioms-test", "Soundness sweep over the axiom schemes and rules");
  ax->add_option("--depth", hf.depth, "Depth of the instantiation pool")->capture_default_str();
  ax->add_option("--max-worlds", hf.max_worlds, "Largest structure size")->capture_default_str();
  ax->add_option("--instances", hf.instances, "Instances per scheme")->capture_default_str();
  ax->add_option("--seed", hf.seed, "Pool seed (generated and printed if absent)");
  ax->add_option("--report", hf.report, "Write the JSON report to this file");
  ax->add_flag("--mutants", hf.mutants, "Sweep the corrupted schemes instead");
  ax->add_flag("--stop-at-first", hf.stop, "Stop each entry at its first counterexample");
  run[ax] = [&] { return cmd_axioms_test(hf, o); };

  std::string fx_dir;
  std::size_t fx_instances = 500;
  std::uint64_t fx_seed = 1;
  auto* fx = app.add_subcommand("fixtures", "Run the shipped fixtures");
  fx->add_option("--dir", fx_dir, "Fixture directory");
  fx->add_option("--instances", fx_instances, "Instances per scheme for the axiom harness")->capture_default_str();
  fx->add_option("--seed", fx_seed, "Pool seed for the axiom harness")->capture_default_str();
  run[fx] = [&] { return cmd_fixtures(fx_dir, fx_instances, fx_seed, o); };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (ascii_help) {
    std::cout << grammar_summary();
    return 0;
  }
  const auto chosen = app.get_subcommands();
  if (chosen.empty()) {
    std::cerr << app.help();
    return 2;
  }
  CLI::App* sub = chosen.front();
  std::string command = sub->get_name();
  if (sub == large) {
    sub = large->get_subcommands().front();
    command += " " + sub->get_name();
  }

  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  try {
    r = run.at(sub)();
  } catch (const ParseError& e) {
    r = error_report("parse-error", 2, e.what());
  } catch (const Json::exception& e) {
    r = error_report("parse-error", 2, e.what());
  } catch (const InputError& e) {
    r = error_report("usage-error", 2, e.what());
  } catch (const UsageError& e) {
    r = error_report("usage-error", 2, e.what());
  } catch (const SemanticError& e) {
    r = error_report("usage-error", 2, e.what());
  } catch (const BudgetError& e) {
    r = error_report("usage-error", 2, e.what());
  } catch (const std::invalid_argument& e) {
    r = error_report("usage-error", 2, e.what());
  } catch (const std::length_error& e) {
    r = error_report("usage-error", 2, e.what());
  } catch (const std::exception& e) {
    r = error_report("internal-error", 3, e.what());
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  emit(r, command, o, ms);
  if (r.payload.contains("error") && !o.json) std::cerr << "pdlkit " << command << ": " << r.payload["error"].get<std::string>() << "\n";
  return r.exit;
}
